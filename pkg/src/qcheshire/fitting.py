"""Weighted sinusoid fits ``I(chi) = i0 + b sin(omega chi + phi)``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_ITER = 200


class FitError(ArithmeticError):
    """The fit failed; ``diagnostics`` holds the solver state at exit."""

    def __init__(self, msg: str, diagnostics: dict | None = None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class FitResult:
    i0: float
    b: float
    omega: float
    phi: float
    cov: np.ndarray
    chi2_red: float
    omega_fixed: bool
    n_iter: int = 0

    @property
    def errors(self) -> dict:
        d = np.sqrt(np.maximum(np.diag(self.cov), 0.0))
        names = ("i0", "b", "phi") if self.omega_fixed else ("i0", "b", "omega", "phi")
        return dict(zip(names, map(float, d)))

    def var(self, name: str) -> float:
        return self.errors[name] ** 2

    def covariance(self, a: str, b: str) -> float:
        names = ("i0", "b", "phi") if self.omega_fixed else ("i0", "b", "omega", "phi")
        return float(self.cov[names.index(a), names.index(b)])

    def model(self, chi) -> np.ndarray:
        return self.i0 + self.b * np.sin(self.omega * np.asarray(chi) + self.phi)

    def to_dict(self) -> dict:
        return {
            "i0": self.i0,
            "b": self.b,
            "omega": self.omega,
            "phi": self.phi,
            "errors": self.errors,
            "chi2_red": self.chi2_red,
            "omega_fixed": self.omega_fixed,
        }


def canonical_phase(phi: float) -> float:
    """Wrap into [-pi, pi)."""
    return (phi + math.pi) % (2 * math.pi) - math.pi


def _model_and_jacobian(p, chi, omega_fixed):
    if omega_fixed is None:
        i0, b, omega, phi = p
    else:
        i0, b, phi = p
        omega = omega_fixed
    arg = omega * chi + phi
    s, c = np.sin(arg), np.cos(arg)
    f = i0 + b * s
    cols = [np.ones_like(chi), s]
    if omega_fixed is None:
        cols.append(b * chi * c)
    cols.append(b * c)
    return f, np.column_stack(cols)


def _linear_fit(chi, y, w, omega):
    """Weighted linear LS for i0 + c sin(omega chi) + s cos(omega chi)."""
    a = np.column_stack([np.ones_like(chi), np.sin(omega * chi), np.cos(omega * chi)])
    aw = a * np.sqrt(w)[:, None]
    coef, *_ = np.linalg.lstsq(aw, y * np.sqrt(w), rcond=None)
    chi2 = float(np.sum(w * (y - a @ coef) ** 2))
    return coef, chi2


def _fourier_guess(chi, y, w, omega):
    i0 = float(np.sum(w * y) / np.sum(w))
    d = y - i0
    n = chi.size
    c = 2.0 / n * float(np.sum(d * np.sin(omega * chi)))
    s = 2.0 / n * float(np.sum(d * np.cos(omega * chi)))
    return i0, math.hypot(c, s), math.atan2(s, c)


def fit_sinusoid(chi, y, sigma, fixed_omega: float | None = None, nominal_omega: float = 1.0,
                 n_grid: int = 201) -> FitResult:
    """Weighted least-squares sinusoid fit by damped Gauss-Newton.

    With ``fixed_omega`` the three parameters (i0, b, phi) are fitted and the
    start point comes from the Fourier component at that frequency.
    Otherwise omega is first located on a grid over
    ``[0.5, 1.5] * nominal_omega`` (linear sub-fits per grid value) and then
    refined together with the other parameters. Parameter covariance is the
    inverse of the weighted normal matrix. ``b`` is made non-negative by
    shifting ``phi`` by pi.

    Raises
    ------
    FitError
        On degenerate input or when the iteration cap is reached.
    """
    chi = np.asarray(chi, dtype=float)
    y = np.asarray(y, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if not chi.shape == y.shape == sigma.shape or chi.ndim != 1:
        raise FitError("chi, y and sigma must be equal-length 1-d arrays")
    n = chi.size
    k = 3 if fixed_omega is not None else 4
    if n < 5:
        raise FitError(f"need at least 5 points, got {n}")
    if np.any(sigma <= 0) or not np.all(np.isfinite(sigma)):
        raise FitError("all sigma must be positive and finite")
    if np.ptp(chi) == 0:
        raise FitError("degenerate phase grid: all chi are equal")
    w = 1.0 / sigma**2

    if fixed_omega is not None:
        i0, b, phi = _fourier_guess(chi, y, w, fixed_omega)
        p = np.array([i0, b, phi])
    else:
        grid = np.linspace(0.5, 1.5, n_grid) * nominal_omega
        best = min(grid, key=lambda om: _linear_fit(chi, y, w, om)[1])
        (i0, c, s), _ = _linear_fit(chi, y, w, best)
        p = np.array([i0, math.hypot(c, s), best, math.atan2(s, c)])

    def chi2_of(params):
        f, _ = _model_and_jacobian(params, chi, fixed_omega)
        return float(np.sum(w * (y - f) ** 2))

    lam = 1e-3
    chi2 = chi2_of(p)
    y_scale = float(np.max(np.abs(y))) or 1.0
    converged = False
    for it in range(1, MAX_ITER + 1):
        f, jac = _model_and_jacobian(p, chi, fixed_omega)
        r = y - f
        a = jac.T @ (jac * w[:, None])
        g = jac.T @ (w * r)
        dvals = np.diag(a).copy()
        floor = 1e-12 * max(float(np.max(dvals)), 1e-300)
        dvals = np.maximum(dvals, floor)
        while True:
            try:
                step = np.linalg.solve(a + lam * np.diag(dvals), g)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(a + lam * np.diag(dvals), g, rcond=None)[0]
            trial = p + step
            chi2_trial = chi2_of(trial)
            if chi2_trial <= chi2:
                break
            lam *= 10.0
            if lam > 1e16:
                break
        if chi2_trial <= chi2:
            small_step = np.all(np.abs(step) <= 1e-12 * (np.abs(p) + 1e-12 * y_scale))
            stalled = chi2 - chi2_trial <= 1e-15 * chi2
            p, chi2 = trial, chi2_trial
            lam = max(lam / 10.0, 1e-12)
            if small_step or stalled or chi2 <= 1e-28 * n * y_scale**2 * float(np.max(w)):
                converged = True
                break
        else:
            # no decrease possible: at a minimum to machine precision
            converged = True
            break
    if not converged:
        raise FitError(
            f"fit did not converge in {MAX_ITER} iterations",
            {"params": p.tolist(), "chi2": chi2, "lambda": lam},
        )

    _, jac = _model_and_jacobian(p, chi, fixed_omega)
    normal = jac.T @ (jac * w[:, None])
    cov = np.linalg.pinv(normal, hermitian=True)
    if fixed_omega is not None:
        i0, b, phi = p
        omega = float(fixed_omega)
    else:
        i0, b, omega, phi = p
    if b < 0:
        b, phi = -b, phi + math.pi
        sign = np.ones(k)
        sign[1] = -1.0
        cov = cov * np.outer(sign, sign)
    dof = n - k
    return FitResult(
        i0=float(i0), b=float(b), omega=float(omega), phi=canonical_phase(float(phi)),
        cov=(cov + cov.T) / 2, chi2_red=chi2 / dof, omega_fixed=fixed_omega is not None, n_iter=it,
    )


def fit_interferogram(ifg, fixed_omega: float | None = None, nominal_omega: float = 1.0) -> FitResult:
    return fit_sinusoid(ifg.chi, ifg.value, ifg.sigma, fixed_omega=fixed_omega, nominal_omega=nominal_omega)


def contrast(fit: FitResult) -> tuple[float, float]:
    """Contrast ``b / i0`` and its first-order error."""
    if fit.i0 <= 0:
        raise ValueError(f"contrast undefined for mean intensity {fit.i0}")
    c = fit.b / fit.i0
    var = (
        fit.var("b") / fit.i0**2
        + (fit.b / fit.i0**2) ** 2 * fit.var("i0")
        - 2 * fit.b / fit.i0**3 * fit.covariance("i0", "b")
    )
    return c, math.sqrt(max(var, 0.0))
