"""Oracle self-test suites, runnable from the command line.

Each suite compares two independent routes to the same number. ``faults``
names suites whose inputs are deliberately corrupted, to check that the
harness really notices a broken operator.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import hilbert as hb
from . import model as m
from . import npath

SUITES = ("expm", "pan", "completeness", "perturbative")


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    detail: str
    seconds: float = 0.0


# ------------------------------------------------------------- corruptions


def _corrupt_rotation(kind, j, alpha):
    # wrong sign of the generator: exp(+i alpha/2 sigma Pi_j)
    return m.rotation(kind, j, -alpha)


def _corrupt_pan_closed(n, p, j, alpha, sel):
    s = math.sin(alpha / 2)
    return npath.pan_intensity_closed(n, p, j, alpha, sel) + (j == p + 1) * s**2 / n**2


def _corrupt_basis(dim, rng):
    q = _random_unitary(dim, rng)
    q[:, 0] = q[:, 1]
    return q


def _corrupt_perturbative(x, sel):
    # drop the second-order mean shift
    a = x.strength
    mean_shift = a * a / 4.0 * ((x.path == 0) - (x.path == 1) + (x.path == 2))
    return m.intensity_perturbative(x, sel) - m.BASELINE * mean_shift


def _random_unitary(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


# ------------------------------------------------------------------ suites


def suite_expm(rotation=m.rotation, n_cases: int = 100, seed: int = 1, tol: float = 1e-10) -> SuiteResult:
    """Closed-form rotations against the series matrix exponential."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_cases):
        kind = (m.Kind.DC, m.Kind.RF)[rng.integers(2)]
        j = int(rng.integers(3))
        alpha = float(rng.uniform(0.0, 2 * math.pi))
        gen = m.flip_operator(kind) @ m.path_projector(j)
        oracle = hb.expm(-0.5j * alpha * gen)
        worst = max(worst, float(np.max(np.abs(rotation(kind, j, alpha) - oracle))))
    return SuiteResult("expm", worst <= tol, worst, f"max |closed - expm| over {n_cases} cases")


def suite_pan(closed=npath.pan_intensity_closed, n_vectors: int = 20, seed: int = 2, tol: float = 1e-12) -> SuiteResult:
    """Propagated N-path intensities against the closed form."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (2, 3, 4, 5):
        for _ in range(n_vectors):
            sel = m.Selection.npath(rng.uniform(-math.pi, math.pi, n))
            for alpha in (0.05, math.pi / 9, 1.0):
                for p in range(1, n):
                    for j in range(1, n + 1):
                        d = abs(npath.pan_intensity(n, p, j, alpha, sel) - closed(n, p, j, alpha, sel))
                        worst = max(worst, d)
    return SuiteResult("pan", worst <= tol, worst, "max |propagated - closed| for N = 2..5")


def suite_completeness(basis_factory=_random_unitary, n_bases: int = 5, seed: int = 3, tol: float = 1e-12) -> SuiteResult:
    """Weak values over a complete final basis average back to the expectation value."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    try:
        for _ in range(n_bases):
            q = basis_factory(m.DIM, rng)
            for j in range(m.N_PATHS):
                lhs, rhs = m.completeness_check(q.T, j)
                worst = max(worst, abs(lhs - 1 / 3), abs(rhs - 1 / 3))
        for j in range(m.N_PATHS):
            worst = max(worst, abs(m.spin_x_expectation(j)))
    except ValueError as exc:
        return SuiteResult("completeness", False, math.inf, f"sum rule not evaluable: {exc}")
    return SuiteResult("completeness", worst <= tol, worst, "max deviation from 1/3 (and from 0 for spin-x)")


def suite_perturbative(perturbative=m.intensity_perturbative, lo: float = 6.5, hi: float = 9.5) -> SuiteResult:
    """Exact minus second-order intensity must shrink like alpha^3."""
    alphas = (0.4, 0.2, 0.1, 0.05)
    chis = np.linspace(0.0, math.pi, 61)
    errs = []
    for a in alphas:
        e = 0.0
        for kind, j in ((m.Kind.DC, 0), (m.Kind.RF, 2)):
            x = m.Interaction(kind, j, a)
            for c in chis:
                sel = m.Selection(chi1=float(c), chi2=float(c))
                e = max(e, abs(m.detected_intensity(x, sel) - perturbative(x, sel)))
        errs.append(e)
    ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)]
    ok = all(lo <= r <= hi for r in ratios)
    worst = max(abs(r - 8.0) for r in ratios)
    return SuiteResult("perturbative", ok, worst, "error ratios " + ", ".join(f"{r:.3f}" for r in ratios))


def run_selftest(faults=()) -> list[SuiteResult]:
    faults = set(faults)
    unknown = faults - set(SUITES)
    if unknown:
        raise ValueError(f"unknown suite(s) {sorted(unknown)}; expected {SUITES}")
    calls = {
        "expm": lambda: suite_expm(_corrupt_rotation if "expm" in faults else m.rotation),
        "pan": lambda: suite_pan(_corrupt_pan_closed if "pan" in faults else npath.pan_intensity_closed),
        "completeness": lambda: suite_completeness(_corrupt_basis if "completeness" in faults else _random_unitary),
        "perturbative": lambda: suite_perturbative(
            _corrupt_perturbative if "perturbative" in faults else m.intensity_perturbative
        ),
    }
    out = []
    for name in SUITES:
        t0 = time.perf_counter()
        res = calls[name]()
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out


def format_results(results) -> str:
    lines = [
        f"{'PASS' if r.passed else 'FAIL'}  {r.name:<13} worst={r.worst:.3e}  {r.detail}  ({r.seconds:.2f} s)"
        for r in results
    ]
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
