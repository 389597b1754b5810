"""Weak-value extraction from paired prep/weak interferogram fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import model as m
from .config import LOOPS, ExperimentConfig
from .fitting import FitResult, contrast, fit_interferogram
from .synth import CELL_KINDS, MeasurementSet

ROW_LABELS = ("DC", "Abs", "RF")
COL_LABELS = m.PATH_NAMES
SINGULAR_B = 1e-12


@dataclass(frozen=True)
class SignalDecomposition:
    b_signal: float
    db_signal: float
    phi_signal: float


@dataclass(frozen=True)
class ExtractionResult:
    magnitude: float
    error: float
    tag: m.OperatorTag


def _phase_var(fit: FitResult) -> float:
    return fit.var("phi")


def decompose_signal(fit_weak: FitResult, fit_prep: FitResult) -> SignalDecomposition:
    """Amplitude of the oscillation added by the weak interaction.

    The weak-interaction oscillation is the phasor sum of the preparation
    oscillation and the signal. Both fits must share omega. Fits here use
    the sine convention; a common cos/sin shift of pi/2 cancels in the phase
    difference, and ``phi_signal`` is reported in the sine convention too.
    """
    if not math.isclose(fit_weak.omega, fit_prep.omega, rel_tol=1e-12, abs_tol=1e-12):
        raise ValueError(f"fits have different omega ({fit_weak.omega} vs {fit_prep.omega})")
    bw, bp = fit_weak.b, fit_prep.b
    dbw, dbp = fit_weak.errors["b"], fit_prep.errors["b"]
    dphi = fit_weak.phi - fit_prep.phi
    cosd, sind = math.cos(dphi), math.sin(dphi)
    b_sig = math.sqrt(max(bw * bw + bp * bp - 2 * bw * bp * cosd, 0.0))
    phasor = bw * complex(math.cos(fit_weak.phi), math.sin(fit_weak.phi)) - bp * complex(
        math.cos(fit_prep.phi), math.sin(fit_prep.phi)
    )
    phi_sig = math.atan2(phasor.imag, phasor.real)
    if b_sig < SINGULAR_B * max(bw, bp, 1.0):
        return SignalDecomposition(0.0, max(dbw, dbp), phi_sig)
    db_sig = (
        math.sqrt(
            ((bw - bp * cosd) * dbw) ** 2
            + ((bp - bw * cosd) * dbp) ** 2
            + (bw * bp * sind) ** 2 * (_phase_var(fit_weak) + _phase_var(fit_prep))
        )
        / b_sig
    )
    return SignalDecomposition(b_sig, db_sig, phi_sig)


def extract_rotation_wv(dec: SignalDecomposition, i0_prep: float, di0_prep: float, c_empty: float,
                        dc_empty: float, alpha: float, dalpha: float, tag: m.OperatorTag) -> ExtractionResult:
    """First-order ``|weak value| = (b_signal / i0_prep) / (c_empty alpha)``.

    The error is the relative-error quadrature of the four inputs, written
    so that it stays finite (and positive) when ``b_signal`` is zero.
    """
    if c_empty <= 0:
        raise ValueError(f"c_empty must be positive, got {c_empty}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if i0_prep <= 0:
        raise ValueError(f"i0_prep must be positive, got {i0_prep}")
    denom = i0_prep * c_empty * alpha
    mag = dec.b_signal / denom
    rel = (di0_prep / i0_prep) ** 2 + (dc_empty / c_empty) ** 2 + (dalpha / alpha) ** 2
    err = math.sqrt((dec.db_signal / denom) ** 2 + mag * mag * rel)
    return ExtractionResult(mag, err, tag)


def extract_absorber_wv(i0_weak: float, di0_weak: float, i0_prep: float, di0_prep: float,
                        a: float, da: float, tag: m.OperatorTag | None = None) -> ExtractionResult:
    """Path weak value ``(1 - i0_weak / i0_prep) / a`` with propagated error."""
    if a <= 0:
        raise ValueError(f"absorption must be positive, got {a}")
    if i0_prep <= 0:
        raise ValueError(f"i0_prep must be positive, got {i0_prep}")
    a_w = 1.0 - i0_weak / i0_prep
    err = math.sqrt(
        (a_w * da / a) ** 2 + (i0_weak * di0_prep / i0_prep**2) ** 2 + (di0_weak / i0_prep) ** 2
    ) / a
    if tag is None:
        tag = m.OperatorTag(m.TagKind.PATH, 1)
    return ExtractionResult(a_w / a, err, tag)


# ----------------------------------------------------------- mean intensities


@dataclass(frozen=True)
class MeanShift:
    kind: m.Kind
    path: int
    ratio: float
    error: float
    expected: float
    expected_label: str

    @property
    def deviation_sigma(self) -> float:
        return abs(self.ratio - self.expected) / self.error if self.error > 0 else math.inf


def expected_mean_ratio(kind: m.Kind, path: int, alpha: float, absorption: float) -> tuple[float, str]:
    if kind is m.Kind.ABSORBER:
        return (1.0 - absorption, "-A") if path == 1 else (1.0, "0")
    if path == 1:
        return 1.0 - alpha**2 / 4, "-alpha^2/4"
    return 1.0 + alpha**2 / 4, "+alpha^2/4"


def mean_intensity_analysis(pairs: dict, alpha: float, absorption: float) -> dict:
    """``i0_weak / i0_prep`` per (interaction, path) with first-order errors.

    ``pairs`` maps ``(Kind, path)`` to ``(fit_weak, fit_prep)`` and must hold
    all nine cells.
    """
    out = {}
    for kind in CELL_KINDS:
        for j in range(m.N_PATHS):
            if (kind, j) not in pairs:
                raise KeyError(f"missing pair for {kind.value} in path {m.PATH_NAMES[j]}")
            fw, fp = pairs[(kind, j)]
            r = fw.i0 / fp.i0
            err = abs(r) * math.hypot(fw.errors["i0"] / fw.i0, fp.errors["i0"] / fp.i0)
            exp, label = expected_mean_ratio(kind, j, alpha, absorption)
            out[(kind, j)] = MeanShift(kind, j, r, err, exp, label)
    return out


# ------------------------------------------------------------ matrix report


@dataclass
class WeakValueMatrix:
    values: np.ndarray  # 3x3, rows DC / Abs / RF, columns I / II / III
    errors: np.ndarray
    row_sums: np.ndarray = field(init=False)
    row_errors: np.ndarray = field(init=False)
    col_sums: np.ndarray = field(init=False)
    col_errors: np.ndarray = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.errors = np.asarray(self.errors, dtype=float)
        self.row_sums = self.values.sum(axis=1)
        self.row_errors = np.sqrt((self.errors**2).sum(axis=1))
        self.col_sums = self.values.sum(axis=0)
        self.col_errors = np.sqrt((self.errors**2).sum(axis=0))

    def deviation_from_identity(self) -> np.ndarray:
        return self.values - np.eye(3)

    def identity_flags(self, n_sigma: float = 3.0) -> np.ndarray:
        """True where a cell agrees with the ideal identity within ``n_sigma``."""
        dev = np.abs(self.deviation_from_identity())
        return dev <= n_sigma * np.where(self.errors > 0, self.errors, np.inf)

    def to_dict(self) -> dict:
        return {
            "rows": list(ROW_LABELS),
            "columns": list(COL_LABELS),
            "values": self.values.tolist(),
            "errors": self.errors.tolist(),
            "row_sums": self.row_sums.tolist(),
            "row_errors": self.row_errors.tolist(),
            "col_sums": self.col_sums.tolist(),
            "col_errors": self.col_errors.tolist(),
            "agrees_with_identity_3sigma": self.identity_flags().tolist(),
        }


def assemble_wv_matrix(results: dict) -> WeakValueMatrix:
    """Arrange nine ``ExtractionResult`` keyed by ``(Kind, path)`` as a 3x3 grid."""
    vals = np.zeros((3, 3))
    errs = np.zeros((3, 3))
    for r, kind in enumerate(CELL_KINDS):
        for j in range(3):
            res = results[(kind, j)]
            vals[r, j] = res.magnitude
            errs[r, j] = res.error
    return WeakValueMatrix(vals, errs)


# ------------------------------------------------------------------ pipeline


@dataclass
class Analysis:
    empty_fits: dict
    c_empty: dict  # loop -> (contrast, error)
    fits: dict  # (Kind, path) -> (fit_weak, fit_prep)
    signals: dict  # (Kind, path) -> SignalDecomposition (rotations only)
    results: dict  # (Kind, path) -> ExtractionResult
    matrix: WeakValueMatrix
    means: dict


def analyse(ms: MeasurementSet) -> Analysis:
    """Fit every interferogram and extract the 3x3 weak-value matrix.

    Empty interferograms are fitted with free omega; prep and weak
    interferograms reuse the omega of the loop mapped to their swept path.
    """
    cfg: ExperimentConfig = ms.config
    empty_fits = {loop: fit_interferogram(ms.empty[loop]) for loop in LOOPS}
    c_empty = {loop: contrast(f) for loop, f in empty_fits.items()}

    fits, signals, results = {}, {}, {}
    for (kind, j), (prep, weak) in ms.pairs.items():
        loop = cfg.c_empty_loop[j]
        omega = empty_fits[loop].omega
        fp = fit_interferogram(prep, fixed_omega=omega)
        fw = fit_interferogram(weak, fixed_omega=omega)
        fits[(kind, j)] = (fw, fp)
        tag = m.OperatorTag(m.PROBED_TAG[kind], j)
        if kind is m.Kind.ABSORBER:
            results[(kind, j)] = extract_absorber_wv(
                fw.i0, fw.errors["i0"], fp.i0, fp.errors["i0"], cfg.absorption, cfg.absorption_err, tag
            )
        else:
            dec = decompose_signal(fw, fp)
            signals[(kind, j)] = dec
            c, dc = c_empty[loop]
            results[(kind, j)] = extract_rotation_wv(
                dec, fp.i0, fp.errors["i0"], c, dc, cfg.alpha_rot, cfg.alpha_err, tag
            )
    matrix = assemble_wv_matrix(results)
    means = mean_intensity_analysis(fits, cfg.alpha_rot, cfg.absorption)
    return Analysis(empty_fits, c_empty, fits, signals, results, matrix, means)
