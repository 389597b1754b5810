"""States, operators, intensities and weak values of the three-path experiment.

The Hilbert space is path (I, II, III) x spin (up, down) x energy (E0, E'),
12 dimensional, with composite index ``((path * 2) + spin) * 2 + energy``.
Paths are 0-based integers here (0 = I, 1 = II, 2 = III).

Detection is time integrated and not energy selective: the detected
intensity is the incoherent sum of the spin-up overlaps in the E0 and E'
channels.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import hilbert as hb

N_PATHS = 3
SPIN_UP, SPIN_DOWN = 0, 1
E0, EPRIME = 0, 1
DIM = N_PATHS * 2 * 2
PATH_NAMES = ("I", "II", "III")
BASELINE = 1.0 / 9.0


class VanishingOverlapError(ZeroDivisionError):
    """Pre- and postselected states are (numerically) orthogonal."""


class Kind(enum.Enum):
    DC = "dc"
    RF = "rf"
    ABSORBER = "abs"
    PAN = "pan"


class TagKind(enum.Enum):
    SPIN_X_PATH = "spin_x_path"
    PATH = "path"
    ENERGY_X_PATH = "energy_x_path"
    PAN = "pan"


@dataclass(frozen=True)
class OperatorTag:
    kind: TagKind
    path: int
    prop: int | None = None

    def label(self) -> str:
        if self.kind is TagKind.PAN:
            return f"pan:p{self.prop}:j{self.path}"
        return f"{self.kind.value}:{PATH_NAMES[self.path]}"


# interaction kind -> operator whose weak value the interaction probes
PROBED_TAG = {Kind.DC: TagKind.SPIN_X_PATH, Kind.ABSORBER: TagKind.PATH, Kind.RF: TagKind.ENERGY_X_PATH}


def path_index(name) -> int:
    """Accept ``0``/``"I"``/``"i"`` style path designations."""
    if isinstance(name, (int, np.integer)):
        idx = int(name)
    else:
        key = str(name).strip().upper()
        if key not in PATH_NAMES:
            raise ValueError(f"unknown path {name!r}")
        idx = PATH_NAMES.index(key)
    if not 0 <= idx < N_PATHS:
        raise ValueError(f"path index {idx} outside 0..{N_PATHS - 1}")
    return idx


def index(path: int, spin: int, energy: int) -> int:
    return ((path * 2) + spin) * 2 + energy


@dataclass(frozen=True)
class Selection:
    """Phase-shifter settings of the postselection.

    The three-path case uses ``chi1`` and ``chi2``; the N-path case uses
    ``chi_vec`` (one phase per path, path I first).
    """

    chi1: float = 0.0
    chi2: float = 0.0
    chi_vec: tuple[float, ...] = field(default_factory=tuple)
    n_paths: int = 3

    def __post_init__(self):
        if self.n_paths < 2:
            raise ValueError("n_paths must be at least 2")
        if self.chi_vec and len(self.chi_vec) != self.n_paths:
            raise ValueError(f"chi_vec has {len(self.chi_vec)} entries for {self.n_paths} paths")

    @classmethod
    def npath(cls, chis) -> "Selection":
        chis = tuple(float(c) for c in chis)
        return cls(chi_vec=chis, n_paths=len(chis))

    def path_phases(self) -> np.ndarray:
        """Phases carried by the path kets of the three-path final state."""
        c1, c2 = self.chi1, self.chi2
        return np.array([c2 - c1, c1 + c2, c1 - c2])


@dataclass(frozen=True)
class Interaction:
    kind: Kind
    path: int
    strength: float
    prop: int | None = None

    def __post_init__(self):
        if self.kind is Kind.ABSORBER:
            if not 0.0 <= self.strength <= 1.0:
                raise ValueError(f"absorption must lie in [0, 1], got {self.strength}")
        elif not 0.0 <= self.strength < 2 * math.pi:
            raise ValueError(f"rotation angle must lie in [0, 2pi), got {self.strength}")
        if self.kind is Kind.PAN and (self.prop is None or self.prop < 1):
            raise ValueError("PAN interactions need a property index p >= 1")


@dataclass(frozen=True)
class WeakValue:
    value: complex
    tag: OperatorTag
    energy_selected: bool = True

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class PhysicalContext:
    """Beam parameters of the experiment. Never enters intensity arithmetic."""

    wavelength_angstrom: float = 1.9
    rf_frequency_khz: float = 60.0
    energy_shift_nev: float = 0.25
    initial_energy_mev: float = 25.0


# ---------------------------------------------------------------- operators

I2 = hb.identity(2)
I_PATH = hb.identity(N_PATHS)
SIGMA_X = hb.PAULI_X
SIGMA_DC = hb.tensor(I_PATH, SIGMA_X, I2)
SIGMA_RF = hb.tensor(I_PATH, SIGMA_X, SIGMA_X)


def path_projector(j: int) -> np.ndarray:
    p = np.zeros((N_PATHS, N_PATHS), dtype=complex)
    p[j, j] = 1.0
    return hb.tensor(p, I2, I2)


def flip_operator(kind: Kind) -> np.ndarray:
    """The Pauli-type flip a rotation of ``kind`` is generated by."""
    if kind is Kind.DC:
        return SIGMA_DC
    if kind is Kind.RF:
        return SIGMA_RF
    raise ValueError(f"{kind} is not a rotation")


def tag_operator(tag: OperatorTag) -> np.ndarray:
    proj = path_projector(tag.path)
    if tag.kind is TagKind.SPIN_X_PATH:
        return SIGMA_DC @ proj
    if tag.kind is TagKind.ENERGY_X_PATH:
        return SIGMA_RF @ proj
    if tag.kind is TagKind.PATH:
        return proj
    raise ValueError(f"{tag.kind} has no three-path operator")


def rotation(kind: Kind, j: int, alpha: float) -> np.ndarray:
    """Closed-form ``exp(-i alpha/2 sigma Pi_j)``."""
    proj = path_projector(j)
    return (
        hb.identity(DIM)
        - (1.0 - math.cos(alpha / 2)) * proj
        - 1j * math.sin(alpha / 2) * flip_operator(kind) @ proj
    )


def absorber(j: int, absorption: float) -> np.ndarray:
    return hb.identity(DIM) - (1.0 - math.sqrt(1.0 - absorption)) * path_projector(j)


def interaction_operator(x: Interaction) -> np.ndarray:
    if x.kind is Kind.ABSORBER:
        return absorber(x.path, x.strength)
    if x.kind in (Kind.DC, Kind.RF):
        return rotation(x.kind, x.path, x.strength)
    raise ValueError("PAN interactions live in the N-path space; see qcheshire.npath")


# ------------------------------------------------------------------- states


def preselection() -> np.ndarray:
    """(|I,down,E0> + |II,up,E0> + |III,down,E'>) / sqrt(3)."""
    v = np.zeros(DIM, dtype=complex)
    v[index(0, SPIN_DOWN, E0)] = 1.0
    v[index(1, SPIN_UP, E0)] = 1.0
    v[index(2, SPIN_DOWN, EPRIME)] = 1.0
    return v / math.sqrt(3.0)


def unprepared_state() -> np.ndarray:
    """Equal superposition over the three paths before any spin flip."""
    v = np.zeros(DIM, dtype=complex)
    for j in range(N_PATHS):
        v[index(j, SPIN_UP, E0)] = 1.0
    return v / math.sqrt(3.0)


def postselection(sel: Selection, energy: int | None = E0) -> np.ndarray:
    """Postselected final state with the phases carried by the path kets.

    ``energy=E0`` gives |f0>, ``energy=EPRIME`` gives |f'>, and ``None`` the
    6-dimensional path x spin vector |f> (index ``path * 2 + spin``).
    """
    phases = np.exp(1j * sel.path_phases()) / math.sqrt(3.0)
    if energy is None:
        f = np.zeros(N_PATHS * 2, dtype=complex)
        for j in range(N_PATHS):
            f[j * 2 + SPIN_UP] = phases[j]
        return f
    if energy not in (E0, EPRIME):
        raise ValueError(f"energy must be E0, EPRIME or None, got {energy!r}")
    f = np.zeros(DIM, dtype=complex)
    for j in range(N_PATHS):
        f[index(j, SPIN_UP, energy)] = phases[j]
    return f


# -------------------------------------------------------------- intensities


def path_amplitudes(psi: np.ndarray, sel: Selection) -> np.ndarray:
    """Spin-up overlaps ``<f_e|Pi_j|psi>`` as a (2 energies, 3 paths) array."""
    bra = np.conj(np.exp(1j * sel.path_phases()) / math.sqrt(3.0))
    block = psi.reshape(N_PATHS, 2, 2)[:, SPIN_UP, :]  # (path, energy)
    return (bra[:, None] * block).T


def postselected_intensity(psi: np.ndarray, sel: Selection, coherence=None) -> float:
    """Energy-traced, spin-up projected intensity of the state ``psi``.

    ``coherence`` is an optional symmetric 3x3 matrix (unit diagonal) that
    scales the cross terms between path amplitudes; ``None`` means fully
    coherent sub-beams, for which this equals
    ``|<f0|psi>|^2 + |<f'|psi>|^2``.
    """
    amps = path_amplitudes(psi, sel)
    if coherence is None:
        return float(np.sum(np.abs(amps.sum(axis=1)) ** 2))
    v = np.asarray(coherence, dtype=float)
    return float(sum(np.real(a @ v @ np.conj(a)) for a in amps))


def detected_intensity(x: Interaction | None, sel: Selection) -> float:
    psi = preselection()
    if x is not None:
        psi = interaction_operator(x) @ psi
    return postselected_intensity(psi, sel)


def intensity_perturbative(x: Interaction, sel: Selection) -> float:
    """Second-order expansion of the intensity, evaluated exactly as written."""
    j = x.path
    if x.kind is Kind.ABSORBER:
        return BASELINE * (1.0 - x.strength * (j == 1))
    a = x.strength
    if x.kind is Kind.DC:
        linear = a * (j == 0) * math.sin(2 * sel.chi1)
    elif x.kind is Kind.RF:
        linear = a * (j == 2) * math.sin(2 * sel.chi2)
    else:
        raise ValueError(f"no perturbative formula for {x.kind}")
    mean_shift = a * a / 4.0 * ((j == 0) - (j == 1) + (j == 2))
    return BASELINE * (1.0 + linear + mean_shift)


def weak_value(tag: OperatorTag, sel: Selection, energy: int = E0) -> WeakValue:
    """``<f_E|O|i> / <f_E|i>`` from the constructed state vectors."""
    i = preselection()
    f = postselection(sel, energy)
    overlap = hb.inner(f, i)
    if abs(overlap) < 1e-14:
        raise VanishingOverlapError(f"|<f|i>| = {abs(overlap):.3g} is too small for a weak value")
    value = hb.inner(f, tag_operator(tag) @ i) / overlap
    return WeakValue(value=value, tag=tag, energy_selected=True)


def weak_value_matrix(sel: Selection) -> np.ndarray:
    """Complex weak values; rows spin-x / path / energy-x, columns I, II, III."""
    kinds = (TagKind.SPIN_X_PATH, TagKind.PATH, TagKind.ENERGY_X_PATH)
    return np.array([[weak_value(OperatorTag(k, j), sel).value for j in range(N_PATHS)] for k in kinds])


# ------------------------------------------------------- sum rules / checks


def completeness_check(basis_vectors, j: int, state: np.ndarray | None = None, atol: float = 1e-10):
    """Both sides of ``<i|Pi_j|i> = sum_m p_m <Pi_j>_w^m``.

    ``p_m <Pi_j>_w^m`` is evaluated as ``<i|f_m><f_m|Pi_j|i>`` so that final
    states orthogonal to ``|i>`` contribute zero instead of 0/0.
    """
    i = preselection() if state is None else state
    fs = np.array([np.asarray(b, dtype=complex) for b in basis_vectors])
    if fs.shape != (i.size, i.size):
        raise hb.DimensionError(f"need {i.size} basis vectors of dimension {i.size}, got {fs.shape}")
    gram = np.conj(fs) @ fs.T
    if not np.allclose(gram, np.eye(i.size), atol=atol, rtol=0):
        raise ValueError("final basis is not orthonormal")
    proj = path_projector(j)
    lhs = hb.expectation(proj, i).real
    rhs = sum(hb.inner(i, f) * hb.inner(f, proj @ i) for f in fs)
    return float(lhs), float(np.real(rhs))


def spin_x_expectation(j: int) -> float:
    i = preselection()
    return float(hb.expectation(SIGMA_DC @ path_projector(j), i).real)
