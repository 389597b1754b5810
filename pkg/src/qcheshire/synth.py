"""Interferogram synthesis: phase-shifter sweeps, imperfections, counting noise."""

from __future__ import annotations

import enum
import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import model as m
from .config import LOOP_PATHS, LOOP_SWEEP, LOOPS, CountingModel, ExperimentConfig, ImperfectionModel

CELL_KINDS = (m.Kind.DC, m.Kind.ABSORBER, m.Kind.RF)


class ScenarioKind(enum.Enum):
    EMPTY = "empty"
    PREP = "prep"
    WEAK = "weak"
    ADJUST_SCAN = "adjust"


@dataclass(frozen=True)
class Scenario:
    """One interferogram recipe.

    ``sweep_path`` is the 0-based path whose phase shifter is scanned. The
    scanned setting ``chi`` is the phase of that path relative to the
    others, so the grid value enters the selection phases as
    ``chi1 += chi/2`` (path I), ``chi2 += chi/2`` (path III) or both
    (path II) and fringes have unit angular frequency in ``chi``.
    """

    kind: ScenarioKind
    sweep_path: int = 0
    chi_grid: tuple[float, ...] = ()
    interaction: m.Interaction | None = None
    loop: str | None = None
    detune: float = 0.0
    label: str = ""

    def __post_init__(self):
        if len(self.chi_grid) < 5:
            raise ValueError(f"need at least 5 phase settings, got {len(self.chi_grid)}")
        if any(b <= a for a, b in zip(self.chi_grid, self.chi_grid[1:])):
            raise ValueError("chi_grid must be strictly increasing")
        if self.kind is ScenarioKind.WEAK and self.interaction is None:
            raise ValueError("WEAK scenarios need an interaction")
        if self.kind is ScenarioKind.EMPTY and self.loop not in LOOPS:
            raise ValueError(f"EMPTY scenarios need a loop out of {LOOPS}")
        m.path_index(self.sweep_path)

    @property
    def n_points(self) -> int:
        return len(self.chi_grid)

    @property
    def scenario_id(self) -> str:
        return self.label or default_label(self)


def default_label(sc: Scenario) -> str:
    if sc.kind is ScenarioKind.EMPTY:
        return f"empty:{sc.loop}"
    if sc.kind is ScenarioKind.PREP:
        return f"prep:{m.PATH_NAMES[sc.sweep_path]}"
    if sc.kind is ScenarioKind.ADJUST_SCAN:
        return f"adjust:{sc.detune!r}"
    x = sc.interaction
    return f"weak:{x.kind.value}:{m.PATH_NAMES[x.path]}@{m.PATH_NAMES[sc.sweep_path]}"


@dataclass(eq=False)
class Interferogram:
    chi: np.ndarray
    value: np.ndarray
    sigma: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.chi = np.asarray(self.chi, dtype=float)
        self.value = np.asarray(self.value, dtype=float)
        self.sigma = np.asarray(self.sigma, dtype=float)
        if not (self.chi.shape == self.value.shape == self.sigma.shape) or self.chi.ndim != 1:
            raise ValueError("chi, value and sigma must be equal-length 1-d sequences")
        if np.any(self.sigma <= 0):
            raise ValueError("all sigma must be positive")

    def __len__(self) -> int:
        return self.chi.size

    def equals(self, other: "Interferogram") -> bool:
        return (
            np.array_equal(self.chi, other.chi)
            and np.array_equal(self.value, other.value)
            and np.array_equal(self.sigma, other.sigma)
            and self.meta == other.meta
        )

    def scaled(self, factor: float) -> "Interferogram":
        return Interferogram(self.chi, self.value * factor, self.sigma * factor, dict(self.meta))


# ------------------------------------------------------------ state building


def prep_flip(kind: m.Kind, j: int, leak: float) -> np.ndarray:
    """Preparation flip in path ``j`` with flip angle ``pi - leak``.

    Phase convention: the ideal flip acts as the bare Pauli flip, so that the
    perfect preparation reproduces the canonical preselected state.
    """
    proj = m.path_projector(j)
    local = 1j * math.sin(leak / 2) * np.eye(m.DIM) + math.cos(leak / 2) * m.flip_operator(kind)
    return np.eye(m.DIM) - proj + local @ proj


def prepared_state(imp: ImperfectionModel, detune: float = 0.0) -> np.ndarray:
    psi = m.unprepared_state()
    psi = prep_flip(m.Kind.DC, 0, imp.prep_leak_angle) @ psi
    psi = prep_flip(m.Kind.RF, 2, imp.prep_leak_angle + detune) @ psi
    return psi


def empty_state(loop: str) -> np.ndarray:
    """Unflipped beam with only the two sub-beams of ``loop`` open."""
    psi = np.zeros(m.DIM, dtype=complex)
    for j in LOOP_PATHS[loop]:
        psi[m.index(j, m.SPIN_UP, m.E0)] = 1.0 / math.sqrt(3.0)
    return psi


def swept_selection(base: m.Selection, path: int, chi: float) -> m.Selection:
    half = chi / 2
    if path == 0:
        return replace(base, chi1=base.chi1 + half)
    if path == 2:
        return replace(base, chi2=base.chi2 + half)
    return replace(base, chi1=base.chi1 + half, chi2=base.chi2 + half)


def scenario_state(sc: Scenario, cfg: ExperimentConfig) -> np.ndarray:
    imp = cfg.imperfections
    if sc.kind is ScenarioKind.EMPTY:
        return empty_state(sc.loop)
    if sc.kind is ScenarioKind.ADJUST_SCAN:
        return prepared_state(imp, sc.detune)
    psi = prepared_state(imp)
    if sc.kind is ScenarioKind.WEAK:
        x = sc.interaction
        if x.kind in (m.Kind.DC, m.Kind.RF):
            x = replace(x, strength=x.strength * imp.efficiency_rot)
        psi = m.interaction_operator(x) @ psi
    return psi


def _coherence(imp: ImperfectionModel):
    c = imp.coherence_matrix()
    if all(v == 1.0 for row in c for v in row):
        return None
    return c


def expected_sigma(intensity: np.ndarray, counting: CountingModel) -> np.ndarray:
    """Poisson standard deviation of the expected counts, in intensity units."""
    scale = m.BASELINE / counting.mean_counts_baseline
    lam = np.asarray(intensity) / scale
    return np.sqrt(np.maximum(lam, 1.0)) * scale


def sweep_ideal(sc: Scenario, sel_base: m.Selection, cfg: ExperimentConfig) -> Interferogram:
    """Expected intensity at each phase setting (no counting noise)."""
    psi = scenario_state(sc, cfg)
    coh = _coherence(cfg.imperfections)
    chi = np.array(sc.chi_grid, dtype=float)
    values = np.array(
        [m.postselected_intensity(psi, swept_selection(sel_base, sc.sweep_path, c), coh) for c in chi]
    )
    # rounding noise must not produce tiny negative intensities
    values = np.maximum(values, 0.0)
    meta = {
        "scenario": sc.scenario_id,
        "sweep_path": m.PATH_NAMES[sc.sweep_path],
        "kind": "expected",
        "config_hash": cfg.digest(),
    }
    return Interferogram(chi, values, expected_sigma(values, cfg.counting), meta)


# ------------------------------------------------------------------- noise


def stream_key(seed: int, scenario_id: str) -> int:
    h = hashlib.sha256(f"{seed}\x00{scenario_id}".encode()).digest()
    return int.from_bytes(h[:16], "little")


def point_generator(seed: int, scenario_id: str, point: int) -> np.random.Generator:
    """Counter-based stream for one sample point; independent of call order."""
    bitgen = np.random.Philox(key=stream_key(seed, scenario_id), counter=[0, 0, point, 0])
    return np.random.Generator(bitgen)


def poissonize(ifg: Interferogram, counting: CountingModel, scenario_id: str | None = None) -> Interferogram:
    """Replace expected intensities by Poisson counts.

    The expected count at intensity 1/9 is ``counting.mean_counts_baseline``.
    Point ``k`` is drawn from a stream keyed by ``(seed, scenario id, k)``.
    """
    sid = scenario_id or ifg.meta.get("scenario", "")
    lam = ifg.value / m.BASELINE * counting.mean_counts_baseline
    counts = np.zeros(lam.size)
    for k, mu in enumerate(lam):
        if mu > 0:
            counts[k] = point_generator(counting.seed, sid, k).poisson(mu)
    meta = dict(ifg.meta, kind="counts", seed=str(counting.seed))
    return Interferogram(ifg.chi.copy(), counts, np.sqrt(np.maximum(counts, 1.0)), meta)


# ---------------------------------------------------------------- scenarios


def adjustment_scan(currents, i_flip: float, k: float, floor: float, c_max: float = 0.57):
    """Prep contrast versus flipper current: ``max(floor, c_max |sin(k (I - I_flip))|)``."""
    currents = list(currents)
    if not currents:
        raise ValueError("need at least one current")
    return [(float(i), max(floor, c_max * abs(math.sin(k * (i - i_flip))))) for i in currents]


@dataclass
class MeasurementSet:
    """Paired prep (off) / weak (on) interferograms plus the empty references."""

    pairs: dict  # (Kind, path) -> (prep Interferogram, weak Interferogram)
    empty: dict  # loop -> Interferogram
    config: ExperimentConfig
    noisy: bool


def weak_scenario(kind: m.Kind, j: int, cfg: ExperimentConfig) -> Scenario:
    strength = cfg.absorption if kind is m.Kind.ABSORBER else cfg.alpha_rot
    return Scenario(
        ScenarioKind.WEAK, j, tuple(cfg.chi_grid()), m.Interaction(kind, j, strength),
        label=f"pair:{kind.value}:{m.PATH_NAMES[j]}:on",
    )


def prep_scenario(kind: m.Kind, j: int, cfg: ExperimentConfig) -> Scenario:
    return Scenario(ScenarioKind.PREP, j, tuple(cfg.chi_grid()), label=f"pair:{kind.value}:{m.PATH_NAMES[j]}:off")


def empty_scenario(loop: str, cfg: ExperimentConfig) -> Scenario:
    return Scenario(ScenarioKind.EMPTY, LOOP_SWEEP[loop], tuple(cfg.chi_grid()), loop=loop, label=f"empty:{loop}")


def run_measurement_set(cfg: ExperimentConfig, noise: bool = True, sel_base: m.Selection | None = None) -> MeasurementSet:
    """The nine on/off pairs (weak interaction in path j, phase swept in path j)
    and the three empty-interferometer references."""
    sel_base = sel_base or m.Selection()

    def make(sc: Scenario) -> Interferogram:
        ifg = sweep_ideal(sc, sel_base, cfg)
        return poissonize(ifg, cfg.counting, sc.scenario_id) if noise else ifg

    pairs = {}
    for kind in CELL_KINDS:
        for j in range(m.N_PATHS):
            pairs[(kind, j)] = (make(prep_scenario(kind, j, cfg)), make(weak_scenario(kind, j, cfg)))
    empty = {loop: make(empty_scenario(loop, cfg)) for loop in LOOPS}
    return MeasurementSet(pairs=pairs, empty=empty, config=cfg, noisy=noise)
