"""Experiment and run configuration, serialisable to and from JSON."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

LOOPS = ("front", "rear", "outer")
LOOP_PATHS = {"front": (0, 1), "rear": (1, 2), "outer": (0, 2)}
# path (0-based) whose swept phase the loop responds to
LOOP_SWEEP = {"front": 0, "rear": 2, "outer": 0}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ImperfectionModel:
    """Apparatus imperfections.

    contrast_empty
        Coherence of each two-beam loop; multiplies the corresponding
        interference cross term.
    prep_leak_angle
        Under-rotation of both preparation flips (flip angle pi - eps).
    efficiency_rot
        Fraction of the nominal weak rotation angle actually applied.
    """

    contrast_front: float = 0.57
    contrast_rear: float = 0.50
    contrast_outer: float = 0.53
    prep_leak_angle: float = 0.04
    efficiency_rot: float = 1.0

    def __post_init__(self):
        for name in ("contrast_front", "contrast_rear", "contrast_outer", "efficiency_rot"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 <= self.prep_leak_angle <= math.pi / 4:
            raise ConfigError(f"prep_leak_angle must lie in [0, pi/4], got {self.prep_leak_angle}")

    @classmethod
    def ideal(cls) -> "ImperfectionModel":
        return cls(1.0, 1.0, 1.0, 0.0, 1.0)

    def contrast(self, loop: str) -> float:
        if loop not in LOOPS:
            raise ConfigError(f"unknown loop {loop!r}")
        return getattr(self, f"contrast_{loop}")

    def coherence_matrix(self):
        f, r, o = self.contrast_front, self.contrast_rear, self.contrast_outer
        return ((1.0, f, o), (f, 1.0, r), (o, r, 1.0))


@dataclass(frozen=True)
class CountingModel:
    mean_counts_baseline: float = 4000.0
    seed: int = 0

    def __post_init__(self):
        if self.mean_counts_baseline < 1:
            raise ConfigError(f"mean_counts_baseline must be >= 1, got {self.mean_counts_baseline}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class ExperimentConfig:
    n_paths: int = 3
    alpha_rot: float = math.pi / 9
    alpha_err: float = 0.0
    absorption: float = 0.1
    absorption_err: float = 0.01
    n_points: int = 16
    chi_span: float = 4 * math.pi
    imperfections: ImperfectionModel = field(default_factory=ImperfectionModel)
    counting: CountingModel = field(default_factory=CountingModel)
    # loop whose fitted empty contrast normalises the signal of each swept path
    c_empty_loop: tuple[str, str, str] = ("front", "outer", "rear")

    def __post_init__(self):
        if self.n_paths != 3:
            raise ConfigError("interferogram synthesis supports the three-path setup only")
        if not 0.0 < self.alpha_rot < 2 * math.pi:
            raise ConfigError(f"alpha_rot must lie in (0, 2pi), got {self.alpha_rot}")
        if not 0.0 < self.absorption <= 1.0:
            raise ConfigError(f"absorption must lie in (0, 1], got {self.absorption}")
        if self.alpha_err < 0 or self.absorption_err < 0:
            raise ConfigError("uncertainties must be non-negative")
        if self.n_points < 5:
            raise ConfigError(f"n_points must be >= 5, got {self.n_points}")
        if not self.chi_span > 0:
            raise ConfigError("chi_span must be positive")
        if len(self.c_empty_loop) != 3 or any(l not in LOOPS for l in self.c_empty_loop):
            raise ConfigError(f"c_empty_loop must name three loops out of {LOOPS}")

    @classmethod
    def ideal(cls, **kw) -> "ExperimentConfig":
        return cls(imperfections=ImperfectionModel.ideal(), **kw)

    def chi_grid(self):
        step = self.chi_span / self.n_points
        return [k * step for k in range(self.n_points)]

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return replace(self, counting=replace(self.counting, seed=seed))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["c_empty_loop"] = list(self.c_empty_loop)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            if "imperfections" in d:
                d["imperfections"] = ImperfectionModel(**d["imperfections"])
            if "counting" in d:
                d["counting"] = CountingModel(**d["counting"])
            if "c_empty_loop" in d:
                d["c_empty_loop"] = tuple(d["c_empty_loop"])
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    output_dir: str = "out"
    format: str = "csv"

    def __post_init__(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")

    def to_json(self) -> str:
        d = {"experiment": self.experiment.to_dict(), "output_dir": self.output_dir, "format": self.format}
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - {"experiment", "output_dir", "format"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        exp = ExperimentConfig.from_dict(d.get("experiment", {}))
        return cls(experiment=exp, output_dir=d.get("output_dir", "out"), format=d.get("format", "csv"))

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))
