"""Simulation and weak-value analysis of N-path quantum Cheshire Cat interferometry."""

from .config import CountingModel, ExperimentConfig, ImperfectionModel, RunConfig
from .model import Interaction, Kind, OperatorTag, Selection, TagKind

__version__ = "0.1.0"

__all__ = [
    "CountingModel",
    "ExperimentConfig",
    "ImperfectionModel",
    "RunConfig",
    "Interaction",
    "Kind",
    "OperatorTag",
    "Selection",
    "TagKind",
]
