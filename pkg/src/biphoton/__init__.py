"""Biphoton simulation of the single-slit ghost-imaging experiments."""

from .core import (
    ConfigError,
    DegenerateScan,
    Distribution1D,
    ExperimentConfig,
    JointDensity2D,
    NonPositiveLength,
    ScanSpec,
    TransverseGrid,
    UncertaintyReport,
    ValidatedConfig,
    validate_config,
)
from .presets import PRESETS, get_preset

__all__ = [
    "ConfigError",
    "DegenerateScan",
    "Distribution1D",
    "ExperimentConfig",
    "JointDensity2D",
    "NonPositiveLength",
    "PRESETS",
    "ScanSpec",
    "TransverseGrid",
    "UncertaintyReport",
    "ValidatedConfig",
    "get_preset",
    "validate_config",
]
