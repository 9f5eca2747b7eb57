"""Shared parameter types, grids and sampled-density containers.

Units throughout: lengths in mm, transverse momenta in rad/mm, hbar = 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

FRESNEL_WARNING_THRESHOLD = 0.1
UNIFORMITY_RTOL = 1e-12
NORMALIZATION_RTOL = 1e-9


class ConfigError(ValueError):
    """Raised by :func:`validate_config`; ``errors`` holds every violation found."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


class NonPositiveLength(ValueError):
    def __init__(self, field_name: str, value: float):
        self.field = field_name
        self.value = value
        super().__init__(f"NonPositiveLength({field_name!r}): got {value!r}, must be > 0")


class DegenerateScan(ValueError):
    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(f"DegenerateScan: {reason}")


class NonNormalized(ValueError):
    pass


class CoordinateKind(str, enum.Enum):
    POSITION = "position_mm"
    MOMENTUM = "momentum_rad_per_mm"


class Domain(str, enum.Enum):
    MOMENTUM = "momentum"
    POSITION = "position"


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ScanSpec:
    y_min: float
    y_max: float
    points: int

    @property
    def spacing(self) -> float:
        return (self.y_max - self.y_min) / (self.points - 1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Physical constants of one setup plus the right-detector scan window.

    ``correlation_a`` is the Gaussian packet parameter ``a`` itself; the
    tabulated "beam width" of the presets is its reciprocal.
    """

    wavelength: float
    slit_width: float
    correlation_a: float
    z1: float
    z2: float
    left_detector_y: float = 0.0
    scan: ScanSpec = field(default_factory=lambda: ScanSpec(-10.0, 10.0, 2001))
    name: str = "custom"
    notes: tuple[str, ...] = ()

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    @property
    def fresnel_number(self) -> float:
        return self.slit_width**2 / (self.wavelength * min(self.z1, self.z2))


@dataclass(frozen=True)
class TransverseGrid:
    kind: CoordinateKind
    samples: np.ndarray

    def __post_init__(self):
        s = _frozen_array(self.samples)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("grid needs at least two samples")
        steps = np.diff(s)
        if np.any(steps <= 0):
            raise ValueError("grid samples must be strictly increasing")
        h = (s[-1] - s[0]) / (s.size - 1)
        if np.max(np.abs(steps - h)) > UNIFORMITY_RTOL * max(abs(h), np.max(np.abs(s))):
            raise ValueError("grid spacing is not uniform")
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "kind", CoordinateKind(self.kind))

    @classmethod
    def uniform(cls, lo: float, hi: float, points: int, kind=CoordinateKind.POSITION):
        return cls(kind, np.linspace(lo, hi, points))

    @classmethod
    def from_scan(cls, scan: ScanSpec) -> "TransverseGrid":
        return cls.uniform(scan.y_min, scan.y_max, scan.points, CoordinateKind.POSITION)

    @property
    def spacing(self) -> float:
        return float((self.samples[-1] - self.samples[0]) / (self.samples.size - 1))

    def __len__(self) -> int:
        return self.samples.size

    def __eq__(self, other):
        if not isinstance(other, TransverseGrid):
            return NotImplemented
        return self.kind == other.kind and np.array_equal(self.samples, other.samples)

    __hash__ = None


@dataclass(frozen=True)
class Distribution1D:
    """Non-negative sampled density.

    ``scale`` is the factor the raw samples were divided by; a normalized
    distribution has unit trapezoid integral over its grid.
    """

    grid: TransverseGrid
    values: np.ndarray
    normalized: bool = False
    scale: float = 1.0

    def __post_init__(self):
        v = _frozen_array(self.values)
        if v.shape != self.grid.samples.shape:
            raise ValueError("values do not match the grid")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite and non-negative")
        object.__setattr__(self, "values", v)
        if self.normalized:
            total = self.integral()
            if abs(total - 1.0) > NORMALIZATION_RTOL:
                raise NonNormalized(f"flagged normalized but integrates to {total!r}")

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid.samples))

    def normalize(self) -> "Distribution1D":
        total = self.integral()
        if not total > 0:
            raise NonNormalized("cannot normalize a density with zero mass")
        return Distribution1D(self.grid, self.values / total, True, self.scale * total)

    @property
    def raw_values(self) -> np.ndarray:
        return self.values * self.scale


@dataclass(frozen=True)
class JointDensity2D:
    """Joint density; ``values[i, j]`` is at (left_grid[i], right_grid[j])."""

    left_grid: TransverseGrid
    right_grid: TransverseGrid
    values: np.ndarray
    domain: Domain

    def __post_init__(self):
        v = _frozen_array(self.values)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "domain", Domain(self.domain))
        if v.shape != (len(self.left_grid), len(self.right_grid)):
            raise ValueError("values shape does not match (left, right) grids")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("joint density values must be finite and non-negative")
        want = CoordinateKind.MOMENTUM if self.domain is Domain.MOMENTUM else CoordinateKind.POSITION
        if self.left_grid.kind is not want or self.right_grid.kind is not want:
            raise ValueError(f"grids must be {want.value} for a {self.domain.value} density")


@dataclass(frozen=True)
class UncertaintyReport:
    delta_y: float
    delta_p: float
    product_hbar: float
    peak_location: float
    fwhm: float

    def __post_init__(self):
        if self.delta_y < 0 or self.delta_p < 0:
            raise ValueError("uncertainties must be non-negative")
        if not math.isclose(self.product_hbar, self.delta_y * self.delta_p, rel_tol=1e-12, abs_tol=0.0):
            raise ValueError("product_hbar must equal delta_y * delta_p")


@dataclass(frozen=True)
class ValidatedConfig:
    config: ExperimentConfig
    fresnel_number: float
    grid: TransverseGrid
    warnings: tuple[str, ...] = ()

    def __getattr__(self, name):
        # delegate physical fields so a ValidatedConfig reads like its config
        if name.startswith("__"):
            raise AttributeError(name)
        return getattr(self.config, name)

    def __hash__(self):
        return hash(self.config)

    def __eq__(self, other):
        if not isinstance(other, ValidatedConfig):
            return NotImplemented
        return self.config == other.config


def validate_config(cfg: ExperimentConfig | ValidatedConfig) -> ValidatedConfig:
    """Check every invariant of ``cfg`` and cache derived quantities.

    All violations are collected and raised together as a :class:`ConfigError`.
    A large Fresnel number only produces a warning.
    """
    if isinstance(cfg, ValidatedConfig):
        return cfg
    errors: list[Exception] = []
    for name in ("wavelength", "slit_width", "correlation_a", "z1", "z2"):
        value = getattr(cfg, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            errors.append(NonPositiveLength(name, value))
    scan = cfg.scan
    if scan.points < 3:
        errors.append(DegenerateScan(f"points = {scan.points} < 3"))
    if not scan.y_min < scan.y_max:
        errors.append(DegenerateScan(f"y_min = {scan.y_min} >= y_max = {scan.y_max}"))
    if not math.isfinite(cfg.left_detector_y):
        errors.append(ValueError("left_detector_y must be finite"))
    if errors:
        raise ConfigError(errors)

    warnings = list(cfg.notes)
    fresnel = cfg.fresnel_number
    if fresnel > FRESNEL_WARNING_THRESHOLD:
        warnings.append(
            f"Fresnel number d^2/(lambda*min(z1,z2)) = {fresnel:.4g} exceeds "
            f"{FRESNEL_WARNING_THRESHOLD}; far-field approximation is marginal"
        )
    return ValidatedConfig(cfg, fresnel, TransverseGrid.from_scan(scan), tuple(warnings))
