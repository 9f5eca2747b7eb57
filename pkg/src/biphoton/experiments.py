"""Scenario drivers: single-slit reference, Strekalov coincidence scans and the
Kim-Shih collected-rate scan, plus the width/uncertainty metrics and the
no-signaling check.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from . import analytic, oracle
from .core import Distribution1D, NonNormalized, UncertaintyReport, validate_config

SCENARIOS = ("single_slit", "strekalov", "kim_shih")
MODES = ("closed_form", "numeric")


class CalibrationFailed(RuntimeError):
    pass


@dataclass(frozen=True)
class ScanResult:
    scenario: str
    distribution: Distribution1D
    metrics: UncertaintyReport
    provenance: Mapping

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if not self.distribution.normalized:
            raise NonNormalized("scan results carry normalized distributions")
        object.__setattr__(self, "provenance", MappingProxyType(dict(self.provenance)))

    @property
    def y(self) -> np.ndarray:
        return self.distribution.grid.samples

    @property
    def label(self) -> str:
        return self.provenance.get("label", self.scenario)


def _provenance(cfg, **extra):
    c = cfg.config
    base = {
        "preset": c.name,
        "wavelength_mm": c.wavelength,
        "slit_width_mm": c.slit_width,
        "correlation_a_mm": c.correlation_a,
        "z1_mm": c.z1,
        "z2_mm": c.z2,
        "left_detector_y_mm": c.left_detector_y,
        "scan": asdict(c.scan),
        "normalization_window_mm": (c.scan.y_min, c.scan.y_max),
    }
    base.update(extra)
    return base


def _peak(y, v):
    i = int(np.argmax(v))
    if 0 < i < len(v) - 1:
        denom = v[i - 1] - 2 * v[i] + v[i + 1]
        if denom < 0:
            shift = 0.5 * (v[i - 1] - v[i + 1]) / denom
            return float(y[i] + shift * (y[1] - y[0])), i
    return float(y[i]), i


def fwhm(y, v) -> float:
    """Full width at half maximum around the highest sample, by linear interpolation.

    Returns nan if the curve does not drop below half maximum inside the window.
    """
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    i = int(np.argmax(v))
    half = 0.5 * v[i]
    left = i
    while left > 0 and v[left] > half:
        left -= 1
    right = i
    while right < len(v) - 1 and v[right] > half:
        right += 1
    if v[left] > half or v[right] > half:
        return math.nan

    def cross(j, k):
        return y[j] + (half - v[j]) * (y[k] - y[j]) / (v[k] - v[j])

    return float(cross(right - 1, right) - cross(left + 1, left))


def momentum_std(dist: Distribution1D, plane_distance: float, wavelength: float) -> float:
    y = dist.grid.samples
    p = np.asarray(analytic.inferred_momentum(y, plane_distance, wavelength))
    w = dist.values
    mean = np.trapezoid(w * p, y)
    var = np.trapezoid(w * (p - mean) ** 2, y)
    return float(math.sqrt(max(var, 0.0)))


def compute_uncertainty_report(dist: Distribution1D, cfg, plane_distance: float) -> UncertaintyReport:
    """Position/momentum uncertainty of a detector-plane distribution.

    The momentum spread maps the distribution through the inferred momentum at
    ``plane_distance``. The position uncertainty is the slit half-width d/2,
    i.e. the localization a ghost slit of the real slit's width would imply.
    """
    if not dist.normalized:
        raise NonNormalized("compute_uncertainty_report needs a normalized distribution")
    cfg = validate_config(cfg)
    delta_p = momentum_std(dist, plane_distance, cfg.wavelength)
    delta_y = cfg.slit_width / 2
    peak, _ = _peak(dist.grid.samples, dist.values)
    return UncertaintyReport(
        delta_y=delta_y,
        delta_p=delta_p,
        product_hbar=delta_y * delta_p,
        peak_location=peak,
        fwhm=fwhm(dist.grid.samples, dist.values),
    )


def _result(scenario, cfg, raw, plane_distance, **extra):
    dist = Distribution1D(cfg.grid, raw).normalize()
    metrics = compute_uncertainty_report(dist, cfg, plane_distance)
    prov = _provenance(cfg, normalization=dist.scale, plane_distance_mm=plane_distance, **extra)
    return ScanResult(scenario, dist, metrics, prov)


def run_single_slit(cfg, z: float | None = None) -> ScanResult:
    """Single-slit diffraction pattern of the real slit at distance ``z`` (default z2)."""
    cfg = validate_config(cfg)
    z = cfg.z2 if z is None else z
    raw = analytic.single_slit_density(cfg.grid.samples, z, cfg.slit_width, cfg.wavelength)
    return _result("single_slit", cfg, raw, z, mode="closed_form", label=f"single slit (z = {z:g} mm)")


def run_strekalov_scan(cfg, drop_gaussian: bool = False, left_detector_y: float | None = None) -> ScanResult:
    cfg = validate_config(cfg)
    y_L = cfg.left_detector_y if left_detector_y is None else left_detector_y
    raw = analytic.joint_position_density(cfg.grid.samples, y_L, cfg, drop_gaussian=drop_gaussian)
    label = f"strekalov (y_L = {y_L:g} mm{', no envelope' if drop_gaussian else ''})"
    return _result(
        "strekalov",
        cfg,
        raw,
        cfg.z2,
        mode="closed_form",
        drop_gaussian=drop_gaussian,
        scan_left_detector_y_mm=y_L,
        label=label,
    )


def closed_form_rate(cfg, spec=oracle.QuadratureSpec(), exponent_sign=-1.0):
    """Closed-form counting-rate callable, calibrated against quadrature."""
    cfg = validate_config(cfg)
    cal = oracle.calibrate_kim_shih(cfg, spec, exponent_sign=exponent_sign)
    if not cal.matched:
        raise CalibrationFailed(
            f"no argument constant matches quadrature (deviations {cal.deviations})"
        )

    def rate(y):
        return analytic.kim_shih_rate(
            y, cfg, argument_factor=cal.argument_factor, scale=cal.scale, exponent_sign=exponent_sign
        )

    return rate, cal


def kim_shih_numeric_scan(cfg, spec=oracle.QuadratureSpec()) -> np.ndarray:
    cfg = validate_config(cfg)
    # the rate is even in y_R, so each |y_R| is integrated once
    mags, inverse = np.unique(np.abs(cfg.grid.samples), return_inverse=True)
    values = np.array([oracle.kim_shih_rate_numeric(y, cfg, spec) for y in mags])
    return values[inverse]


def run_kim_shih_scan(cfg, mode: str = "closed_form", spec=oracle.QuadratureSpec()) -> ScanResult:
    cfg = validate_config(cfg)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    rate, cal = closed_form_rate(cfg, spec)
    if mode == "closed_form":
        raw = rate(cfg.grid.samples)
    else:
        raw = kim_shih_numeric_scan(cfg, spec)
    return _result(
        "kim_shih",
        cfg,
        raw,
        cfg.z2,
        mode=mode,
        argument_constant=cal.label,
        calibration_scale=cal.scale,
        calibration_deviation=cal.max_deviation,
        label=f"kim-shih (a = {cfg.correlation_a:.4g} mm, {mode})",
    )


def beam_width_limit_study(cfg, a_values, mode: str = "closed_form") -> list[ScanResult]:
    """Kim-Shih scans for each packet parameter in ``a_values`` (input order)."""
    cfg = validate_config(cfg)
    if not a_values or any(not a > 0 for a in a_values):
        raise ValueError("a_values must be a non-empty list of positive lengths")
    return [run_kim_shih_scan(cfg.config.with_(correlation_a=float(a)), mode) for a in a_values]


def right_marginal(cfg, slit_width=None, *, p_points=121, window_scale=1.0, pl_half_width=1e5):
    """Normalized numeric marginal over p_L of the joint momentum density.

    The p_R window is ten source standard deviations, ``5 / a``, times
    ``window_scale``. The p_L sum runs over +-``pl_half_width`` with a step
    below the Nyquist spacing of the sinc^2 factor, so the trapezoid sum is
    exact apart from the truncated tails.
    """
    cfg = validate_config(cfg)
    d = cfg.slit_width if slit_width is None else slit_width
    a = cfg.correlation_a
    half = window_scale * 5.0 / a
    p_R = np.linspace(-half, half, p_points)
    step = min(8.0, math.pi / d)
    n = int(round(pl_half_width / step))
    p_L = step * np.arange(-n, n + 1)
    joint = oracle.sample_joint_momentum(p_L, p_R, a, d)
    return oracle.numeric_marginal(joint, "left")


def _max_rel(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def marginal_right_deviation(cfg, **kwargs) -> float:
    """Max relative deviation of the numeric right marginal from the source Gaussian."""
    cfg = validate_config(cfg)
    m = right_marginal(cfg, **kwargs)
    g = Distribution1D(m.grid, analytic.marginal_right_density(m.grid.samples, cfg.correlation_a)).normalize()
    return _max_rel(m.values, g.values)


def no_signaling_check(cfg, d_alt: float, **kwargs) -> float:
    """Max relative deviation between right marginals for slit widths d and ``d_alt``."""
    cfg = validate_config(cfg)
    if not d_alt > 0:
        raise ValueError("d_alt must be positive")
    m1 = right_marginal(cfg, **kwargs)
    if d_alt == cfg.slit_width:
        return 0.0
    m2 = right_marginal(cfg, d_alt, **kwargs)
    return _max_rel(m2.values, m1.values)
