"""Closed-form biphoton amplitudes, densities and counting rates.

Every function accepts scalars or numpy arrays and broadcasts. Outputs are
unnormalized; normalization happens in :mod:`biphoton.experiments`.
Removable singularities of ``sin(kx)/x`` shapes are evaluated by Taylor series
below fixed thresholds so the functions are smooth through zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ExperimentConfig, ValidatedConfig

MOMENTUM_SERIES_THRESHOLD = 1e-6  # rad/mm, on p_L + p_R
POSITION_SERIES_THRESHOLD = 1e-4  # mm, distance from the line y_R = -(z2/z1) y_L
RATE_SERIES_THRESHOLD = 0.1  # dimensionless t in (t - sin t)

# Candidates for the argument constant c in t = c * y_R, in units of pi d / (lambda z2).
# 1 is the printed form, 2 follows from the sinc^2 autocorrelation.
RATE_ARGUMENT_FACTORS = (1.0, 2.0)


def _out(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def sin_ratio(x, k: float, threshold: float):
    """``sin(k x) / x``, using ``k - k^3 x^2 / 6`` where ``|x| < threshold``."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < threshold
    safe = np.where(small, 1.0, x)
    direct = np.sin(k * safe) / safe
    series = k - k**3 * x * x / 6.0
    return np.where(small, series, direct)


@dataclass(frozen=True)
class SincSquaredParams:
    """``amplitude_scale * sin^2(argument_scale x) / x^2``."""

    amplitude_scale: float
    argument_scale: float
    threshold: float = MOMENTUM_SERIES_THRESHOLD

    def __post_init__(self):
        if not self.argument_scale > 0:
            raise ValueError("argument_scale must be positive")

    def __call__(self, x):
        return _out(self.amplitude_scale * sin_ratio(x, self.argument_scale, self.threshold) ** 2)

    @property
    def peak(self) -> float:
        return self.amplitude_scale * self.argument_scale**2

    @property
    def first_zero(self) -> float:
        return math.pi / self.argument_scale


def box_transmission(y, d: float):
    """Slit of width ``d`` centred on 0; edges count as open."""
    if not d > 0:
        raise ValueError("slit width must be positive")
    return _out(np.where(np.abs(np.asarray(y, dtype=float)) <= d / 2, 1.0, 0.0))


def biphoton_position_amplitude(y_R, y_L, a: float):
    if not a > 0:
        raise ValueError("a must be positive")
    dy = np.asarray(y_L, dtype=float) - np.asarray(y_R, dtype=float)
    return _out(np.exp(-(dy**2) / (4 * a * a)))


def post_slit_momentum_amplitude(p_R, p_L, a: float, d: float):
    p_R = np.asarray(p_R, dtype=float)
    s = p_R + np.asarray(p_L, dtype=float)
    return _out(np.exp(-(p_R**2) * a * a) * sin_ratio(s, d / 2, MOMENTUM_SERIES_THRESHOLD))


def joint_momentum_density(p_R, p_L, a: float, d: float):
    amp = np.asarray(post_slit_momentum_amplitude(p_R, p_L, a, d))
    return _out(amp * amp)


def marginal_left_density(p_L, d: float):
    return _out(sin_ratio(p_L, d / 2, MOMENTUM_SERIES_THRESHOLD) ** 2)


def marginal_right_density(p_R, a: float):
    p_R = np.asarray(p_R, dtype=float)
    return _out(np.exp(-2 * p_R**2 * a * a))


def inferred_momentum(y, z: float, wavelength: float):
    """Transverse momentum for a detector at ``y`` a distance ``z`` from the real slit."""
    return _out(2 * np.pi * np.asarray(y, dtype=float) / (wavelength * z))


def right_gaussian(y_R, cfg: ExperimentConfig | ValidatedConfig, exponent_sign: float = -1.0):
    """Source envelope on the right detector plane, ``exp(-2 a^2 p_R^2)``.

    ``exponent_sign=+1`` gives the growing-exponent variant; it exists only so
    the validator can be shown to reject it.
    """
    y_R = np.asarray(y_R, dtype=float)
    k = 8 * np.pi**2 * cfg.correlation_a**2 / (cfg.wavelength**2 * cfg.z2**2)
    return _out(np.exp(exponent_sign * k * y_R**2))


def joint_position_amplitude(y_R, y_L, cfg, drop_gaussian: bool = False):
    """Signed square root of :func:`joint_position_density`."""
    y_R = np.asarray(y_R, dtype=float)
    x = np.asarray(y_L, dtype=float) / cfg.z1 + y_R / cfg.z2
    k = np.pi * cfg.slit_width / cfg.wavelength
    amp = sin_ratio(x, k, POSITION_SERIES_THRESHOLD / cfg.z2)
    if not drop_gaussian:
        amp = amp * np.sqrt(right_gaussian(y_R, cfg))
    return _out(amp)


def joint_position_density(y_R, y_L, cfg, drop_gaussian: bool = False):
    """Coincidence density for detectors at ``y_L`` (left) and ``y_R`` (right).

    The Gaussian source envelope is kept unless ``drop_gaussian`` is set.
    """
    amp = np.asarray(joint_position_amplitude(y_R, y_L, cfg, drop_gaussian))
    return _out(amp * amp)


def single_slit_density(y, z: float, d: float, wavelength: float):
    return marginal_left_density(inferred_momentum(y, z, wavelength), d)


def left_weight(y_L, cfg):
    """Single-slit weighting of left-photon positions when all are collected."""
    k = np.pi * cfg.slit_width / cfg.wavelength
    x = np.asarray(y_L, dtype=float) / cfg.z1
    return _out(sin_ratio(x, k, POSITION_SERIES_THRESHOLD / cfg.z1) ** 2)


def rate_argument_constant(cfg, argument_factor: float) -> float:
    return argument_factor * np.pi * cfg.slit_width / (cfg.wavelength * cfg.z2)


def t_minus_sin_ratio(y, c: float, threshold: float = RATE_SERIES_THRESHOLD):
    """(t - sin t) / y^3 with t = c y; a 5-term series below ``|t| < threshold``."""
    y = np.asarray(y, dtype=float)
    t = c * y
    small = np.abs(t) < threshold
    safe = np.where(small, 1.0, y)
    ts = c * safe
    direct = (ts - np.sin(ts)) / safe**3
    t2 = t * t
    series = c**3 * (1 / 6 - t2 * (1 / 120 - t2 * (1 / 5040 - t2 * (1 / 362880 - t2 / 39916800))))
    return np.where(small, series, direct)


def kim_shih_rate(
    y_R,
    cfg,
    *,
    argument_factor: float = 2.0,
    scale: float = 1.0,
    exponent_sign: float = -1.0,
):
    """Coincidence rate with every photon through the slit collected.

    ``scale * G(y_R) * (t - sin t) / y_R^3`` with ``t = argument_factor *
    pi d y_R / (lambda z2)``. Which ``argument_factor`` is right, and the
    scale, are fixed against quadrature by
    :func:`biphoton.oracle.calibrate_kim_shih`.
    """
    c = rate_argument_constant(cfg, argument_factor)
    shape = t_minus_sin_ratio(y_R, c)
    return _out(scale * np.asarray(right_gaussian(y_R, cfg, exponent_sign)) * shape)


def kim_shih_rate_scale(cfg) -> float:
    """Prefactor making the argument_factor=2 closed form equal the y_L integral exactly."""
    return 0.5 * np.pi * cfg.z1 * cfg.z2**3
