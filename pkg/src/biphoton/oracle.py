"""Brute-force numerical counterparts of the closed forms.

The quadratures never call into :mod:`biphoton.analytic`; integrands are
written out again from their definitions so the two routes stay independent.
Only :func:`calibrate_kim_shih` touches the closed form, to compare against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import (
    CoordinateKind,
    Distribution1D,
    Domain,
    JointDensity2D,
    TransverseGrid,
    validate_config,
)

RATE_ENVELOPE_FLOOR = 1e-12


class NoConvergence(ArithmeticError):
    """Subdivision budget exhausted; ``estimate`` holds the best value found."""

    def __init__(self, estimate: float, error: float, levels: int):
        self.estimate = estimate
        self.error = error
        self.levels = levels
        super().__init__(
            f"adaptive Simpson did not converge in {levels} levels "
            f"(estimate {estimate!r}, error ~{error:.3g})"
        )


class TruncationTooTight(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    relative_tolerance: float = 1e-8
    max_subdivisions: int = 30
    truncation_sigma: float = 10.0

    def __post_init__(self):
        if not self.relative_tolerance > 0:
            raise ValueError("relative_tolerance must be positive")
        if self.max_subdivisions < 4:
            raise ValueError("max_subdivisions must be at least 4")


def integrate_adaptive(f, lo, hi, spec=QuadratureSpec(), *, panels=1, abs_tol=0.0, min_levels=2):
    """Adaptive composite Simpson quadrature of a vectorized ``f`` over [lo, hi].

    All intervals at one refinement level are evaluated in a single call to
    ``f``. An interval is accepted once its two-half Simpson estimate agrees
    with the whole-interval estimate to within its share of
    ``max(relative_tolerance * |I|, abs_tol)``; accepted pieces get the (S2 - S1)/15
    extrapolation correction. ``panels`` seeds the refinement with that many
    equal intervals, which helps with oscillatory integrands.

    Raises
    ------
    NoConvergence
        If intervals remain unresolved after ``spec.max_subdivisions`` levels.
    """
    lo, hi = float(lo), float(hi)
    if hi == lo:
        return 0.0
    if hi < lo:
        return -integrate_adaptive(f, hi, lo, spec, panels=panels, abs_tol=abs_tol, min_levels=min_levels)
    span = hi - lo
    edges = np.linspace(lo, hi, int(panels) + 1)
    a, b = edges[:-1], edges[1:]
    m = 0.5 * (a + b)
    n = a.size
    vals = np.asarray(f(np.concatenate([a, m, b[-1:]])), dtype=float)
    fa, fm = vals[:n], vals[n : 2 * n]
    fb = np.append(fa[1:], vals[-1])
    whole = (b - a) / 6 * (fa + 4 * fm + fb)

    accepted = 0.0
    error = 0.0
    tol = None
    for level in range(1, spec.max_subdivisions + 1):
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        k = a.size
        vals = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        flm, frm = vals[:k], vals[k:]
        left = (m - a) / 6 * (fa + 4 * flm + fm)
        right = (b - m) / 6 * (fm + 4 * frm + fb)
        delta = left + right - whole
        if level < min_levels:
            ok = np.zeros(a.size, dtype=bool)
        else:
            if tol is None:
                # fixed once, so a tighter tolerance refines the same partition
                tol = max(spec.relative_tolerance * abs(math.fsum(left + right)), abs_tol)
            ok = np.abs(delta) <= 15 * tol * (b - a) / span
        if ok.any():
            accepted += math.fsum(left[ok] + right[ok] + delta[ok] / 15)
            error += float(np.sum(np.abs(delta[ok]))) / 15
        todo = ~ok
        if not todo.any():
            return accepted
        a, m, b = a[todo], m[todo], b[todo]
        fa, fm, fb = fa[todo], fm[todo], fb[todo]
        lm, rm, flm, frm = lm[todo], rm[todo], flm[todo], frm[todo]
        left, right = left[todo], right[todo]
        # split every unresolved interval into its two halves
        a, m, b = np.concatenate([a, m]), np.concatenate([lm, rm]), np.concatenate([m, b])
        fa, fm, fb = np.concatenate([fa, fm]), np.concatenate([flm, frm]), np.concatenate([fm, fb])
        whole = np.concatenate([left, right])
    remaining = math.fsum(whole)
    raise NoConvergence(accepted + remaining, error + float(np.sum(np.abs(whole))), spec.max_subdivisions)


def _sinc_ratio_sq(x, k):
    # sin^2(k x) / x^2 via numpy's normalized sinc, which is exact at 0
    return (k * np.sinc(k * np.asarray(x, dtype=float) / np.pi)) ** 2


def numeric_post_slit_amplitude(p_R, p_L, cfg, spec=QuadratureSpec()):
    """Direct evaluation of the slit-masked double Fourier integral.

    The inner y_R integral of the Gaussian biphoton amplitude against
    ``exp(i y_R p_R)`` is a trapezoid sum over ``y_L +- truncation_sigma *
    sqrt(2) a``; the outer y_L integral over the slit is adaptive Simpson.
    Real and imaginary parts are carried separately. The result is the signed
    modulus, which is real up to quadrature noise, and carries the overall
    factor ``4 a sqrt(pi)`` relative to the closed form.
    """
    cfg = validate_config(cfg)
    a, d = cfg.correlation_a, cfg.slit_width
    half_window = spec.truncation_sigma * math.sqrt(2.0) * a
    # spacing keeps the aliased copy of exp(-a^2 p^2) below exp(-1600)
    h = 2 * math.pi / (abs(p_R) + 40.0 / a)
    n = 2 * int(math.ceil(half_window / h)) + 1
    v = np.linspace(-half_window, half_window, n)
    w = np.full(n, v[1] - v[0])
    w[0] = w[-1] = 0.5 * (v[1] - v[0])
    psi = np.exp(-(v**2) / (4 * a * a)) * w

    def inner(y_L, part):
        y_L = np.asarray(y_L, dtype=float)[:, None]
        phase = y_L * p_L + (y_L + v[None, :]) * p_R
        trig = np.cos(phase) if part == "re" else np.sin(phase)
        return trig @ psi

    origin_scale = 4 * a * math.sqrt(math.pi) * d / 2
    abs_tol = 1e-3 * spec.relative_tolerance * origin_scale
    re = integrate_adaptive(lambda y: inner(y, "re"), -d / 2, d / 2, spec, panels=4, abs_tol=abs_tol)
    im = integrate_adaptive(lambda y: inner(y, "im"), -d / 2, d / 2, spec, panels=4, abs_tol=abs_tol)
    return math.copysign(math.hypot(re, im), re)


def sample_joint_momentum(p_L, p_R, a, d) -> JointDensity2D:
    """Sample ``exp(-2 p_R^2 a^2) sin^2(d (p_L + p_R) / 2) / (p_L + p_R)^2``."""
    p_L = np.asarray(p_L, dtype=float)
    p_R = np.asarray(p_R, dtype=float)
    u = p_L[:, None] + p_R[None, :]
    values = np.exp(-2 * a * a * p_R**2)[None, :] * _sinc_ratio_sq(u, d / 2)
    return JointDensity2D(
        TransverseGrid(CoordinateKind.MOMENTUM, p_L),
        TransverseGrid(CoordinateKind.MOMENTUM, p_R),
        values,
        Domain.MOMENTUM,
    )


def numeric_marginal(joint: JointDensity2D, axis: str, boundary_tolerance: float = 1e-7) -> Distribution1D:
    """Trapezoid-integrate ``joint`` over ``axis`` ("left" or "right") and normalize.

    The result lives on the other axis's grid. Raises TruncationTooTight when
    the joint density on either edge of the integrated axis exceeds
    ``boundary_tolerance`` times its peak.
    """
    if axis not in ("left", "right"):
        raise ValueError("axis must be 'left' or 'right'")
    values = joint.values
    peak = float(values.max())
    if axis == "left":
        edges = np.concatenate([values[0, :], values[-1, :]])
        grid, keep = joint.left_grid, joint.right_grid
        marginal = np.trapezoid(values, grid.samples, axis=0)
    else:
        edges = np.concatenate([values[:, 0], values[:, -1]])
        grid, keep = joint.right_grid, joint.left_grid
        marginal = np.trapezoid(values, grid.samples, axis=1)
    worst = float(edges.max()) / peak if peak > 0 else 0.0
    if worst > boundary_tolerance:
        raise TruncationTooTight(
            f"{axis} axis edge value is {worst:.3g} of peak (limit {boundary_tolerance:.3g}); widen the grid"
        )
    return Distribution1D(keep, marginal).normalize()


def _rate_window(cfg, y_R, window_scale=1.0):
    # |u| >= U keeps the integrand envelope 1/(u^2 (u+s)^2) under floor * k^4
    k = math.pi * cfg.slit_width / cfg.wavelength
    s = abs(y_R) / cfg.z2
    U = 0.5 * s + math.sqrt(0.25 * s * s + 1.0 / (k * k * math.sqrt(RATE_ENVELOPE_FLOOR)))
    return window_scale * U, k


def kim_shih_rate_numeric(y_R, cfg, spec=QuadratureSpec(), *, window_scale=1.0):
    """Integrate the single-slit weight times the coincidence density over y_L."""
    cfg = validate_config(cfg)
    y_R = float(y_R)
    U, k = _rate_window(cfg, y_R, window_scale)
    z1, z2 = cfg.z1, cfg.z2
    gauss = math.exp(-8 * math.pi**2 * y_R**2 * cfg.correlation_a**2 / (cfg.wavelength**2 * z2**2))
    if gauss == 0.0:
        return 0.0
    s = y_R / z2

    def integrand(y_L):
        u = y_L / z1
        return _sinc_ratio_sq(u, k) * _sinc_ratio_sq(u + s, k)

    L = U * z1
    panels = int(math.ceil(2 * U * k / math.pi)) + 1
    return gauss * integrate_adaptive(integrand, -L, L, spec, panels=panels)


@dataclass(frozen=True)
class RateCalibration:
    """Which argument constant of the (t - sin t)/y^3 closed form quadrature supports."""

    argument_factor: float
    scale: float
    expected_scale: float
    deviations: dict = field(hash=False)
    tolerance: float = 1e-6
    sample_points: tuple = ()
    exponent_sign: float = -1.0

    @property
    def matched(self) -> bool:
        return self.deviations[self.argument_factor] <= self.tolerance

    @property
    def max_deviation(self) -> float:
        return self.deviations[self.argument_factor]

    @property
    def label(self) -> str:
        return "pi d/(lambda z2)" if self.argument_factor == 1.0 else f"{self.argument_factor:g} pi d/(lambda z2)"


def calibrate_kim_shih(cfg, spec=QuadratureSpec(), *, tolerance=1e-6, points=20, y_max=1.5, exponent_sign=-1.0):
    """Fit the closed-form counting rate against quadrature.

    The scale is fixed by the value at ``y_R = 0``; each candidate argument
    constant is then compared pointwise on ``points`` samples in [0, y_max].
    """
    cfg = validate_config(cfg)
    return _calibrate(cfg, spec, tolerance, points, y_max, exponent_sign)


@lru_cache(maxsize=32)
def _calibrate(cfg, spec, tolerance, points, y_max, exponent_sign):
    from . import analytic

    ys = np.linspace(0.0, y_max, points)
    reference = np.array([kim_shih_rate_numeric(y, cfg, spec) for y in ys])
    deviations = {}
    scales = {}
    for factor in analytic.RATE_ARGUMENT_FACTORS:
        unit = np.asarray(
            analytic.kim_shih_rate(ys, cfg, argument_factor=factor, exponent_sign=exponent_sign)
        )
        scale = reference[0] / unit[0]
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            fitted = scale * unit
            rel = np.abs(fitted - reference) / np.abs(reference)
        # both underflowed to zero: nothing to compare
        rel = np.where((reference == 0) & (fitted == 0), 0.0, rel)
        deviations[factor] = float(np.max(rel)) if np.all(np.isfinite(rel)) else math.inf
        scales[factor] = scale
    best = min(deviations, key=deviations.get)
    return RateCalibration(
        argument_factor=best,
        scale=float(scales[best]),
        expected_scale=float(analytic.kim_shih_rate_scale(cfg)),
        deviations=deviations,
        tolerance=tolerance,
        sample_points=tuple(float(y) for y in ys),
        exponent_sign=exponent_sign,
    )
