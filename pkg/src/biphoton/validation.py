"""Oracle-equivalence and invariant checks behind ``biphoton validate``.

Each check returns a :class:`Check`; a check that raises is recorded as a
failure rather than aborting the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import analytic, experiments, oracle
from .core import validate_config


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float = math.nan
    limit: float = math.nan
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        nums = ""
        if not math.isnan(self.value):
            nums = f" value={self.value:.4g}"
            if not math.isnan(self.limit):
                nums += f" limit={self.limit:.4g}"
        return f"[{status}] {self.name}:{nums} {self.detail}".rstrip()


def _check(name, value, limit, detail="", *, below=True):
    ok = value < limit if below else value > limit
    return Check(name, bool(ok), float(value), float(limit), detail)


def first_zero(amplitude, lo, hi, xtol=1e-12):
    """First sign change of ``amplitude`` on (lo, hi], refined with Brent's method."""
    xs = np.linspace(lo, hi, 4001)
    v = np.asarray(amplitude(xs))
    sign = np.sign(v)
    idx = np.nonzero(sign[1:] * sign[:-1] < 0)[0]
    if idx.size == 0:
        raise ValueError("no sign change found")
    i = int(idx[0])
    return brentq(lambda x: float(amplitude(x)), xs[i], xs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps)


def strekalov_first_zero(cfg, z2=None):
    cfg = validate_config(cfg)
    if z2 is not None:
        cfg = validate_config(cfg.config.with_(z2=z2))
    guess = cfg.wavelength * cfg.z2 / cfg.slit_width
    return first_zero(lambda y: analytic.joint_position_amplitude(y, 0.0, cfg), 0.25 * guess, 1.5 * guess)


def momentum_amplitude_deviation(cfg, spec=oracle.QuadratureSpec(), n=10, p_max=20.0):
    """Peak-relative deviation between quadrature and closed form on an n x n grid.

    Both sides are divided by their value at the origin.
    """
    cfg = validate_config(cfg)
    a, d = cfg.correlation_a, cfg.slit_width
    p = np.linspace(-p_max, p_max, n)
    num0 = oracle.numeric_post_slit_amplitude(0.0, 0.0, cfg, spec)
    ana0 = analytic.post_slit_momentum_amplitude(0.0, 0.0, a, d)
    worst = 0.0
    for pr in p:
        for pl in p:
            num = oracle.numeric_post_slit_amplitude(pr, pl, cfg, spec) / num0
            ana = analytic.post_slit_momentum_amplitude(pr, pl, a, d) / ana0
            worst = max(worst, abs(num - ana))
    return worst


def mode_equivalence(cfg, spec=oracle.QuadratureSpec(), exponent_sign=-1.0):
    cfg = validate_config(cfg)
    rate, _ = experiments.closed_form_rate(cfg, spec, exponent_sign)
    closed = np.asarray(rate(cfg.grid.samples))
    numeric = experiments.kim_shih_numeric_scan(cfg, spec)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(closed - numeric) / np.abs(numeric)
    rel = np.where((closed == 0) & (numeric == 0), 0.0, rel)
    return float(np.max(rel))


def analytic_checks(cfg):
    cfg = validate_config(cfg)
    a, d = cfg.correlation_a, cfg.slit_width
    rng = np.random.default_rng(20240601)
    pr = rng.uniform(-20, 20, 100)
    pl = rng.uniform(-60, 60, 100)
    amp = np.asarray(analytic.post_slit_momentum_amplitude(pr, pl, a, d))
    dens = np.asarray(analytic.joint_momentum_density(pr, pl, a, d))
    yield Check("density = amplitude^2", bool(np.array_equal(dens, amp * amp)))

    structure = np.asarray(analytic.marginal_left_density(pl + pr, d)) * np.exp(-2 * pr**2 * a * a)
    yield _check("density depends on p_L only via p_L + p_R", float(np.max(np.abs(dens - structure) / (d * d / 4))), 1e-14)

    envelope = np.exp(-2 * pr**2 * a * a) * d * d / 4
    yield Check("density <= source envelope * d^2/4", bool(np.all(dens <= envelope * (1 + 1e-12))))

    # both branches evaluated at the switch-over point itself
    def branch_gap(fn, x):
        series, direct = float(fn(x, math.inf)), float(fn(x, 0.0))
        return abs(series - direct) / abs(direct)

    thr = analytic.MOMENTUM_SERIES_THRESHOLD
    gap = branch_gap(lambda x, t: analytic.sin_ratio(x, d / 2, t), thr)
    yield _check("momentum series/direct continuity", gap, 1e-10)

    k = math.pi * d / cfg.wavelength
    xthr = analytic.POSITION_SERIES_THRESHOLD / cfg.z2
    gap = branch_gap(lambda x, t: analytic.sin_ratio(x, k, t), xthr)
    yield _check("position series/direct continuity", gap, 1e-10)

    c = analytic.rate_argument_constant(cfg, 2.0)
    gap = branch_gap(lambda y, t: analytic.t_minus_sin_ratio(y, c, t), analytic.RATE_SERIES_THRESHOLD / c)
    yield _check("rate series/direct continuity", gap, 1e-10)

    z0 = strekalov_first_zero(cfg)
    z0_double = strekalov_first_zero(cfg, 2 * cfg.z2)
    yield _check(
        "fringe zero doubles with z2",
        abs(z0_double - 2 * z0),
        1e-9,
        f"zero={z0:.6f} mm, doubled={z0_double:.6f} mm",
    )


def oracle_checks(cfg, tolerance=1e-6, spec=oracle.QuadratureSpec(), exponent_sign=-1.0):
    cfg = validate_config(cfg)
    yield _check("momentum amplitude quadrature vs closed form (10x10)", momentum_amplitude_deviation(cfg, spec), tolerance)
    yield _check("right marginal is the source Gaussian", experiments.marginal_right_deviation(cfg), tolerance)

    cal = oracle.calibrate_kim_shih(cfg, spec, tolerance=tolerance, exponent_sign=exponent_sign)
    yield Check(
        "rate closed form vs quadrature (20 pts)",
        cal.matched,
        cal.max_deviation,
        tolerance,
        f"argument constant {cal.label}",
    )
    yield _check(
        "rate scale equals pi z1 z2^3 / 2",
        abs(cal.scale / cal.expected_scale - 1),
        tolerance,
    )

    y = 0.7
    r_pos = oracle.kim_shih_rate_numeric(y, cfg, spec)
    r_neg = oracle.kim_shih_rate_numeric(-y, cfg, spec)
    yield _check("numeric rate is even", abs(r_pos - r_neg) / abs(r_pos), 1e-8)

    wide = oracle.kim_shih_rate_numeric(y, cfg, spec, window_scale=2.0)
    yield _check("rate truncation safety (2x window)", abs(wide - r_pos) / abs(r_pos), 1e-8)

    wide_spec = oracle.QuadratureSpec(spec.relative_tolerance, spec.max_subdivisions, 2 * spec.truncation_sigma)
    base = oracle.numeric_post_slit_amplitude(3.0, -5.0, cfg, spec)
    wider = oracle.numeric_post_slit_amplitude(3.0, -5.0, cfg, wide_spec)
    yield _check("amplitude truncation safety (2x sigma)", abs(wider - base) / abs(base), 1e-8)

    # at the calibration anchor y_R = 0; away from it, errors far below the
    # tolerance can fluctuate with cancellation between sub-intervals
    ref = oracle.kim_shih_rate_numeric(0.0, cfg, oracle.QuadratureSpec(1e-13))
    devs = [
        abs(oracle.kim_shih_rate_numeric(0.0, cfg, oracle.QuadratureSpec(tol)) - ref) / ref
        for tol in (1e-4, 5e-5, 2.5e-5, 1.25e-5, 6.25e-6)
    ]
    monotone = all(b <= a_ for a_, b in zip(devs, devs[1:]))
    yield Check("tolerance monotonicity", monotone, detail=" ".join(f"{d_:.2e}" for d_ in devs))


def experiment_checks(cfg, tolerance=1e-6, spec=oracle.QuadratureSpec(), exponent_sign=-1.0):
    cfg = validate_config(cfg)
    h = cfg.grid.spacing
    central = cfg.wavelength * cfg.z1 / cfg.slit_width
    worst = 0.0
    for y_L in np.linspace(-central, central, 7):
        r = experiments.run_strekalov_scan(cfg, drop_gaussian=True, left_detector_y=float(y_L))
        i = int(np.argmax(r.distribution.values))
        worst = max(worst, abs(r.y[i] + cfg.z2 / cfg.z1 * y_L))
    yield Check("anticorrelated displacement -z2/z1 * y_L", worst <= h * (1 + 1e-9), worst, h)

    s1 = experiments.run_strekalov_scan(cfg, drop_gaussian=True, left_detector_y=0.0)
    expected = cfg.wavelength * cfg.z2 / cfg.slit_width
    zero = strekalov_first_zero(cfg)
    yield _check("first fringe zero at lambda z2 / d", abs(zero - expected), 1e-9, f"zero={zero:.9f} mm")
    yield Check("centered pattern peaks at 0", abs(s1.metrics.peak_location) <= h, s1.metrics.peak_location, h)

    yield _check("no-signaling (d vs 2.5 d)", experiments.no_signaling_check(cfg, 2.5 * cfg.slit_width), tolerance)

    # calibration failure (e.g. a growing exponent) raises here and fails the group
    experiments.closed_form_rate(cfg, spec, exponent_sign)
    ks = experiments.run_kim_shih_scan(cfg, "closed_form", spec)
    ss = experiments.run_single_slit(cfg)
    yield _check("HUP product below hbar/2", ks.metrics.product_hbar, 0.5)
    yield _check("FWHM(kim-shih) < FWHM(single slit)", ks.metrics.fwhm, ss.metrics.fwhm)
    source_std = 1 / (2 * cfg.correlation_a)
    yield Check(
        "kim-shih momentum std <= source std 1/(2a)",
        ks.metrics.delta_p <= source_std,
        ks.metrics.delta_p,
        source_std,
    )
    yield _check("closed form vs numeric scan", mode_equivalence(cfg, spec, exponent_sign), tolerance)


def run_validation(cfg, tolerance=1e-6, exponent_sign=-1.0):
    """All checks for ``cfg``. ``exponent_sign=+1`` injects the growing-exponent rate."""
    cfg = validate_config(cfg)
    groups = (
        ("analytic", lambda: analytic_checks(cfg)),
        ("oracle", lambda: oracle_checks(cfg, tolerance, exponent_sign=exponent_sign)),
        ("experiments", lambda: experiment_checks(cfg, tolerance, exponent_sign=exponent_sign)),
    )
    results = []
    for group, make in groups:
        try:
            for check in make():
                results.append(check)
        except Exception as exc:  # a crashing check is a failed check
            results.append(Check(f"{group}: {type(exc).__name__}", False, detail=str(exc)))
    return results
