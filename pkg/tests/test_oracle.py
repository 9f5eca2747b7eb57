import math

import numpy as np
import pytest

from biphoton import analytic as an
from biphoton import oracle
from biphoton.core import validate_config
from biphoton.oracle import NoConvergence, QuadratureSpec, TruncationTooTight, integrate_adaptive
from biphoton.validation import momentum_amplitude_deviation


def test_sine_integral():
    assert integrate_adaptive(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-8)


def test_gaussian_integral_truncated():
    assert integrate_adaptive(lambda x: np.exp(-x * x), -10, 10) == pytest.approx(math.sqrt(math.pi), rel=1e-8)


def test_sinc_squared_integral_over_the_line():
    # truncate at a zero of sin(ku) and add the mean tail 2 * int_U^inf 1/(2u^2)
    d = 0.16
    k = d / 2
    U = 1000 * math.pi / k
    body = integrate_adaptive(lambda u: np.sinc(k * u / math.pi) ** 2 * k * k, 0.0, U, panels=1000)
    total = 2 * body + 1.0 / U
    assert total == pytest.approx(math.pi * d / 2, rel=1e-8)
    assert round(total, 7) == 0.2513274


def test_reversed_limits_and_empty_interval():
    assert integrate_adaptive(np.sin, math.pi, 0.0) == pytest.approx(-2.0, rel=1e-8)
    assert integrate_adaptive(np.sin, 1.0, 1.0) == 0.0


def test_no_convergence_returns_best_estimate():
    step = lambda x: np.where(x < 1 / 3, 0.0, 1.0)
    with pytest.raises(NoConvergence) as info:
        integrate_adaptive(step, 0.0, 1.0, QuadratureSpec(1e-14, 4))
    assert info.value.estimate == pytest.approx(2 / 3, abs=0.05)


def test_quadrature_spec_invariants():
    with pytest.raises(ValueError):
        QuadratureSpec(relative_tolerance=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=3)


@pytest.mark.parametrize(
    "f,lo,hi",
    [(np.exp, 0.0, 3.0), (lambda x: 1 / (1 + x), 0.0, 10.0), (lambda x: np.exp(-x), 0.0, 20.0)],
    ids=["exp", "reciprocal", "decay"],
)
def test_tolerance_monotonicity(f, lo, hi):
    # sign-definite sixth derivative: every refinement shrinks an error of fixed sign
    ref = integrate_adaptive(f, lo, hi, QuadratureSpec(1e-15))
    devs = [abs(integrate_adaptive(f, lo, hi, QuadratureSpec(t)) - ref) for t in (1e-5 / 2**k for k in range(10))]
    assert all(b <= a for a, b in zip(devs, devs[1:]))


def test_numeric_amplitude_at_origin(kim_shih):
    a = kim_shih.correlation_a
    num = oracle.numeric_post_slit_amplitude(0.0, 0.0, kim_shih)
    # inner Gaussian integral contributes 2 a sqrt(pi), outer slit integral 2 * (d/2)
    assert num / (4 * a * math.sqrt(math.pi)) == pytest.approx(kim_shih.slit_width / 2, rel=1e-6)


def test_numeric_amplitude_diffraction_zero(kim_shih):
    origin = oracle.numeric_post_slit_amplitude(0.0, 0.0, kim_shih)
    zero = oracle.numeric_post_slit_amplitude(0.0, 2 * math.pi / kim_shih.slit_width, kim_shih)
    assert abs(zero) < 1e-8 * origin


def test_numeric_amplitude_grid_matches_closed_form(kim_shih, strekalov):
    assert momentum_amplitude_deviation(kim_shih) < 1e-6
    assert momentum_amplitude_deviation(strekalov) < 1e-6


def test_numeric_amplitude_truncation_safety(kim_shih):
    base = oracle.numeric_post_slit_amplitude(4.0, -9.0, kim_shih)
    wide = oracle.numeric_post_slit_amplitude(4.0, -9.0, kim_shih, QuadratureSpec(truncation_sigma=20.0))
    assert wide == pytest.approx(base, rel=1e-8)


def test_delta_regime_marginal_is_single_slit():
    a, d = 3.0, 0.16
    p_L = np.linspace(-100, 100, 2001)
    p_R = np.linspace(-2.5, 2.5, 1001)
    joint = oracle.sample_joint_momentum(p_L, p_R, a, d)
    marg = oracle.numeric_marginal(joint, "right")
    ref = an.marginal_left_density(p_L, d)
    ref = ref / np.trapezoid(ref, p_L)
    near = np.abs(p_L) <= 10
    assert np.max(np.abs(marg.values[near] / ref[near] - 1)) < 1e-3


def test_symmetric_joint_gives_symmetric_marginal():
    p = np.linspace(-2e4, 2e4, 5001)
    joint = oracle.sample_joint_momentum(p, np.linspace(-15, 15, 61), 1 / 3, 0.4)
    m = oracle.numeric_marginal(joint, "left").values
    np.testing.assert_allclose(m, m[::-1], rtol=1e-12)


def test_narrow_grid_is_rejected():
    joint = oracle.sample_joint_momentum(np.linspace(-50, 50, 101), np.linspace(-15, 15, 61), 1 / 3, 0.16)
    with pytest.raises(TruncationTooTight):
        oracle.numeric_marginal(joint, "left")
    with pytest.raises(ValueError):
        oracle.numeric_marginal(joint, "diagonal")


def test_numeric_rate_is_positive_and_even(kim_shih):
    r0 = oracle.kim_shih_rate_numeric(0.0, kim_shih)
    assert 0 < r0 < math.inf
    for y in (0.3, 1.1, 2.4):
        assert oracle.kim_shih_rate_numeric(-y, kim_shih) == pytest.approx(oracle.kim_shih_rate_numeric(y, kim_shih), rel=1e-8)


def test_numeric_rate_at_origin_matches_sinc4_integral(kim_shih):
    # int sin^4(k u)/u^4 du = 2 pi k^3 / 3, times dy_L = z1 du
    k = math.pi * kim_shih.slit_width / kim_shih.wavelength
    expected = kim_shih.z1 * 2 * math.pi * k**3 / 3
    assert oracle.kim_shih_rate_numeric(0.0, kim_shih) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("y", [0.0, 0.5, 1.5])
def test_numeric_rate_truncation_safety(kim_shih, y):
    base = oracle.kim_shih_rate_numeric(y, kim_shih)
    assert oracle.kim_shih_rate_numeric(y, kim_shih, window_scale=2.0) == pytest.approx(base, rel=1e-8)


@pytest.mark.parametrize("preset", ["kim_shih", "strekalov"])
def test_calibration_selects_autocorrelation_constant(preset, request):
    cfg = request.getfixturevalue(preset)
    cal = oracle.calibrate_kim_shih(cfg)
    assert cal.matched
    assert cal.argument_factor == 2.0
    assert cal.deviations[2.0] < 1e-6
    assert cal.deviations[1.0] > 1e-2
    assert cal.scale == pytest.approx(cal.expected_scale, rel=1e-6)
    assert len(cal.sample_points) == 20 and cal.sample_points[-1] == 1.5


def test_calibration_rejects_growing_exponent(kim_shih):
    cal = oracle.calibrate_kim_shih(kim_shih, exponent_sign=1.0)
    assert not cal.matched


def test_calibration_copes_with_underflowing_envelope(kim_shih):
    narrow = validate_config(kim_shih.config.with_(correlation_a=10.0))
    assert oracle.calibrate_kim_shih(narrow).matched
