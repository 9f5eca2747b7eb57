import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biphoton import Distribution1D, ScanSpec, TransverseGrid, validate_config
from biphoton import experiments as ex
from biphoton.core import NonNormalized
from biphoton.validation import mode_equivalence, strekalov_first_zero


def _minimum_near(result, y0):
    y, v = result.y, result.distribution.values
    window = np.abs(y - y0) < 0.5
    return y[window][np.argmin(v[window])]


def test_single_slit_zero_and_peak(kim_shih):
    r = ex.run_single_slit(kim_shih)
    assert abs(_minimum_near(r, 6.5625) - 6.5625) <= kim_shih.grid.spacing
    assert abs(r.metrics.peak_location) <= kim_shih.grid.spacing
    assert r.distribution.normalized


def test_single_slit_zero_doubles_with_distance(kim_shih):
    wide = validate_config(kim_shih.config.with_(scan=ScanSpec(-20.0, 20.0, 4001)))
    r = ex.run_single_slit(wide, z=2 * wide.z2)
    assert abs(_minimum_near(r, 13.125) - 13.125) <= wide.grid.spacing


def test_centered_strekalov_scan(strekalov):
    r = ex.run_strekalov_scan(strekalov, drop_gaussian=True)
    assert abs(r.metrics.peak_location) <= strekalov.grid.spacing
    assert abs(_minimum_near(r, 2.8958) - 2.89575) <= strekalov.grid.spacing


def test_displaced_strekalov_scan_peaks_opposite(strekalov):
    r = ex.run_strekalov_scan(strekalov, drop_gaussian=True, left_detector_y=2.0)
    assert r.metrics.peak_location == pytest.approx(-3.3, abs=strekalov.grid.spacing)
    assert r.provenance["scan_left_detector_y_mm"] == 2.0


def test_displaced_scan_is_less_probable_with_envelope(strekalov):
    centered = ex.run_strekalov_scan(strekalov)
    displaced = ex.run_strekalov_scan(strekalov, left_detector_y=2.0)
    assert displaced.distribution.raw_values.max() < centered.distribution.raw_values.max()


@given(st.floats(min_value=-1.0, max_value=1.0))
@settings(max_examples=40, deadline=None)
def test_anticorrelation_law(y_frac):
    cfg = validate_config(ex_preset("strekalov"))
    y_L = y_frac * cfg.wavelength * cfg.z1 / cfg.slit_width
    r = ex.run_strekalov_scan(cfg, drop_gaussian=True, left_detector_y=y_L)
    i = int(np.argmax(r.distribution.values))
    assert abs(r.y[i] + cfg.z2 / cfg.z1 * y_L) <= cfg.grid.spacing * (1 + 1e-9)


@given(st.floats(min_value=200.0, max_value=5000.0))
@settings(max_examples=40, deadline=None)
def test_fringe_zero_is_linear_in_z2(z2):
    cfg = validate_config(ex_preset("strekalov"))
    assert strekalov_first_zero(cfg, z2) == pytest.approx(cfg.wavelength / cfg.slit_width * z2, abs=1e-9)


def ex_preset(name):
    from biphoton import get_preset

    return get_preset(name)


def test_kim_shih_narrower_than_single_slit(kim_shih):
    ks = ex.run_kim_shih_scan(kim_shih)
    ss = ex.run_single_slit(kim_shih)
    assert ks.metrics.fwhm < ss.metrics.fwhm
    assert ks.metrics.delta_p <= 1 / (2 * kim_shih.correlation_a)
    assert ks.metrics.product_hbar < 0.5
    assert ks.provenance["argument_constant"] == "2 pi d/(lambda z2)"


@pytest.mark.parametrize("preset", ["kim_shih", "strekalov"])
def test_scan_modes_agree(preset, request):
    cfg = request.getfixturevalue(preset)
    assert mode_equivalence(cfg) < 1e-6


def test_numeric_mode_is_recorded(kim_shih):
    small = validate_config(kim_shih.config.with_(scan=ScanSpec(-2.0, 2.0, 41)))
    r = ex.run_kim_shih_scan(small, "numeric")
    assert r.provenance["mode"] == "numeric"
    closed = ex.run_kim_shih_scan(small)
    np.testing.assert_allclose(r.distribution.values, closed.distribution.values, rtol=1e-6)
    with pytest.raises(ValueError):
        ex.run_kim_shih_scan(small, "fourier")


def test_metrics_are_recomputable(kim_shih):
    r = ex.run_kim_shih_scan(kim_shih)
    again = ex.compute_uncertainty_report(r.distribution, kim_shih, kim_shih.z2)
    assert again == r.metrics


def test_gaussian_distribution_momentum_spread(kim_shih):
    sigma = 0.4
    grid = TransverseGrid.uniform(-8, 8, 4001)
    dist = Distribution1D(grid, np.exp(-grid.samples**2 / (2 * sigma**2))).normalize()
    report = ex.compute_uncertainty_report(dist, kim_shih, 1500.0)
    assert report.delta_p == pytest.approx(2 * math.pi * sigma / (0.0007 * 1500.0), rel=1e-9)
    assert abs(report.peak_location) <= grid.spacing
    assert report.delta_y == 0.08
    assert report.fwhm == pytest.approx(2 * math.sqrt(2 * math.log(2)) * sigma, rel=1e-4)


def test_uncertainty_report_requires_normalized(kim_shih):
    grid = TransverseGrid.uniform(-1, 1, 11)
    with pytest.raises(NonNormalized):
        ex.compute_uncertainty_report(Distribution1D(grid, np.ones(11)), kim_shih, 1.0)


def test_fwhm_nan_when_not_bracketed():
    y = np.linspace(-1, 1, 11)
    assert math.isnan(ex.fwhm(y, np.ones(11)))


def test_no_signaling(kim_shih):
    dev = ex.no_signaling_check(kim_shih, 0.4)
    assert dev < 1e-6
    assert ex.no_signaling_check(kim_shih, kim_shih.slit_width) == 0.0
    assert abs(ex.no_signaling_check(kim_shih, 0.4, window_scale=2.0) - dev) < 1e-8
    with pytest.raises(ValueError):
        ex.no_signaling_check(kim_shih, 0.0)


def test_beam_width_study_broadens(kim_shih):
    results = ex.beam_width_limit_study(kim_shih, [1 / 3, 1 / 30, 1 / 300])
    widths = [r.metrics.fwhm for r in results]
    assert widths[0] < widths[1] < widths[2]


def test_beam_width_study_single_value(kim_shih):
    (only,) = ex.beam_width_limit_study(kim_shih, [1 / 3])
    ref = ex.run_kim_shih_scan(kim_shih)
    np.testing.assert_array_equal(only.distribution.values, ref.distribution.values)
    with pytest.raises(ValueError):
        ex.beam_width_limit_study(kim_shih, [])


def test_large_a_is_envelope_dominated(kim_shih):
    narrow = validate_config(kim_shih.config.with_(scan=ScanSpec(-0.1, 0.1, 2001)))
    w10, w20 = (r.metrics.fwhm for r in ex.beam_width_limit_study(narrow, [10.0, 20.0]))
    assert w10 / w20 == pytest.approx(2.0, rel=0.05)
    # Gaussian exp(-8 pi^2 a^2 y^2 / (lambda z2)^2): FWHM = lambda z2 sqrt(ln 2 / 2) / (pi a)
    expected = kim_shih.wavelength * kim_shih.z2 * math.sqrt(math.log(2) / 2) / (math.pi * 10.0)
    assert w10 == pytest.approx(expected, rel=0.01)


def test_right_marginal_is_source_gaussian(kim_shih):
    assert ex.marginal_right_deviation(kim_shih) < 1e-6
