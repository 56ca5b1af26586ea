"""Sup-Gaussian and Lp error metrics plus the heat-capacity functional."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specdens import (
    ProbeVectorSource,
    default_temperatures,
    dense_eigensolve,
    error_lp,
    error_sup_gaussian,
    estimate_dos,
    exact_regularized_dos,
    heat_capacity,
    lanczos_factorize,
    pool_ritz_quadratures,
    ritz_quadrature,
)
from specdens.density import (
    RegularizationKernel,
    SpectralDensityEstimate,
    SpectralInterval,
)
from specdens.metrics import PhysicalConstants, phonon_heat_weight
from specdens.reference import ExactSpectrum, spectrum_interval

FIVE_POINT = ExactSpectrum(eigenvalues=np.array([0.3, 0.55, 0.9, 1.4, 1.8]))


def _near_delta(spectrum, lo, hi, n_pts=15001, width=5e-4):
    """The spectrum rendered as a density: tight Gaussians on a fine grid."""
    grid = np.linspace(lo, hi, n_pts)
    kernel = RegularizationKernel("gaussian", width)
    return exact_regularized_dos(spectrum, kernel, grid)


def test_self_comparison_is_quadrature_limited():
    est = _near_delta(FIVE_POINT, -0.2, 2.3)
    report = error_sup_gaussian(FIVE_POINT, est, 0.35)
    assert report.value <= 1e-6
    assert report.kind == "sup_gaussian"
    assert report.parameter == 0.35


def test_zero_estimate_error_is_peak_of_blur(small_spectrum, small_interval):
    grid = np.linspace(small_interval.lambda_lb, small_interval.lambda_ub, 2400)
    zero = SpectralDensityEstimate.from_original(
        grid, np.zeros_like(grid), small_interval, method="zero"
    )
    sigma = 0.35
    report = error_sup_gaussian(small_spectrum, zero, sigma)
    centers = np.linspace(small_interval.lambda_lb, small_interval.lambda_ub, 1000)
    kernel = RegularizationKernel("gaussian", sigma)
    peak = np.max(
        kernel(small_spectrum.eigenvalues[None, :] - centers[:, None]).sum(axis=1)
    ) / small_spectrum.n
    assert report.value == pytest.approx(peak, rel=1e-12)


def test_custom_centers_are_respected():
    est = _near_delta(FIVE_POINT, -0.2, 2.3)
    centers = np.array([0.9])
    report = error_sup_gaussian(FIVE_POINT, est, 0.3, centers=centers)
    assert report.value <= 1e-6


def test_coarse_grids_are_refused(small_spectrum, small_interval):
    grid = np.linspace(small_interval.lambda_lb, small_interval.lambda_ub, 50)
    est = SpectralDensityEstimate.from_original(
        grid, np.zeros_like(grid), small_interval, method="zero"
    )
    with pytest.raises(ValueError, match="too coarse"):
        error_sup_gaussian(small_spectrum, est, 0.35)
    with pytest.raises(ValueError):
        error_sup_gaussian(small_spectrum, est, -0.1)


def test_error_decreases_with_blur_width(small_lap, small_interval, small_spectrum):
    # finer sigma exposes more structure the estimate cannot resolve
    source = ProbeVectorSource("rademacher", seed=1, dim=small_lap.dim)
    est = estimate_dos(small_lap, small_interval, "kpm", 60, source, 40,
                       grid_points=2400)
    errs = [
        error_sup_gaussian(small_spectrum, est, sigma).value
        for sigma in (0.5, 0.35, 0.2, 0.05)
    ]
    assert errs[0] < errs[1] < errs[2] < errs[3]


@given(seed=st.integers(0, 2**31 - 1))
@settings(max_examples=10, deadline=None)
def test_triangle_inequality_on_estimate_triples(seed):
    rng = np.random.default_rng(seed)
    specs, ests = [], []
    for _ in range(3):
        lam = np.sort(rng.uniform(0.0, 2.0, rng.integers(3, 7)))
        spec = ExactSpectrum(eigenvalues=lam)
        grid = np.linspace(-0.5, 2.5, 5001)
        kernel = RegularizationKernel("gaussian", 2e-3)
        specs.append(spec)
        ests.append(exact_regularized_dos(spec, kernel, grid))
    d12 = error_sup_gaussian(specs[0], ests[1], 0.3).value
    d23 = error_sup_gaussian(specs[1], ests[2], 0.3).value
    d13 = error_sup_gaussian(specs[0], ests[2], 0.3).value
    assert d13 <= d12 + d23 + 1e-5


def test_lanczos_inner_products_stay_nonnegative(small_lap, small_interval):
    from specdens import lanczos_dos

    source = ProbeVectorSource("gaussian", seed=5, dim=small_lap.dim)
    est = lanczos_dos(small_lap, small_interval, 15, source, 4, sigma=0.3)
    assert np.all(est.density >= 0.0)
    kernel = RegularizationKernel("gaussian", 0.3)
    lam = est.lambda_grid
    for center in np.linspace(small_interval.lambda_lb, small_interval.lambda_ub, 7):
        inner = np.trapezoid(kernel(lam - center) * est.density, lam)
        assert inner >= 0.0


def test_lp_identical_inputs_are_zero(small_spectrum, small_interval):
    grid = np.linspace(small_interval.lambda_lb, small_interval.lambda_ub, 800)
    kernel = RegularizationKernel("gaussian", 0.4)
    a = exact_regularized_dos(small_spectrum, kernel, grid, small_interval)
    b = exact_regularized_dos(small_spectrum, kernel, grid, small_interval)
    for p in (1, 2, np.inf):
        assert error_lp(a, b, p).value == 0.0


def test_lp_constant_offset_and_closed_forms():
    grid = np.linspace(0.0, 1.0, 2001)
    iv = SpectralInterval(0.0, 1.0)
    ramp = SpectralDensityEstimate.from_original(grid, grid.copy(), iv, method="ramp")
    zero = SpectralDensityEstimate.from_original(grid, np.zeros_like(grid), iv,
                                                 method="zero")
    offset = SpectralDensityEstimate.from_original(grid, grid + 0.25, iv,
                                                   method="ramp-offset")
    assert error_lp(ramp, offset, np.inf).value == pytest.approx(0.25, rel=1e-12)
    assert error_lp(ramp, zero, 1).value == pytest.approx(0.5, rel=1e-6)
    assert error_lp(ramp, zero, 2).value == pytest.approx(np.sqrt(1.0 / 3.0), rel=1e-6)
    with pytest.raises(ValueError):
        error_lp(ramp, zero, 3)


def test_lp_resamples_mismatched_grids():
    iv = SpectralInterval(0.0, 1.0)
    fine = np.linspace(0.0, 1.0, 1501)
    coarse = np.linspace(-0.2, 1.2, 901)
    a = SpectralDensityEstimate.from_original(fine, fine**2, iv, method="a")
    b = SpectralDensityEstimate.from_original(coarse, coarse**2, iv, method="b")
    report = error_lp(a, b, np.inf)
    # linear interpolation of t^2 on spacing h leaves h^2 f''/8 ~ 6e-7
    assert report.value <= 1e-6
    assert report.grid_points == len(fine)


def test_lp_rejects_disjoint_grids():
    iv = SpectralInterval(0.0, 1.0)
    a = SpectralDensityEstimate.from_original(
        np.linspace(0.0, 1.0, 64), np.zeros(64), iv, method="a"
    )
    b = SpectralDensityEstimate.from_original(
        np.linspace(2.0, 3.0, 64), np.zeros(64), SpectralInterval(2.0, 3.0),
        method="b"
    )
    with pytest.raises(ValueError, match="non-overlapping"):
        error_lp(a, b, 1)


def test_single_frequency_heat_capacity_closed_form():
    spec = ExactSpectrum(eigenvalues=np.array([4.0]))
    temps = np.array([0.2, 1.0, 3.0])
    curve = heat_capacity(spec, temps, normalize=False)
    x = 2.0 / temps
    expected = x**2 * np.exp(-x) / np.expm1(-x) ** 2
    np.testing.assert_allclose(curve, expected, rtol=1e-12)
    normalized = heat_capacity(spec, temps)
    np.testing.assert_allclose(normalized, expected / expected.max(), rtol=1e-12)


def test_heat_capacity_saturates_at_high_temperature(small_spectrum):
    temps = default_temperatures()
    curve = heat_capacity(small_spectrum, temps)
    assert np.all(np.diff(curve) >= -1e-12)
    assert curve[-1] == pytest.approx(1.0, abs=1e-12)
    # classical limit: every mode contributes k_B
    raw = heat_capacity(small_spectrum, np.array([500.0]), normalize=False)
    assert raw[0] == pytest.approx(1.0, rel=1e-4)


def test_heat_capacity_eigenvalue_validation():
    temps = np.array([1.0])
    bad = ExactSpectrum(eigenvalues=np.array([-0.5, 1.0]))
    with pytest.raises(ValueError, match="negative"):
        heat_capacity(bad, temps)
    tiny = ExactSpectrum(eigenvalues=np.array([-1e-12, 1.0]))
    assert np.isfinite(heat_capacity(tiny, temps, normalize=False)).all()
    with pytest.raises(ValueError):
        heat_capacity(tiny, np.array([0.0, 1.0]))
    with pytest.raises(TypeError):
        heat_capacity(42, temps)


def test_heat_capacity_paths_agree(small_lap, small_spectrum):
    temps = default_temperatures()
    exact = heat_capacity(small_spectrum, temps)

    iv = spectrum_interval(small_spectrum, margin=0.01)
    grid = np.linspace(-0.05, iv.lambda_ub + 0.05, 8001)
    kernel = RegularizationKernel("gaussian", 5e-3)
    est = exact_regularized_dos(small_spectrum, kernel, grid, iv)
    np.testing.assert_allclose(heat_capacity(est, temps), exact, atol=1e-5)

    source = ProbeVectorSource("basis", seed=0, dim=small_lap.dim)
    quads = [
        ritz_quadrature(lanczos_factorize(small_lap, source.draw(l), small_lap.dim))
        for l in range(small_lap.dim)
    ]
    pooled = pool_ritz_quadratures(quads)
    np.testing.assert_allclose(heat_capacity(pooled, temps), exact, atol=1e-12)


def test_constants_rescale_the_argument():
    spec = ExactSpectrum(eigenvalues=np.array([4.0]))
    temps = np.array([0.7, 2.0])
    doubled = PhysicalConstants(k_B=1.0, hbar=2.0, c=1.0)
    expected = np.array([float(phonon_heat_weight(2.0, t, doubled)) for t in temps])
    np.testing.assert_allclose(
        heat_capacity(spec, temps, constants=doubled, normalize=False),
        expected, rtol=1e-12,
    )


def test_default_temperature_sweep():
    temps = default_temperatures()
    assert temps[0] == pytest.approx(0.05)
    assert temps[-1] == pytest.approx(5.0)
    assert len(temps) == 40
    assert np.all(np.diff(temps) > 0)
    with pytest.raises(ValueError):
        default_temperatures(t_min=2.0, t_max=1.0)
