import numpy as np
import numpy.testing as npt
import pytest

from stokes_sheet.profile import (
    InterfaceProfile,
    derivative,
    geometry,
    grid,
    midpoint_matrix,
    multiplier_matrix,
    product,
    resample,
    shift,
    translate,
)


def test_grid_starts_at_minus_pi():
    xi = grid(16)
    assert xi[0] == -np.pi
    npt.assert_allclose(np.diff(xi), 2 * np.pi / 16)


@pytest.mark.parametrize("n", [8, 24, 0])
def test_rejects_bad_grid_sizes(n):
    with pytest.raises(ValueError):
        InterfaceProfile(np.zeros(n))


def test_rejects_non_finite_samples():
    samples = np.zeros(16)
    samples[3] = np.nan
    with pytest.raises(ValueError, match="finite"):
        InterfaceProfile(samples)


def test_samples_are_read_only():
    f = InterfaceProfile.zeros(16)
    with pytest.raises(ValueError):
        f.samples[0] = 1.0


def test_derivatives_of_trigonometric_profile():
    xi = grid(32)
    f = np.sin(3 * xi) + 0.5 * np.cos(xi)
    npt.assert_allclose(derivative(f, 1), 3 * np.cos(3 * xi) - 0.5 * np.sin(xi), atol=1e-12)
    npt.assert_allclose(derivative(f, 2), -9 * np.sin(3 * xi) - 0.5 * np.cos(xi), atol=1e-11)
    npt.assert_allclose(derivative(f, 3), -27 * np.cos(3 * xi) + 0.5 * np.sin(xi), atol=1e-10)


def test_derivative_order_is_validated():
    with pytest.raises(ValueError):
        derivative(np.zeros(16), 4)


def test_odd_derivative_drops_nyquist():
    xi = grid(16)
    npt.assert_allclose(derivative(np.cos(8 * xi), 1), 0.0, atol=1e-12)


def test_modes_and_amplitudes(wavy):
    assert wavy.mean() == pytest.approx(0.0, abs=1e-15)
    assert wavy.cos_amplitude(1) == pytest.approx(0.3)
    assert wavy.sin_amplitude(2) == pytest.approx(0.1)
    npt.assert_allclose(wavy.amplitudes(3), [0.3, 0.1, 0.0], atol=1e-14)


def test_from_modes_rejects_unresolved_mode():
    with pytest.raises(ValueError):
        InterfaceProfile.from_modes(16, [(8, 1.0, 0.0)])


def test_evaluate_between_nodes(wavy):
    x = np.linspace(-3.0, 3.0, 7) + 0.013
    npt.assert_allclose(wavy.evaluate(x), 0.3 * np.cos(x) + 0.1 * np.sin(2 * x), atol=1e-13)


def test_resample_keeps_resolved_content(wavy):
    fine = wavy.resample(128)
    npt.assert_allclose(fine.samples, 0.3 * np.cos(fine.xi) + 0.1 * np.sin(2 * fine.xi), atol=1e-14)
    npt.assert_allclose(fine.resample(64).samples, wavy.samples, atol=1e-14)


def test_translate_shifts_and_lifts(wavy):
    moved = translate(wavy, a=0.4, c=0.25)
    xi = wavy.xi
    npt.assert_allclose(moved.samples, 0.3 * np.cos(xi - 0.4) + 0.1 * np.sin(2 * (xi - 0.4)) + 0.25, atol=1e-13)


def test_geometry_of_flat_profile():
    g = geometry(InterfaceProfile.zeros(16))
    npt.assert_allclose(g.omega, 1.0)
    npt.assert_allclose(g.kappa, 0.0)
    npt.assert_allclose(g.nu, np.stack([np.zeros(16), np.ones(16)]))


def test_curvature_sign(wavy):
    g = geometry(wavy)
    # crest at ξ = 0 bends downwards
    assert g.kappa[32] < 0
    npt.assert_allclose(np.sum(g.nu * g.tau, axis=0), 0.0, atol=1e-15)


def test_dealiased_product_is_exact_for_band_limited_factors():
    xi = grid(16)
    u = np.cos(5 * xi)
    npt.assert_allclose(product(u, u, dealias=True), 0.5, atol=1e-13)


def test_midpoint_matrix_interpolates():
    n = 16
    xi = grid(n)
    npt.assert_allclose(midpoint_matrix(n) @ np.sin(3 * xi), np.sin(3 * (xi + np.pi / n)), atol=1e-13)


def test_hilbert_multiplier_maps_cos_to_sin():
    xi = grid(32)
    npt.assert_allclose(multiplier_matrix(32, "hilbert") @ np.cos(4 * xi), np.sin(4 * xi), atol=1e-13)


def test_unknown_multiplier():
    with pytest.raises(ValueError):
        multiplier_matrix(16, "laplace")


def test_resample_splits_nyquist_when_refining():
    xi = grid(16)
    fine = resample(np.cos(8 * xi), 32)
    npt.assert_allclose(fine[::2], np.cos(8 * xi), atol=1e-14)


def test_parseval(wavy):
    assert np.sum(np.abs(wavy.coeffs) ** 2) == pytest.approx(np.mean(wavy.samples**2), rel=1e-13)
    assert 0.5 * np.sum(wavy.amplitudes(3) ** 2) == pytest.approx(np.mean(wavy.samples**2), rel=1e-13)


def test_geometry_commutes_with_grid_shifts(wavy):
    steps = 3
    moved = geometry(translate(wavy, a=steps * 2 * np.pi / wavy.n))
    base = geometry(wavy)
    for name in ("fprime", "omega", "nu", "tau", "kappa"):
        npt.assert_allclose(getattr(moved, name), np.roll(getattr(base, name), steps, axis=-1), atol=1e-12)


def test_slope_commutes_with_any_shift(wavy):
    a = 0.37
    npt.assert_allclose(geometry(translate(wavy, a=a)).fprime, shift(geometry(wavy).fprime, a), atol=1e-12)
