import numpy as np
import numpy.testing as npt
import pytest
from scipy.linalg import svdvals

from stokes_sheet import solver
from stokes_sheet.models import FluidParams
from stokes_sheet.potentials import double_layer, rhs_V
from stokes_sheet.profile import InterfaceProfile
from stokes_sheet.solver import SolveError, far_field_constants, solve_density, vorticity_check


@pytest.fixture
def even():
    return InterfaceProfile.from_modes(32, [(1, 0.3, 0.0), (2, 0.1, 0.0)])


def test_flat_interface_has_zero_density(contrast):
    beta = solve_density(InterfaceProfile.zeros(32), contrast)
    npt.assert_array_equal(beta.beta1, 0.0)
    npt.assert_array_equal(beta.beta2, 0.0)
    assert beta.n == 32


def test_equal_viscosities_return_the_right_hand_side(params, wavy):
    beta = solve_density(wavy, params)
    rhs = rhs_V(wavy, params)
    npt.assert_array_equal(beta.beta1, rhs.v1)
    npt.assert_array_equal(beta.beta2, rhs.v2)


def test_residual_meets_target(contrast, wavy):
    beta = solve_density(wavy, contrast)
    scale = rhs_V(wavy, contrast).sup_norm()
    assert beta.residual <= 1e-10 * scale
    assert beta.condition >= 1.0


def test_density_matches_neumann_series(contrast, skewed):
    rhs = rhs_V(skewed, contrast).stacked()
    step = -2.0 * contrast.a_mu() * double_layer(skewed).matrix
    term = rhs.copy()
    total = rhs.copy()
    for _ in range(60):
        term = step @ term
        total += term
    beta = solve_density(skewed, contrast)
    npt.assert_allclose(np.concatenate([beta.beta1, beta.beta2]), total, atol=1e-8)


def test_density_is_linear_in_the_forcing(contrast, skewed):
    doubled = contrast.model_copy(update={"sigma": 2.0 * contrast.sigma, "g": 2.0 * contrast.g})
    beta = solve_density(skewed, contrast)
    twice = solve_density(skewed, doubled)
    npt.assert_allclose(twice.beta1, 2.0 * beta.beta1, atol=1e-12)
    npt.assert_allclose(twice.beta2, 2.0 * beta.beta2, atol=1e-12)


def test_even_profile_gives_odd_and_even_components(contrast, even, reflect):
    beta = solve_density(even, contrast)
    npt.assert_allclose(reflect(beta.beta1), -beta.beta1, atol=1e-10)
    npt.assert_allclose(reflect(beta.beta2), beta.beta2, atol=1e-10)


@pytest.mark.parametrize("shift", [0.6, 0.75, 1.0, -0.75])
def test_resolvent_is_invertible(shift):
    f = InterfaceProfile.from_modes(32, [(1, 0.5, 0.0), (2, 0.0, 0.25)])
    matrix = shift * np.eye(2 * f.n) - double_layer(f).matrix
    assert svdvals(matrix).min() > 1e-3


def test_residual_failure_raises(monkeypatch, contrast, wavy):
    monkeypatch.setattr(solver, "RESIDUAL_TARGET", -1.0)
    with pytest.raises(SolveError) as info:
        solve_density(wavy, contrast)
    assert info.value.residual >= 0.0
    assert np.isfinite(info.value.condition)


def test_far_field_constants(contrast, even):
    lifted = InterfaceProfile(even.samples + 0.4)
    beta = solve_density(lifted, contrast)
    constants = far_field_constants(lifted, beta, contrast)
    assert constants.c2 == 0.0
    assert constants.c3 == pytest.approx(-0.5 * contrast.theta() * 0.4)
    assert constants.c1 == pytest.approx(0.0, abs=1e-12)
    assert constants.c1 == pytest.approx(constants.c1_single + constants.c1_double)


def test_far_field_constants_without_gravity(skewed):
    fluids = FluidParams(mu_plus=2.0, mu_minus=1.0)
    beta = solve_density(InterfaceProfile(skewed.samples + 1.0), fluids)
    constants = far_field_constants(InterfaceProfile(skewed.samples + 1.0), beta, fluids)
    assert constants.c3 == 0.0


def test_truncation_height_must_clear_interface(contrast, skewed):
    beta = solve_density(skewed, contrast)
    with pytest.raises(ValueError, match="truncation"):
        vorticity_check(skewed, beta, contrast, L=0.3)


@pytest.mark.slow
def test_vorticity_integral_reproduces_c1(contrast, skewed):
    beta = solve_density(skewed, contrast)
    c1 = far_field_constants(skewed, beta, contrast).c1
    estimate = vorticity_check(skewed, beta, contrast)
    assert estimate == pytest.approx(c1, rel=5e-2, abs=1e-4)


@pytest.mark.slow
def test_vorticity_integral_does_not_depend_on_truncation_height(contrast, skewed):
    beta = solve_density(skewed, contrast)
    short = vorticity_check(skewed, beta, contrast, L=8.0)
    tall = vorticity_check(skewed, beta, contrast, L=12.0)
    assert tall == pytest.approx(short, abs=1e-3)
