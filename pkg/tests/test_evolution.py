import numpy as np
import numpy.testing as npt
import pytest

from stokes_sheet.config import TimeStepperConfig
from stokes_sheet.evolution import (
    BreakdownError,
    EvolutionState,
    default_dt,
    psi,
    simulate,
    stability_limit,
    step,
)
from stokes_sheet.profile import InterfaceProfile, shift, translate

SCHEMES = ("imex1", "imex2", "rk4-explicit")


def _rate(k, fluids):
    return -(fluids.theta() + fluids.sigma * k**2) / (2.0 * fluids.mu_sum * k)


def test_flat_interface_is_stationary(contrast):
    npt.assert_array_equal(psi(InterfaceProfile.zeros(32), contrast), 0.0)


def test_velocity_has_zero_mean(contrast, skewed):
    assert np.mean(psi(skewed, contrast)) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("k", [1, 2, 5])
def test_small_amplitudes_follow_the_linear_rates(contrast, k):
    eps = 1e-6
    f = InterfaceProfile.from_modes(32, [(k, eps, 0.0)])
    npt.assert_allclose(psi(f, contrast), _rate(k, contrast) * f.samples, atol=1e-11)


def test_vertical_shift_leaves_velocity_unchanged(contrast, wavy):
    npt.assert_allclose(psi(translate(wavy, c=0.7), contrast), psi(wavy, contrast), atol=1e-9)


def test_velocity_commutes_with_horizontal_shift(contrast, wavy):
    a = 0.7
    npt.assert_allclose(psi(translate(wavy, a=a), contrast), shift(psi(wavy, contrast), a), atol=1e-8)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_flat_state_stays_flat(params, scheme):
    state = EvolutionState(t=0.0, profile=InterfaceProfile.zeros(16), params=params)
    new = step(state, TimeStepperConfig(scheme=scheme), params, dt=0.01)
    npt.assert_allclose(new.profile.samples, 0.0, atol=1e-15)
    assert new.t == pytest.approx(0.01)
    assert new.dt == 0.01


def test_two_step_scheme_keeps_memory(params, wavy):
    state = EvolutionState(t=0.0, profile=wavy, params=params)
    assert step(state, TimeStepperConfig(scheme="imex2"), params, dt=0.01).memory is not None
    assert step(state, TimeStepperConfig(scheme="imex1"), params, dt=0.01).memory is None


def test_capillary_decay_of_first_mode(params):
    f0 = InterfaceProfile.from_modes(32, [(1, 1e-3, 0.0)])
    config = TimeStepperConfig(scheme="imex2", dt=1e-2, t_end=1.0, stride=100)
    final = simulate(f0, config, params)[-1]
    assert final.t == pytest.approx(1.0)
    assert final.profile.cos_amplitude(1) == pytest.approx(1e-3 * np.exp(-0.25), rel=1e-2)


def test_schemes_agree(contrast):
    f0 = InterfaceProfile.from_modes(32, [(1, 0.1, 0.0), (2, 0.0, 0.05)])
    finals = {
        scheme: simulate(f0, TimeStepperConfig(scheme=scheme, dt=1e-3, t_end=0.2, stride=200), contrast)[-1]
        for scheme in ("imex2", "rk4-explicit")
    }
    npt.assert_allclose(finals["imex2"].profile.samples, finals["rk4-explicit"].profile.samples, atol=1e-6)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_mean_is_conserved(contrast, scheme):
    f0 = InterfaceProfile.from_modes(32, [(1, 0.2, 0.0), (3, 0.0, 0.05)], mean=0.3)
    trajectory = simulate(f0, TimeStepperConfig(scheme=scheme, dt=0.01, t_end=0.1), contrast)
    for state in trajectory:
        assert state.profile.mean() == pytest.approx(0.3, abs=1e-13)


def test_trajectory_commutes_with_translation(contrast, wavy):
    config = TimeStepperConfig(scheme="imex2", dt=0.02, t_end=0.2, stride=10)
    a = 0.9
    base = simulate(wavy, config, contrast)[-1].profile
    moved = simulate(translate(wavy, a=a), config, contrast)[-1].profile
    npt.assert_allclose(moved.samples, shift(base.samples, a), atol=1e-8)


def test_recording_stride(params, wavy):
    trajectory = simulate(wavy, TimeStepperConfig(dt=0.01, t_end=0.1, stride=3), params)
    assert [round(state.t, 10) for state in trajectory] == [0.0, 0.03, 0.06, 0.09, 0.1]


def test_growth_past_cap_breaks_down(heavy_top):
    unstable = heavy_top.model_copy(update={"g": 5.0})
    f0 = InterfaceProfile.from_modes(32, [(1, 0.1, 0.0)])
    config = TimeStepperConfig(scheme="imex2", dt=0.01, t_end=5.0, amp_cap=0.2)
    with pytest.raises(BreakdownError, match="exceeds cap") as info:
        simulate(f0, config, unstable)
    partial = info.value.trajectory
    assert partial[0].t == 0.0
    assert len(partial) > 1
    assert partial[-1] is info.value.state
    assert partial[-1].t < 5.0
    assert partial[-1].profile.sup_norm() <= 0.2


def test_resume_matches_uninterrupted_run(contrast, skewed):
    first = simulate(skewed, TimeStepperConfig(scheme="imex2", dt=0.01, t_end=0.1), contrast)
    resumed = simulate(skewed, TimeStepperConfig(scheme="imex2", dt=0.01, t_end=0.2), contrast, start=first[-1])
    straight = simulate(skewed, TimeStepperConfig(scheme="imex2", dt=0.01, t_end=0.2), contrast)
    assert resumed[-1].t == pytest.approx(0.2)
    npt.assert_allclose(resumed[-1].profile.samples, straight[-1].profile.samples, atol=1e-12)


def test_explicit_step_limit(params):
    f0 = InterfaceProfile.from_modes(32, [(1, 0.1, 0.0)])
    assert stability_limit(32, params, 0.5) < 1.0
    with pytest.raises(ValueError, match="explicit limit"):
        simulate(f0, TimeStepperConfig(scheme="rk4-explicit", dt=1.0, t_end=1.0), params)


def test_single_explicit_step_checks_the_limit(params):
    state = EvolutionState(t=0.0, profile=InterfaceProfile.from_modes(32, [(1, 0.1, 0.0)]), params=params)
    config = TimeStepperConfig(scheme="rk4-explicit")
    with pytest.raises(ValueError, match="explicit limit"):
        step(state, config, params, dt=1.0)
    assert step(state, config, params, dt=0.5 * stability_limit(32, params, config.cfl)).t > 0.0


def test_default_step_shrinks_with_slope(params):
    gentle = InterfaceProfile.from_modes(32, [(1, 0.1, 0.0)])
    steep = InterfaceProfile.from_modes(32, [(1, 3.0, 0.0)])
    assert default_dt(steep, params) < default_dt(gentle, params)


def test_diagnostics(contrast, wavy):
    state = EvolutionState(t=0.0, profile=wavy, params=contrast, modes=3)
    diag = state.diagnostics
    assert diag.amplitudes.shape == (3,)
    assert diag.amplitudes[0] == pytest.approx(0.3)
    assert diag.mean == pytest.approx(0.0, abs=1e-15)
    assert diag.c3 == pytest.approx(0.0, abs=1e-15)
    assert diag.slope_max == pytest.approx(np.max(np.abs(wavy.derivative(1))))


def _fitted_rate(trajectory, k):
    t = np.array([state.t for state in trajectory])
    amp = np.array([state.profile.cos_amplitude(k) for state in trajectory])
    return np.polyfit(t, np.log(np.abs(amp)), 1)[0]


@pytest.mark.slow
@pytest.mark.parametrize("k", [1, 3])
def test_fitted_decay_rates(contrast, k):
    f0 = InterfaceProfile.from_modes(64, [(k, 1e-4, 0.0)])
    trajectory = simulate(f0, TimeStepperConfig(scheme="imex2", dt=5e-3, t_end=2.0, stride=20), contrast)
    assert _fitted_rate(trajectory, k) == pytest.approx(_rate(k, contrast), rel=1e-2)


@pytest.mark.slow
def test_fitted_rayleigh_taylor_growth(heavy_top):
    unstable = heavy_top.model_copy(update={"g": 2.0})
    assert _rate(1, unstable) == pytest.approx(0.25)
    f0 = InterfaceProfile.from_modes(64, [(1, 1e-4, 0.0)])
    trajectory = simulate(f0, TimeStepperConfig(scheme="imex2", dt=5e-3, t_end=2.0, stride=20), unstable)
    assert _fitted_rate(trajectory, 1) == pytest.approx(0.25, rel=1e-2)
