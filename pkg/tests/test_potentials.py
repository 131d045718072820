import numpy as np
import numpy.testing as npt
import pytest

from stokes_sheet.kernels import KernelPoint
from stokes_sheet.potentials import (
    FieldEvaluator,
    double_layer,
    double_layer_adjoint,
    eval_fields,
    eval_Z,
    rhs_V,
    trace_ops,
    z_jump,
)
from stokes_sheet.profile import InterfaceProfile, grid
from stokes_sheet.solver import far_field_constants, solve_density


def _extrapolate(values):
    """Three-point Richardson limit for samples at d, d/2, d/4."""
    far, mid, near = values
    return (8.0 * near - 6.0 * mid + far) / 3.0


def test_flat_trace_operators():
    n = 32
    ops = trace_ops(np.zeros(n))
    for name in ("b2", "b3", "b4", "b5", "b6"):
        npt.assert_allclose(getattr(ops, name).entries, 0.0, atol=1e-15)
    xi = grid(n)
    npt.assert_allclose(ops.b1(np.cos(2 * xi)), np.sin(2 * xi), atol=1e-12)
    assert ops.n == n


def test_double_layer_vanishes_on_flat_interface():
    npt.assert_allclose(double_layer(np.zeros(32)).matrix, 0.0, atol=1e-15)


def test_adjoint_is_weighted_transpose():
    f = InterfaceProfile.from_modes(64, [(1, 0.4, 0.0)])
    ops = trace_ops(f)
    D = double_layer(f, ops)
    npt.assert_allclose(D.weighted_transpose().matrix, double_layer_adjoint(f, ops).matrix, atol=1e-8)


def test_double_layer_application_matches_block_matrix(wavy):
    D = double_layer(wavy)
    rng = np.random.default_rng(7)
    beta = rng.standard_normal(2 * wavy.n)
    left, right = D(beta[: wavy.n], beta[wavy.n :])
    npt.assert_allclose(np.concatenate([left, right]), D.matrix @ beta, atol=1e-12)


def test_rhs_vanishes_for_flat_interface(contrast):
    rhs = rhs_V(np.zeros(32), contrast)
    assert rhs.sup_norm() == 0.0


def test_rhs_vanishes_for_lifted_flat_interface(contrast):
    rhs = rhs_V(np.full(32, 0.8), contrast)
    assert rhs.sup_norm() == pytest.approx(0.0, abs=1e-13)


def test_rhs_is_nonzero_for_wavy_interface(wavy, params):
    assert rhs_V(wavy, params).sup_norm() > 1e-3


def test_z2_of_constant_density_over_flat_interface():
    evaluator = FieldEvaluator(np.zeros(16))
    values = evaluator.z(2, np.ones(16), [0.3, 0.3, -2.0], [0.5, -0.5, 3.0])
    npt.assert_allclose(values, [1.0, -1.0, 1.0], atol=1e-10)


def test_far_field_limits_of_z_operators():
    f = InterfaceProfile.from_modes(32, [(1, 0.3, 0.0)])
    phi = 1.0 + 0.5 * np.cos(f.xi)
    for height, sign in ((15.0, 1.0), (-15.0, -1.0)):
        point = KernelPoint(0.4, height)
        assert eval_Z(2, f, phi, point).value == pytest.approx(sign * np.mean(phi), abs=1e-5)
        for i in (1, 3, 4):
            assert eval_Z(i, f, phi, point).value == pytest.approx(0.0, abs=1e-5)


def test_eval_Z_index_is_validated():
    with pytest.raises(ValueError):
        eval_Z(0, InterfaceProfile.zeros(16), np.ones(16), KernelPoint(0.0, 1.0))


def test_jump_multipliers_on_flat_interface():
    flat = np.zeros(16)
    npt.assert_allclose(z_jump(2, flat), 1.0)
    for i in (1, 3, 4):
        npt.assert_allclose(z_jump(i, flat), 0.0)
    with pytest.raises(ValueError):
        z_jump(5, flat)


def test_z1_jump_relation_from_above():
    f = InterfaceProfile.from_modes(32, [(1, 0.2, 0.0)])
    phi = np.cos(f.xi)
    j = 5
    evaluator = FieldEvaluator(f, refine=64)
    x1 = f.xi[j]
    values = [evaluator.z(1, phi, x1, f.samples[j] + d)[0] for d in (0.04, 0.02, 0.01)]
    expected = trace_ops(f).b1(phi)[j] + z_jump(1, f)[j] * phi[j]
    assert _extrapolate(values) == pytest.approx(expected, abs=1e-3)


def test_flat_interface_carries_no_flow(contrast):
    f = InterfaceProfile.zeros(32)
    beta = solve_density(f, contrast)
    field = eval_fields(f, beta, contrast, KernelPoint(0.3, 0.7))
    npt.assert_allclose(field.velocity, 0.0, atol=1e-14)
    assert field.pressure == pytest.approx(0.0, abs=1e-14)
    assert field.side == 1
    assert field.stress is None


def test_point_on_interface_is_rejected(contrast):
    f = InterfaceProfile.zeros(32)
    beta = solve_density(f, contrast)
    with pytest.raises(ValueError, match="interface"):
        eval_fields(f, beta, contrast, KernelPoint(0.1, 0.0))


def test_fields_need_density_and_parameters():
    with pytest.raises(ValueError):
        FieldEvaluator(np.zeros(16)).fields(0.0, 1.0)


def test_far_field_pressure_is_the_hydrostatic_offset(contrast):
    f = InterfaceProfile.from_modes(32, [(1, 0.3, 0.0)], mean=0.2)
    beta = solve_density(f, contrast)
    c3 = far_field_constants(f, beta, contrast).c3
    assert c3 == pytest.approx(-0.5 * contrast.theta() * 0.2)
    evaluator = FieldEvaluator(f, (beta.beta1, beta.beta2), contrast)
    x1 = np.array([-2.0, 0.5, 1.7])
    _, _, above, side_above = evaluator.fields(x1, np.full(3, 12.0))
    _, _, below, side_below = evaluator.fields(x1, np.full(3, -12.0))
    npt.assert_allclose(above, c3, atol=1e-4)
    npt.assert_allclose(below, -c3, atol=1e-4)
    assert np.all(side_above == 1) and np.all(side_below == -1)


def test_velocity_trace_is_scaled_density(contrast):
    f = InterfaceProfile.from_modes(32, [(1, 0.2, 0.0)])
    beta = solve_density(f, contrast)
    evaluator = FieldEvaluator(f, (beta.beta1, beta.beta2), contrast, refine=16)
    j = 5
    x1 = np.full(3, f.xi[j])
    x2 = f.samples[j] + np.array([0.1, 0.05, 0.025])
    v1, v2, _, side = evaluator.fields(x1, x2)
    assert np.all(side == 1)
    scale = 2.0 / contrast.mu_sum
    assert _extrapolate(v1) == pytest.approx(scale * beta.beta1[j], abs=1e-3)
    assert _extrapolate(v2) == pytest.approx(scale * beta.beta2[j], abs=1e-3)


def test_stress_is_symmetric(contrast, wavy):
    beta = solve_density(wavy, contrast)
    field = eval_fields(wavy, beta, contrast, KernelPoint(0.2, 1.2), with_stress=True)
    assert field.stress.shape == (2, 2)
    npt.assert_allclose(field.stress, field.stress.T, atol=1e-12)
    assert not field.in_collar


def test_double_layer_velocity_jumps_by_its_density():
    f = InterfaceProfile.from_modes(32, [(1, 0.2, 0.0)])
    beta1 = np.cos(f.xi) - 0.3
    beta2 = 0.5 * np.sin(f.xi) + 0.2
    evaluator = FieldEvaluator(f, refine=16)
    j = 5
    x1 = np.full(3, f.xi[j])
    d = np.array([0.1, 0.05, 0.025])
    above = evaluator.density_jump_velocity(beta1, beta2, x1, f.samples[j] + d)
    below = evaluator.density_jump_velocity(beta1, beta2, x1, f.samples[j] - d)
    jump = [_extrapolate(up) - _extrapolate(down) for up, down in zip(above, below)]
    assert jump[0] == pytest.approx(beta1[j], abs=1e-3)
    assert jump[1] == pytest.approx(beta2[j], abs=1e-3)


def test_bulk_velocity_is_divergence_free(contrast, skewed):
    beta = solve_density(skewed, contrast)
    evaluator = FieldEvaluator(skewed, (beta.beta1, beta.beta2), contrast)
    x1 = np.array([-2.5, -0.4, 1.1, 2.8])
    x2 = np.array([1.0, -1.0, 1.6, -1.4])
    h = 1e-4
    right = evaluator.fields(x1 + h, x2)[0]
    left = evaluator.fields(x1 - h, x2)[0]
    up = evaluator.fields(x1, x2 + h)[1]
    down = evaluator.fields(x1, x2 - h)[1]
    divergence = (right - left) / (2 * h) + (up - down) / (2 * h)
    npt.assert_allclose(divergence, 0.0, atol=1e-6)


def test_eval_Z_flags_points_inside_the_collar():
    f = InterfaceProfile.zeros(16)
    phi = np.ones(16)
    near = eval_Z(2, f, phi, KernelPoint(0.3, 0.05))
    far = eval_Z(2, f, phi, KernelPoint(0.3, 1.0))
    assert near.in_collar
    assert not far.in_collar
    assert far.value == pytest.approx(1.0, abs=1e-6)
