"""Composite trace operators, the double-layer operator, the right-hand side 𝒱(f) and bulk fields."""

import logging
from dataclasses import dataclass

import numpy as np

from .kernels import LN4, stokeslet_values, z_values
from .models import FluidParams
from .operators import OperatorMatrix, OperatorSpec, assemble_B0, b_kernel, quadrature_matrix
from .profile import InterfaceProfile, derivative, grid, product, resample

logger = logging.getLogger(__name__)

# Signed sums of B_{n,m}^{p,q}(f|f)[f, ·], as (coefficient, n, m, p, q).
COMPOSITES: dict[str, tuple[tuple[float, int, int, int, int], ...]] = {
    "b1": ((1, 0, 1, 0, 0), (-1, 2, 1, 2, 0)),
    "b2": ((1, 1, 1, 0, 0), (1, 1, 1, 2, 0)),
    "b3": (
        (1, 0, 2, 0, 1), (1, 0, 2, 2, 1), (-1, 2, 2, 0, 1), (-2, 2, 2, 2, 1),
        (-1, 2, 2, 4, 1), (1, 4, 2, 2, 1), (1, 4, 2, 4, 1),
    ),
    "b4": ((1, 1, 2, 0, 1), (1, 1, 2, 2, 1), (-1, 3, 2, 2, 1), (-1, 3, 2, 4, 1)),
    "b5": ((2, 0, 1, 1, 1), (-2, 2, 1, 3, 1)),
    "b6": ((2, 1, 1, 1, 1), (2, 1, 1, 3, 1)),
}


@dataclass(frozen=True, eq=False)
class TraceOperators:
    b0: OperatorMatrix
    b1: OperatorMatrix
    b2: OperatorMatrix
    b3: OperatorMatrix
    b4: OperatorMatrix
    b5: OperatorMatrix
    b6: OperatorMatrix

    @property
    def n(self) -> int:
        return self.b1.n


def _samples(f: InterfaceProfile | np.ndarray) -> np.ndarray:
    return f.samples if isinstance(f, InterfaceProfile) else np.asarray(f, dtype=float)


def trace_ops(f: InterfaceProfile | np.ndarray) -> TraceOperators:
    """Assemble B₀ and the composites B₁…B₆ with every slot equal to f."""
    samples = _samples(f)
    kernels: dict[tuple[int, int, int, int], np.ndarray] = {}
    assembled = {}
    for name, terms in COMPOSITES.items():
        total = 0.0
        for coef, n, m, p, q in terms:
            key = (n, m, p, q)
            if key not in kernels:
                kernels[key] = b_kernel(OperatorSpec.uniform(samples, n, m, p, q))
            total = total + coef * kernels[key]
        assembled[name] = quadrature_matrix(total, 1.0)
    return TraceOperators(b0=assemble_B0(samples), **assembled)


@dataclass(frozen=True, eq=False)
class DoubleLayerOperator:
    """2×2 block operator on densities stacked as (β₁, β₂)."""

    d11: np.ndarray
    d12: np.ndarray
    d21: np.ndarray
    d22: np.ndarray

    @property
    def n(self) -> int:
        return self.d11.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return np.block([[self.d11, self.d12], [self.d21, self.d22]])

    def __call__(self, beta1: np.ndarray, beta2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.d11 @ beta1 + self.d12 @ beta2, self.d21 @ beta1 + self.d22 @ beta2

    def weighted_transpose(self) -> "DoubleLayerOperator":
        return DoubleLayerOperator(self.d11.T, self.d21.T, self.d12.T, self.d22.T)


def double_layer(f: InterfaceProfile | np.ndarray, ops: TraceOperators | None = None) -> DoubleLayerOperator:
    """𝔻(f)β = −½[[B₂+B₃, 2B₄], [2B₄, B₂−B₃]]β + ½[[2B₁−2B₄, B₂+B₃], [B₂+B₃, 2B₄]](f′β)."""
    samples = _samples(f)
    ops = ops or trace_ops(samples)
    fp = derivative(samples, 1)
    b1, b2, b3, b4 = (ops.b1.entries, ops.b2.entries, ops.b3.entries, ops.b4.entries)
    # right multiplication by diag(f′)
    off = -b4 + 0.5 * (b2 + b3) * fp[None, :]
    return DoubleLayerOperator(
        d11=-0.5 * (b2 + b3) + (b1 - b4) * fp[None, :],
        d12=off,
        d21=off.copy(),
        d22=-0.5 * (b2 - b3) + b4 * fp[None, :],
    )


def double_layer_adjoint(f: InterfaceProfile | np.ndarray, ops: TraceOperators | None = None) -> DoubleLayerOperator:
    """𝔻(f)*γ = ½[[B₂+B₃, 2B₄], [2B₄, B₂−B₃]]γ − (f′/2)[[2B₁−2B₄, B₂+B₃], [B₂+B₃, 2B₄]]γ."""
    samples = _samples(f)
    ops = ops or trace_ops(samples)
    fp = derivative(samples, 1)[:, None]
    b1, b2, b3, b4 = (ops.b1.entries, ops.b2.entries, ops.b3.entries, ops.b4.entries)
    off = b4 - 0.5 * fp * (b2 + b3)
    return DoubleLayerOperator(
        d11=0.5 * (b2 + b3) - fp * (b1 - b4),
        d12=off,
        d21=off.copy(),
        d22=0.5 * (b2 - b3) - fp * b4,
    )


@dataclass(frozen=True, eq=False)
class RhsV:
    v1: np.ndarray
    v2: np.ndarray

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.v1, self.v2])

    def sup_norm(self) -> float:
        return float(max(np.max(np.abs(self.v1)), np.max(np.abs(self.v2))))


def capillary_phi(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """φ(f) = (1/ω − 1, f′/ω)."""
    fp = derivative(samples, 1)
    omega = np.sqrt(1.0 + fp**2)
    return 1.0 / omega - 1.0, fp / omega


def rhs_V(
    f: InterfaceProfile | np.ndarray,
    params: FluidParams,
    ops: TraceOperators | None = None,
    dealias: bool = False,
) -> RhsV:
    """Right-hand side 𝒱(f), the trace of the capillary and gravity single layer."""
    samples = _samples(f)
    ops = ops or trace_ops(samples)
    fp = derivative(samples, 1)
    phi1, phi2 = capillary_phi(samples)
    fp_phi1 = product(fp, phi1, dealias)
    fp_phi2 = product(fp, phi2, dealias)
    ffp = product(samples, fp, dealias)

    B0, B1, B2, B3, B4, B5, B6 = (
        ops.b0.entries, ops.b1.entries, ops.b2.entries, ops.b3.entries,
        ops.b4.entries, ops.b5.entries, ops.b6.entries,
    )
    v1 = (B1 - 2 * B4) @ (phi1 - fp_phi2) + (2 * B2 + B3) @ fp_phi1 + B3 @ phi2
    v2 = B1 @ (phi2 - fp_phi1) + B3 @ (phi1 - fp_phi2) + 2 * B4 @ (fp_phi1 + phi2)
    v3 = (B0 + B6) @ ffp + B5 @ samples
    v4 = (B0 - B6) @ samples + B5 @ ffp

    sigma, theta = params.sigma, params.theta()
    mean_f = float(np.mean(samples))
    return RhsV(
        v1=0.25 * (-sigma * v1 - theta * v3),
        v2=0.25 * (-sigma * v2 + theta * v4 + theta * LN4 * mean_f),
    )


def single_layer_density(samples: np.ndarray, params: FluidParams) -> tuple[np.ndarray, np.ndarray]:
    """G(f) = Θ(−ff′, f) − σφ(f)′."""
    fp = derivative(samples, 1)
    phi1, phi2 = capillary_phi(samples)
    theta, sigma = params.theta(), params.sigma
    return (
        -theta * samples * fp - sigma * derivative(phi1, 1),
        theta * samples - sigma * derivative(phi2, 1),
    )


def z_jump(i: int, f: InterfaceProfile | np.ndarray) -> np.ndarray:
    """Multiplier J_i with Z_i(f)[φ] → B_i(f)[φ] ± J_i φ from above/below Γ."""
    fp = derivative(_samples(f), 1)
    w2 = 1.0 + fp**2
    table = {
        1: -2.0 * fp * w2,
        2: 2.0 * w2,
        3: -4.0 * fp**2,
        4: fp - fp**3,
    }
    if i not in table:
        raise ValueError(f"jump multipliers exist for Z_1..Z_4, got {i}")
    return table[i] / (2.0 * w2**2)


@dataclass(frozen=True, eq=False)
class BulkField:
    """Velocity, pressure and optional stress at one point off the interface."""

    x1: float
    x2: float
    velocity: np.ndarray
    pressure: float
    side: int
    in_collar: bool = False
    stress: np.ndarray | None = None


class FieldEvaluator:
    """Off-interface evaluation of the layer potentials by the trapezoid rule.

    Densities are spectrally upsampled by ``refine`` before quadrature, which
    shrinks the collar around Γ where the rule is not trusted.
    """

    chunk = 256

    def __init__(
        self,
        f: InterfaceProfile | np.ndarray,
        beta: tuple[np.ndarray, np.ndarray] | None = None,
        params: FluidParams | None = None,
        refine: int = 4,
    ):
        self.profile = f if isinstance(f, InterfaceProfile) else InterfaceProfile(f)
        self.params = params
        self.m = self.profile.n * refine
        self.collar = 2.0 * np.pi / self.m
        self.nodes = grid(self.m)
        self.height = resample(self.profile.samples, self.m)
        self.slope = derivative(self.height, 1)

        if params is not None and beta is not None:
            g1, g2 = single_layer_density(self.profile.samples, params)
            self._g = (resample(g1, self.m), resample(g2, self.m))
            density = 2.0 * params.a_mu()
            self._dl = self._double_layer_densities(
                resample(density * beta[0], self.m), resample(density * beta[1], self.m)
            )
        else:
            self._g = None
            self._dl = None

    def _double_layer_densities(self, beta1: np.ndarray, beta2: np.ndarray) -> dict:
        return {
            "b1": beta1,
            "b2": beta2,
            "fb1": self.slope * beta1,
            "fb2": self.slope * beta2,
            "db1": derivative(beta1, 1),
            "db2": derivative(beta2, 1),
        }

    def _chunks(self, x1: np.ndarray, x2: np.ndarray):
        for start in range(0, x1.size, self.chunk):
            stop = start + self.chunk
            r1 = x1[start:stop, None] - self.nodes[None, :]
            r2 = x2[start:stop, None] - self.height[None, :]
            yield slice(start, stop), r1, r2

    def gap(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        """Signed vertical distance x₂ − f(x₁)."""
        return x2 - self.profile.evaluate(x1)

    def z(self, i: int, phi: np.ndarray, x1, x2) -> np.ndarray:
        """Z_i(f)[φ](x) = (1/2π)∫ z_i(x − (s, f(s))) φ(s) ds."""
        x1, x2 = np.atleast_1d(np.asarray(x1, float)), np.atleast_1d(np.asarray(x2, float))
        phi = resample(np.asarray(phi, float), self.m)
        out = np.empty(x1.size)
        for idx, r1, r2 in self._chunks(x1.ravel(), x2.ravel()):
            out[idx] = z_values(r1, r2)[i] @ phi / self.m
        return out.reshape(x1.shape)

    def double_layer_velocity(self, dl: dict, x1: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Velocity and pressure of the double layer with the given densities."""
        v1 = np.empty(x1.size)
        v2 = np.empty(x1.size)
        q = np.empty(x1.size)
        for idx, r1, r2 in self._chunks(x1, x2):
            zz = z_values(r1, r2) / self.m
            Z1, Z2, Z3, Z4 = zz[1], zz[2], zz[3], zz[4]
            v1[idx] = 0.5 * ((Z2 + Z3) @ dl["b1"] + 2 * Z4 @ dl["b2"]) - 0.5 * (
                (2 * Z1 - 2 * Z4) @ dl["fb1"] + (Z2 + Z3) @ dl["fb2"]
            )
            v2[idx] = 0.5 * (2 * Z4 @ dl["b1"] + (Z2 - Z3) @ dl["b2"]) - 0.5 * (
                (Z2 + Z3) @ dl["fb1"] + 2 * Z4 @ dl["fb2"]
            )
            q[idx] = Z1 @ dl["db2"] - Z2 @ dl["db1"]
        return v1, v2, q

    def single_layer(self, x1: np.ndarray, x2: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g1, g2 = self._g
        weight = 2.0 * np.pi / self.m
        v1 = np.empty(x1.size)
        v2 = np.empty(x1.size)
        q = np.empty(x1.size)
        for idx, r1, r2 in self._chunks(x1, x2):
            U, P = stokeslet_values(r1, r2)
            v1[idx] = weight * (U[0, 0] @ g1 + U[0, 1] @ g2)
            v2[idx] = weight * (U[1, 0] @ g1 + U[1, 1] @ g2)
            q[idx] = weight * (P[0] @ g1 + P[1] @ g2)
        return v1, v2, q

    def density_jump_velocity(self, beta1: np.ndarray, beta2: np.ndarray, x1, x2) -> tuple[np.ndarray, np.ndarray]:
        """Double-layer velocity of an arbitrary density (β₁, β₂)."""
        x1, x2 = np.atleast_1d(np.asarray(x1, float)), np.atleast_1d(np.asarray(x2, float))
        dl = self._double_layer_densities(resample(beta1, self.m), resample(beta2, self.m))
        v1, v2, _ = self.double_layer_velocity(dl, x1.ravel(), x2.ravel())
        return v1.reshape(x1.shape), v2.reshape(x1.shape)

    def fields(self, x1, x2) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Velocity components, pressure and side (±1) at arrays of points."""
        if self._g is None:
            raise ValueError("field evaluation needs a density and fluid parameters")
        x1 = np.atleast_1d(np.asarray(x1, float))
        x2 = np.atleast_1d(np.asarray(x2, float))
        shape = x1.shape
        x1, x2 = x1.ravel(), x2.ravel()
        gap = self.gap(x1, x2)
        if np.any(np.abs(gap) < 1e-12):
            raise ValueError("evaluation point lies on the interface; side is ambiguous")
        inside = np.abs(gap) < self.collar
        if np.any(inside):
            logger.warning("%d evaluation point(s) inside the quadrature collar", int(inside.sum()))
        side = np.where(gap > 0, 1, -1)

        s1, s2, sq = self.single_layer(x1, x2)
        d1, d2, dq = self.double_layer_velocity(self._dl, x1, x2)
        mu = np.where(side > 0, self.params.mu_plus, self.params.mu_minus)
        v1 = (s1 + d1) / mu
        v2 = (s2 + d2) / mu
        q = sq + dq
        return v1.reshape(shape), v2.reshape(shape), q.reshape(shape), side.reshape(shape)

    def stress(self, x1: float, x2: float, h: float = 1e-5) -> np.ndarray:
        """−qI + μ(∇v + ∇vᵀ) by central differences."""
        px = np.array([x1 + h, x1 - h, x1, x1, x1])
        py = np.array([x2, x2, x2 + h, x2 - h, x2])
        v1, v2, q, side = self.fields(px, py)
        grad = np.array([
            [(v1[0] - v1[1]) / (2 * h), (v1[2] - v1[3]) / (2 * h)],
            [(v2[0] - v2[1]) / (2 * h), (v2[2] - v2[3]) / (2 * h)],
        ])
        mu = self.params.mu_plus if side[4] > 0 else self.params.mu_minus
        return -q[4] * np.eye(2) + mu * (grad + grad.T)


@dataclass(frozen=True)
class ZValue:
    """Z_i(f)[φ] at one point; ``in_collar`` marks values the quadrature does not vouch for."""

    value: float
    in_collar: bool = False


def eval_Z(i: int, f: InterfaceProfile, phi: np.ndarray, x, refine: int = 4) -> ZValue:
    """Z_i(f)[φ] at one point off Γ, flagged when it lies inside the collar."""
    if i not in (1, 2, 3, 4):
        raise ValueError(f"Z operators are indexed 1..4, got {i}")
    evaluator = FieldEvaluator(f, refine=refine)
    in_collar = bool(abs(evaluator.gap(np.array([x.x1]), np.array([x.x2]))[0]) < evaluator.collar)
    if in_collar:
        logger.warning("Z_%d evaluated inside the collar at (%g, %g)", i, x.x1, x.x2)
    return ZValue(float(evaluator.z(i, phi, x.x1, x.x2)[0]), in_collar)


def eval_fields(
    f: InterfaceProfile,
    beta,
    params: FluidParams,
    x,
    refine: int = 4,
    with_stress: bool = False,
) -> BulkField:
    """Velocity and pressure of the two-phase flow at a point off Γ."""
    evaluator = FieldEvaluator(f, (beta.beta1, beta.beta2), params, refine=refine)
    v1, v2, q, side = evaluator.fields(x.x1, x.x2)
    gap = evaluator.gap(np.array([x.x1]), np.array([x.x2]))[0]
    return BulkField(
        x1=x.x1,
        x2=x.x2,
        velocity=np.array([v1[0], v2[0]]),
        pressure=float(q[0]),
        side=int(side[0]),
        in_collar=bool(abs(gap) < evaluator.collar),
        stress=evaluator.stress(x.x1, x.x2) if with_stress else None,
    )
