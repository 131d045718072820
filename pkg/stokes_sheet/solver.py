"""Boundary integral equation for the traction density and the far-field constants."""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import LinAlgError, lu_factor, lu_solve
from scipy.linalg.lapack import dgecon

from .models import FluidParams
from .potentials import FieldEvaluator, TraceOperators, double_layer, rhs_V, trace_ops
from .profile import InterfaceProfile, derivative, grid

logger = logging.getLogger(__name__)

RESIDUAL_TARGET = 1e-10


class SolveError(RuntimeError):
    """The density solve missed its residual target."""

    def __init__(self, message: str, residual: float, condition: float):
        super().__init__(message)
        self.residual = residual
        self.condition = condition


@dataclass(frozen=True, eq=False)
class TractionDensity:
    beta1: np.ndarray
    beta2: np.ndarray
    residual: float = 0.0
    condition: float = 1.0

    @property
    def n(self) -> int:
        return self.beta1.size


@dataclass(frozen=True)
class FarFieldConstants:
    c1: float
    c2: float
    c3: float
    c1_single: float
    c1_double: float


def solve_density(
    f: InterfaceProfile,
    params: FluidParams,
    ops: TraceOperators | None = None,
    dealias: bool = False,
) -> TractionDensity:
    """Solve (1 + 2a_μ𝔻(f))β = 𝒱(f) at the collocation nodes.

    Args:
        f: Interface profile.
        params: Fluid parameters.
        ops: Trace operators of f, when already assembled.
        dealias: Form the products inside 𝒱 on a padded grid.

    Returns:
        The density with its residual and 1-norm condition estimate.

    Raises:
        SolveError: If ‖(I + 2a_μ𝔻)β − 𝒱‖∞ exceeds 1e−10‖𝒱‖∞.
    """
    ops = ops or trace_ops(f)
    rhs = rhs_V(f, params, ops, dealias=dealias).stacked()
    n = f.n
    a_mu = params.a_mu()
    if a_mu == 0.0:
        return TractionDensity(rhs[:n].copy(), rhs[n:].copy())

    system = np.eye(2 * n) + 2.0 * a_mu * double_layer(f, ops).matrix
    try:
        factors = lu_factor(system, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise SolveError(f"density system could not be factored: {exc}", np.inf, np.inf) from exc
    beta = lu_solve(factors, rhs)
    rcond, _ = dgecon(factors[0], np.linalg.norm(system, 1), norm="1")
    condition = 1.0 / rcond if rcond > 0 else np.inf

    residual = float(np.max(np.abs(system @ beta - rhs))) if rhs.size else 0.0
    scale = float(np.max(np.abs(rhs)))
    logger.debug("density solve: n=%d cond=%.3e residual=%.3e", n, condition, residual)
    if residual > RESIDUAL_TARGET * scale:
        raise SolveError(
            f"density residual {residual:.3e} above target (cond {condition:.3e})", residual, condition
        )
    return TractionDensity(beta[:n], beta[n:], residual=residual, condition=condition)


def far_field_constants(f: InterfaceProfile, beta: TractionDensity, params: FluidParams) -> FarFieldConstants:
    fp = derivative(f.samples, 1)
    omega = np.sqrt(1.0 + fp**2)
    c1_single = -0.5 * params.sigma * float(np.mean(fp / omega))
    c1_double = params.a_mu() * float(np.mean(beta.beta1 - fp * beta.beta2))
    return FarFieldConstants(
        c1=c1_single + c1_double,
        c2=0.0,
        c3=-0.5 * params.theta() * f.mean(),
        c1_single=c1_single,
        c1_double=c1_double,
    )


def vorticity_check(
    f: InterfaceProfile,
    beta: TractionDensity,
    params: FluidParams,
    L: float = 8.0,
    columns: int = 64,
    nodes: int = 64,
    refine: int = 4,
    h: float = 1e-4,
) -> float:
    """−μ⁺μ⁻/(2π(μ⁺+μ⁻)) times the vorticity integrated over |x₂| < L.

    Away from Γ, curl v is integrated column by column with Gauss–Legendre nodes
    in x₂ and the trapezoid rule in x₁. The strip of half-width d around Γ is
    closed by the circulation of v along its two boundary curves, which is legal
    because v is continuous across Γ.
    """
    evaluator = FieldEvaluator(f, (beta.beta1, beta.beta2), params, refine=refine)
    d = max(4.0 * evaluator.collar, 0.05)
    x1 = grid(columns)
    height = f.evaluate(x1)
    slope = InterfaceProfile(derivative(f.samples, 1)).evaluate(x1)
    if np.max(np.abs(height)) + d >= L:
        raise ValueError(f"truncation height L={L} does not clear the interface")

    def curl(px: np.ndarray, py: np.ndarray) -> np.ndarray:
        sx = np.concatenate([px + h, px - h, px, px])
        sy = np.concatenate([py, py, py + h, py - h])
        v1, v2, _, _ = evaluator.fields(sx, sy)
        k = px.size
        return (v2[:k] - v2[k:2 * k]) / (2 * h) - (v1[2 * k:3 * k] - v1[3 * k:]) / (2 * h)

    gl_nodes, gl_weights = leggauss(nodes)
    total = 0.0
    skipped = 0
    for lower, upper in ((height + d, np.full(columns, L)), (np.full(columns, -L), height - d)):
        half = 0.5 * (upper - lower)
        py = (lower[:, None] + half[:, None] * (gl_nodes[None, :] + 1.0)).ravel()
        px = np.repeat(x1, nodes)
        keep = np.abs(evaluator.gap(px, py)) >= evaluator.collar + h
        skipped += int(np.sum(~keep))
        values = np.zeros(px.size)
        values[keep] = curl(px[keep], py[keep])
        values = values.reshape(columns, nodes)
        total += float(np.sum((values @ gl_weights) * half)) * 2.0 * np.pi / columns

    # counterclockwise circulation around the strip |x₂ − f(x₁)| < d
    below = evaluator.fields(x1, height - d)
    above = evaluator.fields(x1, height + d)
    circulation = (below[0] + slope * below[1]) - (above[0] + slope * above[1])
    total += float(np.sum(circulation)) * 2.0 * np.pi / columns

    if skipped:
        logger.warning("vorticity integral skipped %d collar point(s)", skipped)
    logger.debug("vorticity integral: L=%g strip=%g value=%.6e", L, d, total)
    return -params.mu_plus * params.mu_minus / (2.0 * np.pi * params.mu_sum) * total
