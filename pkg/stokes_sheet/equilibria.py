"""Flat-state spectrum, finger equilibria, branch continuation and their stability."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import LinAlgError, eigvals, null_space, solve
from scipy.special import beta

from .evolution import psi
from .models import FluidParams
from .profile import InterfaceProfile, derivative, grid

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-11
MAX_NEWTON = 50
MAX_HALVINGS = 6
SMALL_AMPLITUDE = 0.1


class ConvergenceError(RuntimeError):
    """Newton's method did not reach the residual target."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    params: FluidParams
    analytic: np.ndarray
    numeric: np.ndarray
    matched: np.ndarray
    theta0: float
    classification: Literal["stable", "unstable", "marginal"]

    @property
    def K(self) -> int:
        return self.analytic.size


@dataclass(frozen=True, eq=False)
class BranchPoint:
    ell: int
    s: float
    lam: float
    profile: InterfaceProfile
    residual: float
    stability: float | None = None
    regime: str = field(init=False)

    def __post_init__(self):
        regime = "small-amplitude" if abs(self.s) <= SMALL_AMPLITUDE else "beyond proven regime"
        object.__setattr__(self, "regime", regime)

    @property
    def amplitude(self) -> float:
        return self.profile.sup_norm()

    @property
    def slope_max(self) -> float:
        return float(np.max(np.abs(self.profile.derivative(1))))


def analytic_eigenvalue(params: FluidParams, k: int | np.ndarray) -> np.ndarray:
    """λ_k = −(Θ + σk²)/(2(μ⁺+μ⁻)k)."""
    k = np.asarray(k, dtype=float)
    return -(params.theta() + params.sigma * k**2) / (2.0 * params.mu_sum * k)


def theta0(params: FluidParams) -> float:
    """Exponential decay rate bound of the flat state."""
    sigma, theta = params.sigma, params.theta()
    if sigma >= theta:
        return (sigma + theta) / (2.0 * params.mu_sum)
    return float(np.sqrt(sigma * theta)) / params.mu_sum


def classify(params: FluidParams) -> Literal["stable", "unstable", "marginal"]:
    total = params.sigma + params.theta()
    if total > 0:
        return "stable"
    if total < 0:
        return "unstable"
    return "marginal"


def lambda_star() -> float:
    """Lower end B(3/4, 1/2)²/(2π²) of the finger branches' λ-range."""
    return float(beta(0.75, 0.5) ** 2 / (2.0 * np.pi**2))


def jacobian(
    f: InterfaceProfile,
    params: FluidParams,
    h: float | None = None,
    workers: int | None = None,
    dealias: bool = False,
) -> np.ndarray:
    """Central-difference Jacobian of Ψ at f on the grid basis.

    Columns are independent Ψ evaluations and run in a thread pool.
    """
    n = f.n
    h = h or 1e-6 * max(1.0, f.sup_norm())
    base = np.array(f.samples)

    def column(j: int) -> np.ndarray:
        e = np.zeros(n)
        e[j] = h
        plus = psi(InterfaceProfile(base + e), params, dealias=dealias)
        minus = psi(InterfaceProfile(base - e), params, dealias=dealias)
        return (plus - minus) / (2.0 * h)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        columns = list(pool.map(column, range(n)))
    return np.column_stack(columns)


def zero_mean_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of the restriction to zero-mean grid functions, by decreasing real part."""
    n = matrix.shape[0]
    basis = null_space(np.ones((1, n)))
    try:
        values = eigvals(basis.T @ matrix @ basis)
    except LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}", np.inf, 0) from exc
    return values[np.argsort(-values.real, kind="stable")]


def flat_spectrum(params: FluidParams, K: int, n: int | None = None, workers: int | None = None) -> SpectrumReport:
    """Analytic and numeric spectrum of the linearization at f = 0.

    Args:
        params: Fluid parameters.
        K: Number of modes to report.
        n: Grid size of the numeric Jacobian; defaults to the smallest power of two above 8K.
        workers: Thread count for the Jacobian columns.

    Returns:
        The report with each analytic λ_k paired to its nearest numeric eigenvalue.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    n = n or max(16, 1 << int(np.ceil(np.log2(8 * K))))
    if K >= n // 2:
        raise ValueError(f"K={K} is not resolved on a grid of {n}")

    analytic = analytic_eigenvalue(params, np.arange(1, K + 1))
    numeric = zero_mean_eigenvalues(jacobian(InterfaceProfile.zeros(n), params, workers=workers))
    matched = np.array([numeric[np.argmin(np.abs(numeric - value))] for value in analytic])
    logger.info("flat spectrum: n=%d K=%d max rel err %.2e", n, K,
                float(np.max(np.abs(matched - analytic) / np.abs(analytic))) if np.all(analytic) else 0.0)
    return SpectrumReport(
        params=params,
        analytic=analytic,
        numeric=numeric,
        matched=matched,
        theta0=theta0(params),
        classification=classify(params),
    )


class _CosineBasis:
    """Even zero-mean functions Σ a_j cos(jℓξ) with jℓ < n/2."""

    def __init__(self, n: int, ell: int):
        if ell < 1:
            raise ValueError("ell must be at least 1")
        self.n = n
        self.ell = ell
        self.count = (n // 2 - 1) // ell
        if self.count < 1:
            raise ValueError(f"mode {ell} is not resolved on a grid of {n}")
        modes = ell * np.arange(1, self.count + 1)
        self.matrix = np.cos(np.outer(grid(n), modes))

    def profile(self, coeffs: np.ndarray) -> np.ndarray:
        return self.matrix @ coeffs

    def project(self, values: np.ndarray) -> np.ndarray:
        # exact for band-limited values: trapezoid sums of cos(jℓξ)²
        return 2.0 / self.n * (self.matrix.T @ values)


def capillarity_residual(lam: float, f: np.ndarray) -> np.ndarray:
    """F(λ, f) = (f′/ω)′ + λf on the grid."""
    fp = derivative(f, 1)
    return derivative(fp / np.sqrt(1.0 + fp**2), 1) + lam * f


def _linearized(lam: float, f: np.ndarray, basis: _CosineBasis) -> np.ndarray:
    """Coefficient matrix of h ↦ (h′/ω³)′ + λh on the basis."""
    fp = derivative(f, 1)
    weight = (1.0 + fp**2) ** -1.5
    columns = derivative(weight[:, None] * derivative(basis.matrix, 1), 1) + lam * basis.matrix
    return basis.project(columns)


def _sup(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


def solve_equilibrium(
    lam: float,
    f_guess: InterfaceProfile,
    ell: int = 1,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_NEWTON,
) -> InterfaceProfile:
    """Newton's method for F(λ, f) = 0 among even zero-mean profiles with period 2π/ℓ.

    Raises:
        ConvergenceError: After ``max_iter`` iterations, with the last residual.
    """
    basis = _CosineBasis(f_guess.n, ell)
    coeffs = basis.project(f_guess.samples)
    residual = np.inf
    for iteration in range(max_iter + 1):
        f = basis.profile(coeffs)
        values = capillarity_residual(lam, f)
        residual = _sup(values)
        logger.debug("newton λ=%.6g it=%d residual=%.3e", lam, iteration, residual)
        if residual <= tol:
            return InterfaceProfile(f)
        if iteration == max_iter or not np.isfinite(residual):
            break
        try:
            coeffs = coeffs - solve(_linearized(lam, f, basis), basis.project(values))
        except LinAlgError as exc:
            raise ConvergenceError(f"singular Newton system at λ={lam}: {exc}", residual, iteration) from exc
    raise ConvergenceError(
        f"no convergence at λ={lam} after {max_iter} iterations (residual {residual:.3e})", residual, max_iter
    )


def _correct(
    predicted: np.ndarray,
    tangent: np.ndarray,
    basis: _CosineBasis,
    tol: float,
    max_iter: int,
) -> tuple[np.ndarray, float]:
    """Newton on (F(λ, a), τ·(X − X_p)) = 0 for X = (λ, a)."""
    x = predicted.copy()
    residual = np.inf
    for _ in range(max_iter):
        lam, coeffs = x[0], x[1:]
        f = basis.profile(coeffs)
        values = capillarity_residual(lam, f)
        residual = _sup(values)
        constraint = float(tangent @ (x - predicted))
        if not np.isfinite(residual):
            break
        if residual <= tol and abs(constraint) <= tol:
            return x, residual
        system = np.zeros((x.size, x.size))
        system[:-1, 0] = coeffs
        system[:-1, 1:] = _linearized(lam, f, basis)
        system[-1] = tangent
        rhs = np.append(basis.project(values), constraint)
        try:
            x = x - solve(system, rhs)
        except LinAlgError as exc:
            raise ConvergenceError(f"singular corrector system: {exc}", residual, max_iter) from exc
    raise ConvergenceError(f"corrector failed (residual {residual:.3e})", residual, max_iter)


def continue_branch(
    ell: int,
    s_max: float,
    ds: float,
    n: int = 128,
    slope_cap: float = 15.0,
    params: FluidParams | None = None,
    stability_n: int = 64,
    workers: int | None = None,
    max_points: int = 2000,
) -> list[BranchPoint]:
    """Pseudo-arclength continuation of the ℓ-th branch from (ℓ², 0).

    ``ds < 0`` follows the mirrored half-branch. The step is halved when the
    corrector fails; after six consecutive halvings the branch is returned as
    far as it got.

    Args:
        ell: Mode number of the bifurcating branch.
        s_max: Stop once |s| reaches this cos(ℓξ) amplitude.
        ds: Arclength step.
        n: Grid size.
        slope_cap: Stop before ‖f′‖∞ exceeds this value.
        params: When given, each point gets the leading eigenvalue of the flow
            linearization with gravity set so that Θ = −σλ.
        stability_n: Grid size for the stability Jacobian.
        workers: Thread count for the stability Jacobian.
        max_points: Hard limit on the number of points.
    """
    if ds == 0.0:
        raise ValueError("ds must be nonzero")
    basis = _CosineBasis(n, ell)
    x = np.zeros(basis.count + 1)
    x[0] = float(ell**2)
    tangent = np.zeros_like(x)
    tangent[1] = np.sign(ds)
    step = abs(ds)

    def make_point(state: np.ndarray, residual: float) -> BranchPoint:
        profile = InterfaceProfile(basis.profile(state[1:]))
        stability = None
        if params is not None:
            point = BranchPoint(ell, float(state[1]), float(state[0]), profile, residual)
            stability = float(equilibrium_stability(
                point, params.with_lambda(point.lam), n=stability_n, count=1, workers=workers
            )[0].real)
        return BranchPoint(ell, float(state[1]), float(state[0]), profile, residual, stability)

    points = [make_point(x, 0.0)]
    halvings = 0
    while len(points) < max_points and abs(x[1]) < s_max:
        try:
            corrected, residual = _correct(x + step * tangent, tangent, basis, NEWTON_TOL, 25)
        except ConvergenceError as exc:
            halvings += 1
            if halvings > MAX_HALVINGS:
                logger.warning("branch ℓ=%d aborted at s=%.4g after %d halvings: %s",
                               ell, x[1], MAX_HALVINGS, exc)
                break
            step *= 0.5
            logger.info("branch ℓ=%d: halving step to %.3g at s=%.4g", ell, step, x[1])
            continue

        candidate = make_point(corrected, residual)
        if candidate.slope_max > slope_cap:
            logger.info("branch ℓ=%d stopped at slope cap %.3g (s=%.4g)", ell, slope_cap, x[1])
            break
        secant = corrected - x
        tangent = secant / np.linalg.norm(secant)
        x = corrected
        points.append(candidate)
        halvings = 0
        step = min(abs(ds), 2.0 * step)
    return points


def equilibrium_stability(
    point: BranchPoint,
    params: FluidParams,
    n: int | None = None,
    count: int = 4,
    workers: int | None = None,
) -> np.ndarray:
    """Eigenvalues of largest real part of the linearized flow at a branch point.

    Args:
        point: Equilibrium from ``continue_branch`` or ``solve_equilibrium``.
        params: Fluid parameters with Θ = −σλ at ``point.lam``.
        n: Grid size of the Jacobian; defaults to 64.
        count: Number of eigenvalues returned.
        workers: Thread count for the Jacobian columns.
    """
    if point.residual > 1e-10:
        raise ValueError(f"branch point residual {point.residual:.3e} is above 1e-10")
    expected = -params.sigma * point.lam
    if abs(params.theta() - expected) > 1e-9 * max(1.0, abs(expected)):
        raise ValueError(f"params give Θ={params.theta():.6g}, the equilibrium needs Θ={expected:.6g}")
    profile = point.profile.resample(n or 64)
    values = zero_mean_eigenvalues(jacobian(profile, params, workers=workers))
    if point.regime != "small-amplitude":
        logger.info("stability at s=%.4g is %s; eigenvalues are reported without a verdict", point.s, point.regime)
    return values[:count]


def rescale_equilibrium(profile: InterfaceProfile, lam: float, ell: int) -> tuple[InterfaceProfile, float]:
    """Map an equilibrium f at λ to ℓ⁻¹f(ℓ·) at ℓ²λ."""
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if np.any(profile.amplitudes(profile.n // 2 - 1)[profile.n // (2 * ell):] > 1e-12):
        logger.warning("rescaling by %d aliases resolved modes of the profile", ell)
    scaled = profile.evaluate(ell * profile.xi) / ell
    return InterfaceProfile(scaled), lam * ell**2
