"""The evolution operator Ψ(f) and time integration of df/dt = Ψ(f)."""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .config import TimeStepperConfig
from .models import FluidParams
from .profile import InterfaceProfile, derivative
from .solver import SolveError, TractionDensity, far_field_constants, solve_density

logger = logging.getLogger(__name__)


def psi(f: InterfaceProfile, params: FluidParams, dealias: bool = False) -> np.ndarray:
    """Normal velocity of the interface, Ψ(f) = (2/(μ⁺+μ⁻))(β₂ − f′β₁)."""
    beta = solve_density(f, params, dealias=dealias)
    return psi_from_density(f, beta, params)


def psi_from_density(f: InterfaceProfile, beta: TractionDensity, params: FluidParams) -> np.ndarray:
    fp = derivative(f.samples, 1)
    return 2.0 / params.mu_sum * (beta.beta2 - fp * beta.beta1)


@dataclass(frozen=True)
class Diagnostics:
    mean: float
    amp_max: float
    slope_max: float
    amplitudes: np.ndarray
    c1: float
    c3: float


@dataclass(frozen=True, eq=False)
class EvolutionState:
    """A point of a trajectory.

    ``memory`` holds the previous profile and explicit term (rfft space) for the
    two-step scheme; it is empty after a one-step scheme. ``dt`` is the step
    that produced this state.
    """

    t: float
    profile: InterfaceProfile
    params: FluidParams
    modes: int = 8
    dt: float | None = None
    memory: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @cached_property
    def diagnostics(self) -> Diagnostics:
        f = self.profile
        beta = solve_density(f, self.params)
        constants = far_field_constants(f, beta, self.params)
        return Diagnostics(
            mean=f.mean(),
            amp_max=f.sup_norm(),
            slope_max=float(np.max(np.abs(f.derivative(1)))),
            amplitudes=f.amplitudes(self.modes),
            c1=constants.c1,
            c3=constants.c3,
        )


class BreakdownError(RuntimeError):
    """The trajectory left the regime where the graph and quadrature can be trusted."""

    def __init__(self, reason: str, state: EvolutionState, trajectory: list[EvolutionState] | None = None):
        super().__init__(f"breakdown at t={state.t:.6g}: {reason}")
        self.reason = reason
        self.state = state
        self.trajectory = trajectory or [state]


def _explicit(f: np.ndarray, params: FluidParams, config: TimeStepperConfig, symbol: np.ndarray) -> np.ndarray:
    """Ψ(f) + α₀Λf with the mean of Ψ projected out, in rfft space."""
    velocity = psi(InterfaceProfile(f), params, dealias=config.dealias)
    velocity = velocity - np.mean(velocity)
    rhs = np.fft.rfft(velocity) + params.alpha0 * symbol * np.fft.rfft(f)
    rhs[0] = 0.0
    return rhs


def default_dt(f0: InterfaceProfile, params: FluidParams) -> float:
    slope = float(np.max(np.abs(f0.derivative(1))))
    return 0.5 * (2.0 * np.pi / f0.n) / params.alpha0 / max(1.0, slope)


def stability_limit(n: int, params: FluidParams, cfl: float) -> float:
    """Largest explicit step c·(2π/n)/α₀."""
    return cfl * (2.0 * np.pi / n) / params.alpha0


def _check_explicit_step(dt: float, n: int, params: FluidParams, config: TimeStepperConfig) -> None:
    limit = stability_limit(n, params, config.cfl)
    if dt > limit:
        raise ValueError(f"dt={dt:.3g} exceeds the explicit limit {limit:.3g}")


def _check(state: EvolutionState, config: TimeStepperConfig) -> str | None:
    samples = state.profile.samples
    if not np.all(np.isfinite(samples)):
        return "non-finite profile"
    amp = float(np.max(np.abs(samples)))
    if amp > config.amp_cap:
        return f"|f| = {amp:.3g} exceeds cap {config.amp_cap:g}"
    slope = float(np.max(np.abs(derivative(samples, 1))))
    if slope > config.slope_cap:
        return f"|f'| = {slope:.3g} exceeds cap {config.slope_cap:g}"
    return None


def step(state: EvolutionState, config: TimeStepperConfig, params: FluidParams, dt: float | None = None) -> EvolutionState:
    """Advance one step with the configured scheme.

    Raises:
        ValueError: For an rk4-explicit step above the explicit limit.
        BreakdownError: On a non-finite state, a failed density solve, or a cap violation.
    """
    dt = dt or config.dt or default_dt(state.profile, params)
    f = np.array(state.profile.samples)
    n = f.size
    if config.scheme == "rk4-explicit":
        _check_explicit_step(dt, n, params, config)
    symbol = np.arange(n // 2 + 1, dtype=float)
    implicit = params.alpha0 * symbol
    memory = None

    try:
        if config.scheme == "rk4-explicit":
            def rate(u):
                return np.fft.irfft(_explicit(u, params, config, symbol) - implicit * np.fft.rfft(u), n=n)

            k1 = rate(f)
            k2 = rate(f + 0.5 * dt * k1)
            k3 = rate(f + 0.5 * dt * k2)
            k4 = rate(f + dt * k3)
            new = f + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        else:
            explicit = _explicit(f, params, config, symbol)
            f_hat = np.fft.rfft(f)
            if config.scheme == "imex2" and state.memory is not None:
                prev_hat, prev_explicit = state.memory
                new_hat = (4.0 * f_hat - prev_hat + 2.0 * dt * (2.0 * explicit - prev_explicit)) / (
                    3.0 + 2.0 * dt * implicit
                )
            else:
                new_hat = (f_hat + dt * explicit) / (1.0 + dt * implicit)
            # mode 0 is untouched by the implicit solve and the projected explicit term
            new_hat[0] = f_hat[0]
            new = np.fft.irfft(new_hat, n=n)
            if config.scheme == "imex2":
                memory = (f_hat, explicit)
    except SolveError as exc:
        raise BreakdownError(f"density solve failed: {exc}", state) from exc

    if not np.all(np.isfinite(new)):
        raise BreakdownError("non-finite profile", state)
    candidate = EvolutionState(
        t=state.t + dt,
        profile=InterfaceProfile(new),
        params=params,
        modes=state.modes,
        dt=dt,
        memory=memory,
    )
    reason = _check(candidate, config)
    if reason:
        raise BreakdownError(reason, state)
    return candidate


def simulate(
    f0: InterfaceProfile,
    config: TimeStepperConfig,
    params: FluidParams,
    start: EvolutionState | None = None,
) -> list[EvolutionState]:
    """Integrate to ``config.t_end``, recording every ``config.stride`` steps.

    Args:
        f0: Initial profile (ignored when ``start`` is given).
        config: Stepper settings.
        params: Fluid parameters.
        start: Resume from this state, keeping its multistep memory.

    Returns:
        Recorded states, the first and last included.

    Raises:
        BreakdownError: With the partial trajectory attached.
    """
    state = start or EvolutionState(t=0.0, profile=f0, params=params, modes=config.modes)
    dt = (start.dt if start is not None else None) or config.dt or default_dt(state.profile, params)
    remaining = config.t_end - state.t
    steps = 0
    if remaining > 0:
        ratio = remaining / dt
        if start is not None and start.dt and abs(ratio - round(ratio)) < 1e-6:
            # resumed runs keep the step of the interrupted run
            steps = max(1, round(ratio))
        else:
            steps = max(1, int(np.ceil(ratio - 1e-9)))
            dt = remaining / steps

    if config.scheme == "rk4-explicit":
        _check_explicit_step(dt, state.profile.n, params, config)
    logger.info("simulate: scheme=%s n=%d dt=%.3e steps=%d", config.scheme, state.profile.n, dt, steps)

    trajectory = [state]
    for index in range(1, steps + 1):
        try:
            state = step(state, config, params, dt=dt)
        except BreakdownError as exc:
            exc.trajectory = trajectory if trajectory[-1] is exc.state else trajectory + [exc.state]
            raise
        if index % config.stride == 0 or index == steps:
            trajectory.append(state)
    return trajectory
