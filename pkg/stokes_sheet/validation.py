"""Built-in oracle suite behind ``stokes-sheet validate``."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from jinja2 import Environment, FileSystemLoader
from scipy.integrate import quad
from scipy.linalg import svdvals

from . import __version__
from .equilibria import BranchPoint, flat_spectrum, lambda_star, solve_equilibrium
from .evolution import psi
from .models import FluidParams
from .operators import OperatorSpec, assemble_B, hilbert
from .potentials import double_layer, double_layer_adjoint
from .profile import InterfaceProfile, shift, translate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    error: float
    tolerance: float
    detail: str = ""

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.error)) and self.error <= self.tolerance


def _sup(values) -> float:
    return float(np.max(np.abs(values)))


def check_hilbert(n: int) -> ValidationCheck:
    xi = InterfaceProfile.zeros(n).xi
    matrix = assemble_B(OperatorSpec(0, 0, 0, 0, size=n))
    error = max(_sup(matrix(np.cos(k * xi)) - hilbert(np.cos(k * xi))) for k in range(1, min(17, n // 2)))
    return ValidationCheck("B(0,0,0,0) equals the Hilbert transform", error, 1e-10, "modes k <= 16")


def check_flat_double_layer(n: int) -> ValidationCheck:
    return ValidationCheck("double layer vanishes at f = 0", _sup(double_layer(np.zeros(n)).matrix), 1e-10)


def check_adjoint(n: int) -> ValidationCheck:
    f = InterfaceProfile.from_modes(n, [(1, 0.4, 0.0)])
    error = _sup(double_layer(f).weighted_transpose().matrix - double_layer_adjoint(f).matrix)
    return ValidationCheck("weighted transpose of the double layer is its adjoint", error, 1e-8, "f = 0.4 cos ξ")


def check_resolvent(n: int) -> ValidationCheck:
    f = InterfaceProfile.from_modes(n, [(1, 0.5, 0.0), (2, 0.0, 0.25)])
    smallest = float(svdvals(0.75 * np.eye(2 * n) - double_layer(f).matrix).min())
    # reported as a shortfall below the floor
    return ValidationCheck("0.75 − D(f) is invertible", max(0.0, 1e-3 - smallest), 0.0, f"σ_min = {smallest:.4g}")


def check_flat_spectrum(params: FluidParams, n: int, workers: int | None) -> ValidationCheck:
    K = n // 8
    report = flat_spectrum(params, K, n=n, workers=workers)
    error = float(np.max(np.abs(report.matched - report.analytic) / np.abs(report.analytic)))
    return ValidationCheck("flat-state eigenvalues match the analytic spectrum", error, 1e-6, f"K = {K}")


def check_lambda_star() -> ValidationCheck:
    integral, _ = quad(lambda t: 1.0, 0.0, 1.0, weight="alg", wvar=(-0.25, -0.5), epsabs=1e-14, epsrel=1e-14)
    oracle = integral**2 / (2.0 * np.pi**2)
    return ValidationCheck("λ* agrees with the Beta integral", abs(lambda_star() - oracle), 1e-10, f"λ* = {lambda_star():.6f}")


def check_mean(params: FluidParams, n: int) -> ValidationCheck:
    f = InterfaceProfile.from_modes(n, [(1, 0.3, 0.0), (2, 0.0, 0.1)])
    return ValidationCheck("Ψ has zero mean", abs(float(np.mean(psi(f, params)))), 1e-10)


def check_vertical_shift(params: FluidParams, n: int) -> ValidationCheck:
    f = InterfaceProfile.from_modes(n, [(1, 0.3, 0.0), (2, 0.0, 0.1)])
    error = _sup(psi(translate(f, c=0.7), params) - psi(f, params))
    return ValidationCheck("Ψ is invariant under vertical shifts", error, 1e-9, "c = 0.7")


def check_translation(params: FluidParams, n: int) -> ValidationCheck:
    f = InterfaceProfile.from_modes(n, [(1, 0.3, 0.0), (2, 0.0, 0.1)])
    a = 0.7
    error = _sup(psi(translate(f, a=a), params) - shift(psi(f, params), a))
    return ValidationCheck("Ψ commutes with horizontal shifts", error, 1e-8, f"a = {a}")


def check_equilibrium(params: FluidParams, n: int) -> ValidationCheck:
    s = 0.05
    lam = 1.0 - 0.375 * s**2
    profile = solve_equilibrium(lam, InterfaceProfile.from_modes(n, [(1, s, 0.0)]))
    point = BranchPoint(1, profile.cos_amplitude(1), lam, profile, 0.0)
    flow = params.model_copy(update={"rho_plus": params.rho_minus + 1.0}).with_lambda(point.lam)
    return ValidationCheck("equilibria are fixed points of Ψ", _sup(psi(profile, flow)), 1e-6, f"λ = {lam:.6f}")


def run_validation(
    params: FluidParams,
    n: int = 64,
    workers: int | None = None,
    progress: Callable[[str], None] | None = None,
) -> list[ValidationCheck]:
    """Run every oracle check and return the outcomes in order."""
    checks: list[Callable[[], ValidationCheck]] = [
        lambda: check_hilbert(max(n, 64)),
        lambda: check_flat_double_layer(n),
        lambda: check_adjoint(n),
        lambda: check_resolvent(n),
        lambda: check_flat_spectrum(params, n, workers),
        check_lambda_star,
        lambda: check_mean(params, n),
        lambda: check_vertical_shift(params, n),
        lambda: check_translation(params, n),
        lambda: check_equilibrium(params, n),
    ]
    results = []
    for check in checks:
        result = check()
        logger.info("%s: error %.3e (tol %.1e) %s", result.name, result.error, result.tolerance,
                    "ok" if result.passed else "FAILED")
        if progress:
            progress(result.name)
        results.append(result)
    return results


def render_report(checks: list[ValidationCheck], params: FluidParams, n: int) -> str:
    template_dir = Path(__file__).parent / "templates"
    env = Environment(loader=FileSystemLoader(template_dir), keep_trailing_newline=True)
    template = env.get_template("validation_report.md.j2")
    return template.render(
        checks=checks,
        params=params,
        n=n,
        version=__version__,
        passed=all(c.passed for c in checks),
    )
