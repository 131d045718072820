"""Physical parameter model for the two-phase Stokes problem."""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator


class FluidParams(BaseModel):
    """Viscosities, densities, surface tension and gravity of the two phases.

    The ``plus`` phase occupies the region above the interface, the ``minus``
    phase the region below it.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mu_plus: float = Field(1.0, gt=0)
    mu_minus: float = Field(1.0, gt=0)
    rho_plus: float = Field(1.0, gt=0)
    rho_minus: float = Field(1.0, gt=0)
    sigma: float = Field(1.0, gt=0)
    g: float = Field(0.0, ge=0)

    @model_validator(mode="after")
    def _finite(self) -> "FluidParams":
        for name, value in self.model_dump().items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
        return self

    def theta(self) -> float:
        """Gravity coefficient Θ = −g[ρ]."""
        return -self.g * (self.rho_plus - self.rho_minus)

    def a_mu(self) -> float:
        """Viscosity contrast (μ⁺ − μ⁻)/(μ⁺ + μ⁻)."""
        return (self.mu_plus - self.mu_minus) / (self.mu_plus + self.mu_minus)

    def lambda_(self) -> float:
        """Capillarity parameter λ = −Θ/σ = g[ρ]/σ."""
        return -self.theta() / self.sigma

    @property
    def mu_sum(self) -> float:
        return self.mu_plus + self.mu_minus

    @property
    def alpha0(self) -> float:
        """Leading-order dissipation rate σ/(2(μ⁺ + μ⁻)) of the flat state."""
        return self.sigma / (2.0 * self.mu_sum)

    def with_lambda(self, lam: float) -> "FluidParams":
        """Return parameters with gravity chosen so that Θ = −σλ.

        Args:
            lam: Target capillarity parameter.

        Returns:
            A copy with ``g`` replaced.
        """
        if lam == 0.0:
            return self.model_copy(update={"g": 0.0})
        jump = self.rho_plus - self.rho_minus
        if jump == 0.0 or lam / jump < 0.0:
            raise ValueError(
                f"lambda={lam} needs rho_plus {'>' if lam > 0 else '<'} rho_minus"
            )
        return self.model_copy(update={"g": self.sigma * lam / jump})
