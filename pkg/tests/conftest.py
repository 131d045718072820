import numpy as np
import pytest

from stokes_sheet.models import FluidParams
from stokes_sheet.profile import InterfaceProfile


@pytest.fixture
def params():
    """σ = 1, Θ = 0, μ⁺ + μ⁻ = 2, equal viscosities."""
    return FluidParams(mu_plus=1.0, mu_minus=1.0, sigma=1.0)


@pytest.fixture
def contrast():
    """a_μ = 1/2 and Θ = 0.5."""
    return FluidParams(mu_plus=3.0, mu_minus=1.0, rho_plus=1.0, rho_minus=1.5, sigma=1.0, g=1.0)


@pytest.fixture
def heavy_top():
    """Heavier fluid above, so gravity can be tuned to any λ > 0."""
    return FluidParams(mu_plus=1.0, mu_minus=1.0, rho_plus=2.0, rho_minus=1.0, sigma=1.0)


@pytest.fixture
def wavy():
    return InterfaceProfile.from_modes(64, [(1, 0.3, 0.0), (2, 0.0, 0.1)])


@pytest.fixture
def skewed():
    """Profile without a reflection symmetry."""
    return InterfaceProfile.from_modes(32, [(1, 0.3, 0.0), (2, 0.0, 0.15)])


@pytest.fixture
def write_config(tmp_path):
    def write(text: str, name: str = "run.toml"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


@pytest.fixture
def reflect():
    """Map samples of g(ξ) to samples of g(−ξ) on the grid ξ_j = 2πj/n − π."""

    def apply(values: np.ndarray) -> np.ndarray:
        return values[(-np.arange(values.size)) % values.size]

    return apply
