"""x₁-periodic Stokeslet, stresslet and the scalar kernels z₀…z₆."""

from dataclasses import dataclass

import numpy as np

LN4 = np.log(4.0)


@dataclass(frozen=True)
class KernelPoint:
    x1: float
    x2: float

    @property
    def reduced(self) -> "KernelPoint":
        """Same point with x₁ reduced to (−π, π]."""
        x1 = self.x1 - 2.0 * np.pi * np.round(self.x1 / (2.0 * np.pi))
        if x1 <= -np.pi:
            x1 += 2.0 * np.pi
        return KernelPoint(float(x1), self.x2)

    def is_origin(self) -> bool:
        p = self.reduced
        return p.x1 == 0.0 and p.x2 == 0.0


def z_values(x1, x2) -> np.ndarray:
    """All seven scalar kernels, stacked along a new leading axis.

    The tan(x₁/2) form is rewritten with sn = sin(x₁/2), c = cos(x₁/2) so the
    values stay finite at x₁ = ±π; sech²(x₂/2) is formed from e^{−|x₂|} so large
    heights do not overflow.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    sn2 = np.sin(0.5 * x1) ** 2
    c2 = np.cos(0.5 * x1) ** 2
    snc = 0.5 * np.sin(x1)
    T = np.tanh(0.5 * x2)
    e = np.exp(-np.abs(x2))
    sech2 = 4.0 * e / (1.0 + e) ** 2
    D = sn2 + T**2 * c2

    with np.errstate(divide="ignore", invalid="ignore"):
        z0 = np.log(np.maximum(D, 1e-300)) + np.abs(x2) + 2.0 * np.log1p(e) - LN4
        z1 = snc * sech2 / D
        z2 = T / D
        z5 = sech2 * (sn2 - T**2 * c2) / (2.0 * D**2)
        z6 = snc * T * sech2 / (2.0 * D**2)
    return np.stack([z0, z1, z2, x2 * z5, x2 * z6, z5, z6])


def z(i: int, p: KernelPoint) -> float:
    """Scalar kernel z_i at a point off the origin."""
    if i not in range(7):
        raise ValueError(f"kernel index must be in 0..6, got {i}")
    if p.is_origin():
        raise ValueError("kernels are singular at the origin")
    return float(z_values(p.x1, p.x2)[i])


def stokeslet_values(x1, x2) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Stokeslet: U with shape (2, 2, ...) and P with shape (2, ...)."""
    x2 = np.asarray(x2, dtype=float)
    zz = z_values(x1, x2)
    z0, z1, z2 = zz[0], zz[1], zz[2]
    off = -x2 * z1
    U = np.array([[z0 + x2 * z2, off], [off, z0 - x2 * z2]]) / (8.0 * np.pi)
    P = -np.array([z1, z2]) / (4.0 * np.pi)
    return U, P


def stokeslet(p: KernelPoint) -> tuple[np.ndarray, np.ndarray]:
    if p.is_origin():
        raise ValueError("kernels are singular at the origin")
    return stokeslet_values(p.x1, p.x2)


def stresslet_values(x1, x2) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized stresslet W1, W2, Q, each with shape (2, 2, ...).

    The velocity of the (i, k) double-layer field is (W1[i, k], W2[i, k]) with
    pressure Q[i, k].
    """
    _, z1, z2, z3, z4, z5, z6 = z_values(x1, x2)
    W1 = np.array([[2 * z1 - 2 * z4, z2 + z3], [z2 + z3, 2 * z4]]) / (4.0 * np.pi)
    W2 = np.array([[z2 + z3, 2 * z4], [2 * z4, z2 - z3]]) / (4.0 * np.pi)
    Q = np.array([[z5, 2 * z6], [2 * z6, -z5]]) / (2.0 * np.pi)
    return W1, W2, Q


def stresslet(p: KernelPoint) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if p.is_origin():
        raise ValueError("kernels are singular at the origin")
    return stresslet_values(p.x1, p.x2)
