"""Nyström matrices for the singular operator families on the periodic grid.

All operators are discretized with the interlaced rule: the integral over s is
replaced by the mean over source nodes η_m = ξ_m + π/n, so that
s = ξ_j − η_m is an odd multiple of π/n and never hits the singularity. Grid
values at the source nodes are obtained by spectral interpolation.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .profile import InterfaceProfile, grid, midpoint_matrix, multiplier_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Dense n×n discretization, quadrature weights included."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError("operator matrix must be square")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __call__(self, phi: np.ndarray) -> np.ndarray:
        return self.entries @ phi

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries + other.entries)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries - other.entries)

    def __rmul__(self, factor: float) -> "OperatorMatrix":
        return OperatorMatrix(factor * self.entries)

    def weighted_transpose(self) -> "OperatorMatrix":
        # equal trapezoid weights cancel, leaving the plain transpose
        return OperatorMatrix(self.entries.T)


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Indices (n, m, p, q) and slot functions of B_{n,m}^{p,q}(a|b)[c, ·]."""

    n: int
    m: int
    p: int
    q: int
    a: tuple = field(default=())
    b: tuple = field(default=())
    c: tuple = field(default=())
    size: int | None = None

    def __post_init__(self):
        for name in ("n", "m", "p", "q"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.p > self.n + self.q + 1:
            raise ValueError(f"index constraint p <= n+q+1 violated: p={self.p}, n={self.n}, q={self.q}")
        for slot, count in (("a", self.m), ("b", self.n), ("c", self.q)):
            values = tuple(np.asarray(v, dtype=float) for v in getattr(self, slot))
            if len(values) != count:
                raise ValueError(f"slot {slot} needs {count} functions")
            object.__setattr__(self, slot, values)
        sizes = {np.asarray(v).size for v in (*self.a, *self.b, *self.c)}
        if self.size is not None:
            sizes.add(self.size)
        if len(sizes) > 1:
            raise ValueError(f"mismatched grid sizes {sorted(sizes)}")
        if not sizes:
            raise ValueError("grid size is required when all slots are empty")
        object.__setattr__(self, "size", sizes.pop())

    @classmethod
    def uniform(cls, f: np.ndarray, n: int, m: int, p: int, q: int) -> "OperatorSpec":
        """All slots filled with the same function f."""
        f = np.asarray(f, dtype=float)
        return cls(n, m, p, q, a=(f,) * m, b=(f,) * n, c=(f,) * q, size=f.size)


@lru_cache(maxsize=16)
def _offsets(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """s_{jm} = ξ_j − η_m wrapped to (−π, π), with tan(s/2) and cot(s/2)."""
    j = np.arange(n)[:, None]
    m = np.arange(n)[None, :]
    s = 2.0 * np.pi * (j - m - 0.5) / n
    s = s - 2.0 * np.pi * np.round(s / (2.0 * np.pi))
    t = np.tan(0.5 * s)
    for arr in (s, t):
        arr.setflags(write=False)
    return s, t, 1.0 / t


def _differences(values: np.ndarray) -> np.ndarray:
    """δ_{ξ,s}b = b(ξ_j) − b(η_m)."""
    values = np.asarray(values, dtype=float)
    return values[:, None] - (midpoint_matrix(values.size) @ values)[None, :]


def quadrature_matrix(kernel: np.ndarray, weight: float) -> OperatorMatrix:
    n = kernel.shape[0]
    return OperatorMatrix(weight / n * (kernel @ midpoint_matrix(n)))


def b_kernel(spec: OperatorSpec) -> np.ndarray:
    _, t, u = _offsets(spec.size)
    kernel = np.ones_like(t)
    for b in spec.b:
        kernel = kernel * np.tanh(0.5 * _differences(b)) * u
    for c in spec.c:
        kernel = kernel * 0.5 * _differences(c) * u
    for a in spec.a:
        kernel = kernel / (1.0 + (np.tanh(0.5 * _differences(a)) * u) ** 2)
    # t^p · cot(s/2)
    return kernel * (u if spec.p == 0 else t ** (spec.p - 1))


def c_kernel(size: int, a, b) -> np.ndarray:
    s, _, _ = _offsets(size)
    kernel = np.ones_like(s)
    for bi in b:
        kernel = kernel * _differences(bi) / s
    for ai in a:
        kernel = kernel / (1.0 + (_differences(ai) / s) ** 2)
    return kernel / s


def hilbert(phi: np.ndarray) -> np.ndarray:
    """Periodic Hilbert transform, Fourier symbol −i·sign(k)."""
    return multiplier_matrix(np.asarray(phi).size, "hilbert") @ phi


def hilbert_matrix(n: int) -> OperatorMatrix:
    return OperatorMatrix(multiplier_matrix(n, "hilbert"))


def assemble_B(spec: OperatorSpec) -> OperatorMatrix:
    """Matrix of (1/2π) PV∫ Π(T b/t) Π((δc/2)/t) / Π(1 + (T a/t)²) · t^p φ(ξ−s)/t ds."""
    return quadrature_matrix(b_kernel(spec), 1.0)


def assemble_C(n: int, m: int, a, b, size: int | None = None) -> OperatorMatrix:
    """Matrix of (1/π) PV∫ Π(δb_i/s) / Π(1 + (δa_i/s)²) · φ(ξ−s)/s ds over (−π, π).

    The 1/s kernel is not periodic, so the interlaced rule is second-order accurate
    here; C enters only through the splitting check against assemble_B.
    """
    a = tuple(np.asarray(v, dtype=float) for v in a)
    b = tuple(np.asarray(v, dtype=float) for v in b)
    if len(a) != m or len(b) != n:
        raise ValueError(f"C_{{{n},{m}}} needs {n} b-slots and {m} a-slots")
    sizes = {v.size for v in (*a, *b)} | ({size} if size is not None else set())
    if len(sizes) != 1:
        raise ValueError(f"mismatched grid sizes {sorted(sizes)}")
    return quadrature_matrix(c_kernel(sizes.pop(), a, b), 2.0)


def assemble_A1(spec: OperatorSpec) -> OperatorMatrix:
    """The bounded-kernel part A^{1,q}_{n,m} of a p = 0 operator B^{0,q}_{n,m}."""
    if spec.p != 0:
        raise ValueError("the splitting applies to p = 0 operators")
    bound = c_kernel(spec.size, spec.a, spec.b + spec.c)
    return quadrature_matrix(b_kernel(spec) - 2.0 * bound, 1.0)


def assemble_B0(f: InterfaceProfile | np.ndarray) -> OperatorMatrix:
    """Log-kernel operator (1/2π)∫ ln((t² + T²)/((1 + t²)(1 − T²))) φ(ξ−s) ds.

    The kernel is ln(4 sin²(s/2)) plus a smooth remainder; the first part is the
    Fourier multiplier −1/|k|, the remainder goes through the interlaced rule.
    """
    samples = f.samples if isinstance(f, InterfaceProfile) else np.asarray(f, dtype=float)
    n = samples.size
    _, _, u = _offsets(n)
    T = np.tanh(0.5 * _differences(samples))
    remainder = np.log(0.25 * (1.0 + (T * u) ** 2)) - np.log1p(-T**2)
    return OperatorMatrix(multiplier_matrix(n, "log") + quadrature_matrix(remainder, 1.0).entries)


def source_nodes(n: int) -> np.ndarray:
    """Interlaced source nodes η_m."""
    return grid(n) + np.pi / n
