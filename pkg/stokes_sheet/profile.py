"""Periodic interface profiles and their spectral geometry."""

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterable

import numpy as np


def grid(n: int) -> np.ndarray:
    """Collocation nodes ξ_j = 2πj/n − π."""
    return 2.0 * np.pi * np.arange(n) / n - np.pi


def wavenumbers(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT order."""
    return np.fft.fftfreq(n, d=1.0 / n)


def _alternating(n: int) -> np.ndarray:
    # (-1)^k, the phase of e^{ikξ} at the first node ξ_0 = −π
    return np.where(wavenumbers(n).astype(int) % 2 == 0, 1.0, -1.0)


def to_coeffs(samples: np.ndarray) -> np.ndarray:
    """Coefficients c_k with f(ξ) = Σ c_k e^{ikξ}, in FFT order."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    return np.fft.fft(samples, axis=0) * _alternating(n).reshape((n,) + (1,) * (samples.ndim - 1)) / n


def from_coeffs(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.shape[0]
    alt = _alternating(n).reshape((n,) + (1,) * (coeffs.ndim - 1))
    return np.real(np.fft.ifft(coeffs * alt * n, axis=0))


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def check_grid_size(n: int) -> None:
    if not is_power_of_two(n) or n < 16:
        raise ValueError(f"grid size must be a power of two >= 16, got {n}")


def derivative(samples: np.ndarray, order: int = 1) -> np.ndarray:
    """Spectral derivative along axis 0; the Nyquist mode is dropped for odd orders."""
    if order not in (1, 2, 3):
        raise ValueError(f"derivative order must be 1, 2 or 3, got {order}")
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    k = wavenumbers(n)
    symbol = (1j * k) ** order
    if order % 2 == 1:
        symbol[n // 2] = 0.0
    symbol = symbol.reshape((n,) + (1,) * (samples.ndim - 1))
    return np.real(np.fft.ifft(symbol * np.fft.fft(samples, axis=0), axis=0))


def shift(samples: np.ndarray, a: float) -> np.ndarray:
    """Samples of f(· − a) by Fourier phase factors."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    k = np.arange(n // 2 + 1)
    phase = np.exp(-1j * k * a).reshape((-1,) + (1,) * (samples.ndim - 1))
    return np.fft.irfft(np.fft.rfft(samples, axis=0) * phase, n=n, axis=0)


@lru_cache(maxsize=16)
def midpoint_matrix(n: int) -> np.ndarray:
    """Matrix S with (Sφ)_m = φ(ξ_m + π/n), the interlaced-node interpolant."""
    matrix = shift(np.eye(n), -np.pi / n)
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=16)
def multiplier_matrix(n: int, kind: str) -> np.ndarray:
    """Dense matrix of a real Fourier multiplier on the n-point grid."""
    k = np.abs(wavenumbers(n))
    if kind == "hilbert":
        symbol = -1j * np.sign(wavenumbers(n))
        symbol[n // 2] = 0.0
    elif kind == "log":
        symbol = np.zeros(n, dtype=complex)
        symbol[k > 0] = -1.0 / k[k > 0]
    elif kind == "abs":
        symbol = k.astype(complex)
    else:
        raise ValueError(f"unknown multiplier {kind!r}")
    matrix = np.real(np.fft.ifft(symbol[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0))
    matrix.setflags(write=False)
    return matrix


def resample(samples: np.ndarray, m: int) -> np.ndarray:
    """Spectral interpolation of a grid function onto the m-point grid."""
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    if m == n:
        return samples.copy()
    c = to_coeffs(samples)
    k = wavenumbers(n).astype(int)
    out = np.zeros((m,) + samples.shape[1:], dtype=complex)
    keep = np.abs(k) < min(n, m) // 2
    out[k[keep] % m] = c[keep]
    if m > n:
        # split the Nyquist coefficient evenly between ±n/2
        out[n // 2] += 0.5 * c[n // 2]
        out[m - n // 2] += 0.5 * c[n // 2]
    return from_coeffs(out)


def product(u: np.ndarray, v: np.ndarray, dealias: bool = False) -> np.ndarray:
    """Pointwise product, optionally formed on a 3/2-padded grid."""
    if not dealias:
        return u * v
    n = u.shape[0]
    m = 3 * n // 2
    return resample(resample(u, m) * resample(v, m), n)


@dataclass(frozen=True)
class GeometryBundle:
    fprime: np.ndarray
    omega: np.ndarray
    nu: np.ndarray
    tau: np.ndarray
    kappa: np.ndarray


@dataclass(frozen=True, eq=False)
class InterfaceProfile:
    """Samples of the interface height f on the uniform periodic grid."""

    samples: np.ndarray

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError("profile samples must be one-dimensional")
        check_grid_size(samples.size)
        if not np.all(np.isfinite(samples)):
            raise ValueError("profile samples must be finite")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @classmethod
    def zeros(cls, n: int) -> "InterfaceProfile":
        return cls(np.zeros(n))

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], n: int) -> "InterfaceProfile":
        return cls(func(grid(n)))

    @classmethod
    def from_modes(
        cls,
        n: int,
        modes: Iterable[tuple[int, float, float]],
        mean: float = 0.0,
    ) -> "InterfaceProfile":
        """Build Σ (a_k cos kξ + b_k sin kξ) + mean from (k, a_k, b_k) triples."""
        xi = grid(n)
        samples = np.full(n, float(mean))
        for k, a, b in modes:
            if not 1 <= k < n // 2:
                raise ValueError(f"mode {k} is not resolved on a grid of {n}")
            samples += a * np.cos(k * xi) + b * np.sin(k * xi)
        return cls(samples)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def xi(self) -> np.ndarray:
        return grid(self.n)

    @cached_property
    def coeffs(self) -> np.ndarray:
        coeffs = to_coeffs(self.samples)
        coeffs.setflags(write=False)
        return coeffs

    def mean(self) -> float:
        return float(np.real(self.coeffs[0]))

    def cos_amplitude(self, k: int) -> float:
        return float(2.0 * np.real(self.coeffs[k]))

    def sin_amplitude(self, k: int) -> float:
        return float(-2.0 * np.imag(self.coeffs[k]))

    def amplitudes(self, count: int) -> np.ndarray:
        """Moduli 2|c_k| of modes k = 1..count."""
        k = np.arange(1, count + 1)
        out = np.zeros(count)
        resolved = k < self.n // 2
        out[resolved] = 2.0 * np.abs(self.coeffs[k[resolved]])
        return out

    def derivative(self, order: int = 1) -> np.ndarray:
        return derivative(self.samples, order)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Trigonometric interpolant at arbitrary abscissae."""
        x = np.asarray(x, dtype=float)
        k = wavenumbers(self.n)
        c = np.array(self.coeffs)
        c[self.n // 2] = 0.5 * c[self.n // 2]
        values = np.exp(1j * np.multiply.outer(x, k)) @ c
        # the other half of the Nyquist coefficient, at k = +n/2
        values = values + 0.5 * self.coeffs[self.n // 2] * np.exp(0.5j * self.n * x)
        return np.real(values)

    def resample(self, m: int) -> "InterfaceProfile":
        return InterfaceProfile(resample(self.samples, m))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples)))

    def __add__(self, other: "InterfaceProfile") -> "InterfaceProfile":
        return InterfaceProfile(self.samples + other.samples)

    def __sub__(self, other: "InterfaceProfile") -> "InterfaceProfile":
        return InterfaceProfile(self.samples - other.samples)

    def scaled(self, factor: float) -> "InterfaceProfile":
        return InterfaceProfile(factor * self.samples)


def spectral_derivative(profile: InterfaceProfile, order: int) -> np.ndarray:
    """d^order f / dξ^order by Fourier multiplication with (ik)^order."""
    return derivative(profile.samples, order)


def geometry(profile: InterfaceProfile) -> GeometryBundle:
    fp = derivative(profile.samples, 1)
    fpp = derivative(profile.samples, 2)
    omega = np.sqrt(1.0 + fp**2)
    nu = np.stack([-fp, np.ones_like(fp)]) / omega
    tau = np.stack([np.ones_like(fp), fp]) / omega
    return GeometryBundle(fprime=fp, omega=omega, nu=nu, tau=tau, kappa=fpp / omega**3)


def translate(profile: InterfaceProfile, a: float = 0.0, c: float = 0.0) -> InterfaceProfile:
    """Return f(· − a) + c."""
    samples = shift(profile.samples, a) if a else np.array(profile.samples)
    return InterfaceProfile(samples + c)
