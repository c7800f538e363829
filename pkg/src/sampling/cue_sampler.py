"""
Sample CUE spectra through Verblunsky coefficients and evaluate the
log-characteristic-polynomial field X_N and its trace truncations X_{N,M}
"""
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import qr

import config
from src.errors import InvalidArgumentError, NumericalInstabilityWarning

FIELD_KINDS = ("full", "truncated", "gaussian")


def _check_size(n: int) -> None:
    if int(n) != n or n < 1:
        raise InvalidArgumentError(f"matrix size must be a positive integer, got {n}")


def _check_grid(grid_size: int) -> None:
    if grid_size < 1 or grid_size & (grid_size - 1):
        raise InvalidArgumentError(f"grid size must be a power of two, got {grid_size}")


@dataclass
class FieldGrid:
    """Values of a field on the G equispaced angles 2πg/G"""

    grid_size: int
    values: np.ndarray
    kind: str
    n: int = 0
    m: int = 0
    seed: Optional[int] = None
    stream: Optional[int] = None

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise InvalidArgumentError(f"unknown field kind {self.kind!r}")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid_size,):
            raise InvalidArgumentError("values must have one entry per grid angle")

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.grid_size) / self.grid_size

    def rotated(self, steps: int) -> "FieldGrid":
        """The same field seen from a grid rotated by ``steps`` grid cells"""
        return FieldGrid(self.grid_size, np.roll(self.values, -steps), self.kind,
                         self.n, self.m, self.seed, self.stream)


# ---------------------------------------------------------------------------
# Verblunsky coefficients and the secular polynomial
# ---------------------------------------------------------------------------

def sample_verblunsky_batch(n: int, size: int, stream: np.random.Generator) -> np.ndarray:
    """
    Draw ``size`` independent CUE Verblunsky sequences

    Args:
        n: Matrix size
        size: Number of draws
        stream: Random generator

    Returns:
        Complex array of shape (size, n); row i holds α_0..α_{n-1} of draw i
    """
    _check_size(n)
    shape = np.arange(n - 1, 0, -1)  # n-k-1 for k = 0..n-2
    u = stream.random((size, n - 1))
    # |α_k|^2 ~ Beta(1, n-k-1) by inversion of 1 - (1-x)^(n-k-1)
    r2 = -np.expm1(np.log1p(-u) / shape)
    phase = stream.uniform(0.0, 2 * np.pi, (size, n))
    radius = np.hstack([np.sqrt(r2), np.ones((size, 1))])
    return radius * np.exp(1j * phase)


def secular_coefficients_batch(alphas: np.ndarray) -> np.ndarray:
    """Row-wise Szegő recursion; returns ascending coefficients of shape (size, n+1)"""
    alphas = np.atleast_2d(np.asarray(alphas, dtype=complex))
    size, n = alphas.shape
    phi = np.ones((size, 1), dtype=complex)
    for k in range(n):
        nxt = np.zeros((size, k + 2), dtype=complex)
        nxt[:, 1:] = phi
        # Φ*_k has the reversed, conjugated coefficients of Φ_k
        nxt[:, :k + 1] -= np.conj(alphas[:, k:k + 1]) * np.conj(phi[:, ::-1])
        phi = nxt
    return phi


def secular_coefficients(alphas) -> np.ndarray:
    """
    Monic characteristic polynomial Φ_n from Verblunsky coefficients

    Φ_{k+1}(z) = zΦ_k(z) − conj(α_k)Φ*_k(z), Φ_0 = 1.

    Returns:
        n+1 complex coefficients in ascending degree order
    """
    alphas = np.asarray(alphas, dtype=complex)
    if alphas.ndim != 1 or alphas.size == 0:
        raise InvalidArgumentError("alphas must be a non-empty 1-d sequence")
    return secular_coefficients_batch(alphas[None, :])[0]


def traces_from_secular_batch(secular: np.ndarray, k_max: int) -> np.ndarray:
    """
    Power sums Tr U^k, k = 1..k_max, by Newton's identities, row-wise

    For k_max > n the recursion continues with all n coefficients; precision
    then degrades roughly with the size of the coefficients.
    """
    secular = np.atleast_2d(np.asarray(secular, dtype=complex))
    if k_max < 1:
        raise InvalidArgumentError(f"k_max must be positive, got {k_max}")
    size, width = secular.shape
    n = width - 1
    # a_i is the coefficient of z^{n-i}
    a = secular[:, ::-1]
    p = np.zeros((size, k_max), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(secular))))
    growth = 0.0
    for k in range(1, k_max + 1):
        i_max = min(k - 1, n)
        if i_max > 0:
            idx = np.arange(1, i_max + 1)
            terms = a[:, idx] * p[:, k - 1 - idx]
            growth = max(growth, float(np.max(np.abs(terms))))
            acc = terms.sum(axis=1)
        else:
            acc = np.zeros(size, dtype=complex)
        p[:, k - 1] = -acc - k * a[:, k] if k <= n else -acc
    if growth > config.NEWTON_GROWTH_LIMIT * scale:
        warnings.warn(
            f"Newton recursion grew to {growth:.3e} against input magnitude {scale:.3e}; "
            "consider the dense backend",
            NumericalInstabilityWarning,
            stacklevel=2,
        )
    return p


def traces_from_secular(secular, k_max: int) -> np.ndarray:
    """Tr U^k for k = 1..k_max from the monic coefficients of Φ_n"""
    return traces_from_secular_batch(np.asarray(secular, dtype=complex)[None, :], k_max)[0]


# ---------------------------------------------------------------------------
# Samples
# ---------------------------------------------------------------------------

@dataclass
class CueSample:
    """One CUE draw: Verblunsky coefficients, secular polynomial, lazy traces"""

    n: int
    alphas: np.ndarray
    seed: Optional[int] = None
    stream: Optional[int] = None
    _secular: Optional[np.ndarray] = field(default=None, repr=False)
    _traces: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex), repr=False)

    def __post_init__(self):
        _check_size(self.n)
        self.alphas = np.asarray(self.alphas, dtype=complex)
        if self.alphas.shape != (self.n,):
            raise InvalidArgumentError(f"expected {self.n} Verblunsky coefficients")
        if np.any(np.abs(self.alphas[:-1]) >= 1.0):
            raise InvalidArgumentError("interior Verblunsky coefficients must lie in the open disk")
        if abs(abs(self.alphas[-1]) - 1.0) > 1e-12:
            raise InvalidArgumentError("last Verblunsky coefficient must be unimodular")

    @property
    def secular(self) -> np.ndarray:
        if self._secular is None:
            self._secular = secular_coefficients(self.alphas)
        return self._secular

    @property
    def traces(self) -> np.ndarray:
        """Materialized Tr U^k for k = 1..len(traces)"""
        return self._traces

    def ensure_traces(self, k_max: int) -> np.ndarray:
        if self._traces.size < k_max:
            self._traces = traces_from_secular(self.secular, k_max)
        return self._traces[:k_max]

    def trace(self, k: int) -> complex:
        """Tr U^k for any integer k, using Tr U^{-k} = conj(Tr U^k)"""
        if k == 0:
            return complex(self.n)
        value = self.ensure_traces(abs(k))[abs(k) - 1]
        return complex(np.conj(value)) if k < 0 else complex(value)


def sample_verblunsky(n: int, stream: np.random.Generator,
                      seed: Optional[int] = None, stream_index: Optional[int] = None) -> CueSample:
    """Draw one CUE sample; only the Verblunsky coefficients are materialized"""
    alphas = sample_verblunsky_batch(n, 1, stream)[0]
    return CueSample(n=n, alphas=alphas, seed=seed, stream=stream_index)


@dataclass
class CueBatch:
    """A block of CUE draws sharing one stream, stored row-wise"""

    n: int
    alphas: np.ndarray
    seed: Optional[int] = None
    stream: Optional[int] = None
    secular: np.ndarray = field(init=False, repr=False)
    _traces: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.alphas = np.atleast_2d(self.alphas)
        self.secular = secular_coefficients_batch(self.alphas)
        self._traces = np.zeros((len(self.alphas), 0), dtype=complex)

    @classmethod
    def draw(cls, n: int, size: int, stream: np.random.Generator,
             seed: Optional[int] = None, stream_index: Optional[int] = None) -> "CueBatch":
        return cls(n, sample_verblunsky_batch(n, size, stream), seed, stream_index)

    def __len__(self) -> int:
        return len(self.alphas)

    def ensure_traces(self, k_max: int) -> np.ndarray:
        if self._traces.shape[1] < k_max:
            self._traces = traces_from_secular_batch(self.secular, k_max)
        return self._traces[:, :k_max]

    def sample(self, i: int) -> CueSample:
        return CueSample(self.n, self.alphas[i], self.seed, self.stream, _secular=self.secular[i])

    def fields(self, grid_size: int, mode: str = "full", m: Optional[int] = None) -> np.ndarray:
        """Field values for every draw, shape (size, grid_size)"""
        if mode == "full":
            return full_field_values(self.secular, grid_size)
        return truncated_field_values(self.ensure_traces(_check_truncation(m, grid_size)), grid_size, m)

    def field_at(self, theta, mode: str = "full", m: Optional[int] = None) -> np.ndarray:
        """Field values at arbitrary angles, shape (size, len(theta))"""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        if mode == "full":
            z = np.exp(1j * theta)
            powers = z[None, :] ** np.arange(self.n + 1)[:, None]
            with np.errstate(divide="ignore"):
                return np.log(np.abs(self.secular @ powers))
        if m is None or m < 1:
            raise InvalidArgumentError("truncated mode needs a positive truncation m")
        traces = self.ensure_traces(m)
        k = np.arange(1, m + 1)
        phases = np.exp(-1j * np.outer(k, theta)) / k[:, None]
        return -np.real(traces @ phases)


# ---------------------------------------------------------------------------
# Field evaluation
# ---------------------------------------------------------------------------

def _check_truncation(m: Optional[int], grid_size: int) -> int:
    if m is None or m < 1:
        raise InvalidArgumentError("truncated mode needs a positive truncation m")
    if m >= grid_size:
        raise InvalidArgumentError(f"truncation {m} must be below the grid size {grid_size}")
    return m


def full_field_values(secular: np.ndarray, grid_size: int) -> np.ndarray:
    """log|Φ_N| at the G-th roots of unity via one zero-padded inverse FFT per row"""
    _check_grid(grid_size)
    secular = np.atleast_2d(secular)
    width = secular.shape[1]
    if grid_size <= width - 1:
        raise InvalidArgumentError(f"grid size {grid_size} must exceed the matrix size {width - 1}")
    padded = np.zeros((secular.shape[0], grid_size), dtype=complex)
    padded[:, :width] = secular
    values = grid_size * np.fft.ifft(padded, axis=1)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values))


def truncated_field_values(traces: np.ndarray, grid_size: int, m: int) -> np.ndarray:
    """−Re Σ_{k≤m} Tr U^k e^{−ikθ}/k on the grid, one forward FFT per row"""
    _check_grid(grid_size)
    _check_truncation(m, grid_size)
    traces = np.atleast_2d(traces)
    coeffs = np.zeros((traces.shape[0], grid_size), dtype=complex)
    coeffs[:, 1:m + 1] = traces[:, :m] / np.arange(1, m + 1)
    return -np.real(np.fft.fft(coeffs, axis=1))


def field_on_grid(sample: CueSample, grid_size: int, mode: str = "full",
                  m: Optional[int] = None) -> FieldGrid:
    """
    Evaluate X_N (mode "full") or X_{N,M} (mode "truncated") on the grid

    Args:
        sample: CUE draw
        grid_size: Power of two G; full mode needs G > n
        mode: "full" or "truncated"
        m: Truncation M for truncated mode

    Returns:
        FieldGrid; exact eigenangle hits give -inf in full mode
    """
    if mode == "full":
        values = full_field_values(sample.secular[None, :], grid_size)[0]
        return FieldGrid(grid_size, values, "full", sample.n, 0, sample.seed, sample.stream)
    if mode == "truncated":
        m = _check_truncation(m, grid_size)
        values = truncated_field_values(sample.ensure_traces(m)[None, :], grid_size, m)[0]
        return FieldGrid(grid_size, values, "truncated", sample.n, m, sample.seed, sample.stream)
    raise InvalidArgumentError(f"unknown field mode {mode!r}")


def field_at(sample: CueSample, theta, mode: str = "full", m: Optional[int] = None) -> np.ndarray:
    """X_N(θ) or X_{N,M}(θ) at arbitrary angles"""
    theta = np.asarray(theta, dtype=float)
    if mode == "full":
        with np.errstate(divide="ignore"):
            return np.log(np.abs(P.polyval(np.exp(1j * theta), sample.secular)))
    if mode == "truncated":
        if m is None or m < 1:
            raise InvalidArgumentError("truncated mode needs a positive truncation m")
        traces = sample.ensure_traces(m)
        k = np.arange(1, m + 1)
        phases = np.exp(-1j * np.multiply.outer(theta, k))
        return -np.real(phases @ (traces / k))
    raise InvalidArgumentError(f"unknown field mode {mode!r}")


# ---------------------------------------------------------------------------
# Dense cross-check backend
# ---------------------------------------------------------------------------

def sample_haar_qr(n: int, stream: np.random.Generator) -> np.ndarray:
    """Haar unitary from the QR factorization of a complex Ginibre matrix"""
    _check_size(n)
    z = (stream.standard_normal((n, n)) + 1j * stream.standard_normal((n, n))) / np.sqrt(2)
    q, r = qr(z)
    d = np.diag(r)
    # Fix the phase ambiguity of QR so the factor is Haar distributed
    return q * (d / np.abs(d))


def dense_traces(u: np.ndarray, k_max: int) -> np.ndarray:
    """Tr U^k for k = 1..k_max by repeated multiplication"""
    out = np.empty(k_max, dtype=complex)
    power = np.eye(u.shape[0], dtype=complex)
    for k in range(k_max):
        power = power @ u
        out[k] = np.trace(power)
    return out


def dense_field_at(u: np.ndarray, theta: float) -> float:
    """log|det(U − e^{iθ})| through an LU log-determinant"""
    _, logabs = np.linalg.slogdet(u - np.exp(1j * theta) * np.eye(u.shape[0]))
    return float(logabs)
