"""
Gaussian reference field X^{(M)}, its covariance Σ^{(M)}, dyadic barrier
events and Gaussian chaos masses
"""
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from src.errors import InvalidArgumentError
from src.sampling.cue_sampler import FieldGrid, _check_grid


def covariance_sigma(m: int, delta) -> np.ndarray:
    """
    Σ^{(M)}(δ) = Σ_{j≤M} cos(jδ)/(2j), summed exactly

    Args:
        m: Truncation level M
        delta: Angle difference (scalar or array)

    Returns:
        Same shape as delta
    """
    if m < 1:
        raise InvalidArgumentError(f"truncation must be positive, got {m}")
    delta = np.asarray(delta, dtype=float)
    j = np.arange(1, m + 1)
    return (np.cos(np.multiply.outer(delta, j)) / (2 * j)).sum(axis=-1)


@dataclass
class GaussianDraw:
    """M i.i.d. standard complex Gaussians Z_j with E|Z_j|^2 = 1"""

    m: int
    z: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=complex)
        if self.z.shape != (self.m,):
            raise InvalidArgumentError(f"expected {self.m} Gaussian coefficients")

    def values_at(self, theta) -> np.ndarray:
        """X^{(M)}(θ) = Σ_j Re(Z_j e^{−ijθ})/√j at arbitrary angles"""
        j = np.arange(1, self.m + 1)
        phases = np.exp(-1j * np.multiply.outer(np.asarray(theta, dtype=float), j))
        return np.real(phases @ (self.z / np.sqrt(j)))

    def scales_at(self, theta: float, ks) -> Dict[int, float]:
        """X^{(2^k)}(θ) for each dyadic index k, from one draw"""
        j = np.arange(1, self.m + 1)
        partial = np.cumsum(np.real(self.z * np.exp(-1j * j * theta)) / np.sqrt(j))
        out = {}
        for k in ks:
            if 2 ** k > self.m:
                raise InvalidArgumentError(f"scale 2^{k} exceeds the truncation {self.m}")
            out[k] = float(partial[2 ** k - 1])
        return out


def sample_gaussian_draw(m: int, stream: np.random.Generator, size: Optional[int] = None):
    """One GaussianDraw, or a (size, m) array of Z's when size is given"""
    if m < 1:
        raise InvalidArgumentError(f"truncation must be positive, got {m}")
    shape = (m,) if size is None else (size, m)
    z = (stream.standard_normal(shape) + 1j * stream.standard_normal(shape)) / np.sqrt(2)
    return GaussianDraw(m, z) if size is None else z


def gaussian_field_values(z: np.ndarray, grid_size: int) -> np.ndarray:
    """Field values of one or many draws (rows of z) on the grid"""
    _check_grid(grid_size)
    z = np.atleast_2d(z)
    m = z.shape[1]
    if grid_size < 2 * m:
        raise InvalidArgumentError(f"grid size {grid_size} cannot resolve {m} modes")
    coeffs = np.zeros((z.shape[0], grid_size), dtype=complex)
    coeffs[:, 1:m + 1] = z / np.sqrt(np.arange(1, m + 1))
    return np.real(np.fft.fft(coeffs, axis=1))


def gaussian_field_from_draw(draw: GaussianDraw, grid_size: int) -> FieldGrid:
    values = gaussian_field_values(draw.z[None, :], grid_size)[0]
    return FieldGrid(grid_size, values, "gaussian", 0, draw.m)


def sample_gaussian_field(m: int, grid_size: int, stream: np.random.Generator) -> FieldGrid:
    """X^{(M)}(θ) = Σ_{j≤M}(Z_j e^{−ijθ} + conj)/(2√j) on G equispaced angles"""
    return gaussian_field_from_draw(sample_gaussian_draw(m, stream), grid_size)


def gaussian_normalizer(m: int, beta: float) -> float:
    """E e^{βX^{(M)}(θ)} = exp(β²Σ^{(M)}(0)/2)"""
    return float(np.exp(beta ** 2 * covariance_sigma(m, 0.0) / 2))


def gaussian_mass_values(z: np.ndarray, beta: float, grid_size: int, phi=None) -> np.ndarray:
    """Total masses for each row of z"""
    m = np.atleast_2d(z).shape[1]
    values = gaussian_field_values(z, grid_size)
    density = np.exp(beta * values - beta ** 2 * covariance_sigma(m, 0.0) / 2)
    weights = 1.0 if phi is None else np.asarray(phi, dtype=float)
    return (weights * density).mean(axis=1)


def gaussian_mass(m: int, beta: float, grid_size: int, stream: np.random.Generator) -> float:
    """
    Total mass of e^{βX^{(M)}}/E e^{βX^{(M)}} dθ/2π on the grid

    The normalizer is exact, so the mass has expectation 1.
    """
    if not 0 <= beta < 2:
        raise InvalidArgumentError(f"beta must lie in [0, 2), got {beta}")
    z = sample_gaussian_draw(m, stream).z
    return float(gaussian_mass_values(z[None, :], beta, grid_size)[0])


# ---------------------------------------------------------------------------
# Barrier events
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BarrierSpec:
    """Barrier X_{2^k} ≤ γΣ^{(2^k)}(0) + offset_k for k = l..top"""

    gamma: float
    l: int
    top: int
    offsets: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.l > self.top:
            raise InvalidArgumentError(f"barrier range is empty: l={self.l} > top={self.top}")
        if self.l < 0:
            raise InvalidArgumentError("dyadic scale indices are nonnegative")
        if not np.isfinite(self.gamma):
            raise InvalidArgumentError("gamma must be finite")

    @property
    def scales(self) -> range:
        return range(self.l, self.top + 1)

    @property
    def in_standard_range(self) -> bool:
        return 0 < self.gamma < 4

    def threshold(self, k: int) -> float:
        return float(self.gamma * covariance_sigma(2 ** k, 0.0) + self.offsets.get(k, 0.0))

    def with_range(self, l: int, top: int) -> "BarrierSpec":
        return BarrierSpec(self.gamma, l, top, dict(self.offsets))


def barrier_indicator(scales: Mapping[int, float], spec: BarrierSpec) -> bool:
    """True iff every scale value sits at or below its threshold"""
    for k in spec.scales:
        if k not in scales:
            raise InvalidArgumentError(f"missing field value for scale 2^{k}")
        if scales[k] > spec.threshold(k):
            return False
    return True


def barrier_mask(scales: Mapping[int, np.ndarray], spec: BarrierSpec) -> np.ndarray:
    """Vectorized barrier_indicator over arrays of field values"""
    mask = None
    for k in spec.scales:
        if k not in scales:
            raise InvalidArgumentError(f"missing field value for scale 2^{k}")
        ok = np.asarray(scales[k]) <= spec.threshold(k)
        mask = ok if mask is None else mask & ok
    return mask


def tilted_offsets(beta: float, delta: float, l: int, top: int) -> Dict[int, float]:
    """
    Per-scale offsets of the Gaussian limit of the tilted barrier events

    The tilted threshold is (γ−β)Σ^{(2^k)}(0) − βΣ^{(2^k)}(δ); as an offset on
    top of γΣ^{(2^k)}(0) this is −β(Σ^{(2^k)}(0) + Σ^{(2^k)}(δ)).
    """
    return {
        k: float(-beta * (covariance_sigma(2 ** k, 0.0) + covariance_sigma(2 ** k, delta)))
        for k in range(l, top + 1)
    }


def gaussian_biased_probability(m: int, beta: float, delta: float, spec: BarrierSpec,
                                draws: int, stream: np.random.Generator) -> Tuple[float, float]:
    """
    Monte Carlo P(B^G(0; Y) ∩ B^G(δ; Y)) with tilted offsets Y

    Returns:
        (probability, binomial standard error)
    """
    if 2 ** spec.top > m:
        raise InvalidArgumentError(f"top scale 2^{spec.top} exceeds the truncation {m}")
    tilted = BarrierSpec(spec.gamma, spec.l, spec.top, tilted_offsets(beta, delta, spec.l, spec.top))
    z = sample_gaussian_draw(m, stream, size=draws)
    j = np.arange(1, m + 1)
    hits = None
    for angle in (0.0, delta):
        partial = np.cumsum(np.real(z * np.exp(-1j * j * angle)) / np.sqrt(j), axis=1)
        mask = barrier_mask({k: partial[:, 2 ** k - 1] for k in tilted.scales}, tilted)
        hits = mask if hits is None else hits & mask
    p = float(hits.mean())
    return p, float(np.sqrt(max(p * (1 - p), 1e-300) / draws))


def biased_trace_limit(beta: float, theta: float, theta_prime: float, l: int,
                       stream: np.random.Generator, size: int) -> np.ndarray:
    """
    Samples of the limit of (Tr U^j/√j)_{j≤l} under the two-point tilt

    Each row is −β(e^{ijθ}+e^{ijθ′})/(2√j) + Z_j.
    """
    j = np.arange(1, l + 1)
    shift = -beta * (np.exp(1j * j * theta) + np.exp(1j * j * theta_prime)) / (2 * np.sqrt(j))
    return shift + sample_gaussian_draw(l, stream, size=size)
