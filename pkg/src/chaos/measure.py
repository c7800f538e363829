"""
Normalized chaos measures e^{βX}/E e^{βX} dθ/2π built from CUE fields,
their total masses, the barrier decomposition and tilted estimators
"""
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln

import config
from src.errors import ConsistencyError, InvalidArgumentError
from src.fields.gaussian_field import BarrierSpec, barrier_mask, gaussian_normalizer
from src.sampling.cue_sampler import CueBatch, CueSample, FieldGrid, field_on_grid
from src.toeplitz.determinants import toeplitz_det
from src.toeplitz.symbol import Symbol, fisher_hartwig_symbol, fourier_coefficients, log_singularity_laurent

PhiLike = Union[None, str, np.ndarray]


@dataclass
class MassSample:
    """Total mass ∫φ dμ of one draw, with the optional barrier split g + e1 + e2"""

    n: int
    m: int
    beta: float
    grid_size: int
    mass: float
    seed: Optional[int] = None
    stream: Optional[int] = None
    g: Optional[float] = None
    e1: Optional[float] = None
    e2: Optional[float] = None

    @property
    def decomposition(self) -> Tuple[float, float, float]:
        if self.g is None:
            raise InvalidArgumentError("this mass sample was not decomposed")
        return self.g, self.e1, self.e2

    def as_row(self) -> Dict[str, object]:
        return asdict(self)


@dataclass(frozen=True)
class Normalizer:
    """E e^{βX(θ)} for a field kind; m is 0 for the full field"""

    kind: str
    n: int
    m: int
    beta: float
    value: float


# ---------------------------------------------------------------------------
# Normalizers
# ---------------------------------------------------------------------------

def normalizer_product_formula(n: int, beta: float) -> float:
    """Π_{j≤n} Γ(j)Γ(j+β)/Γ(j+β/2)²"""
    j = np.arange(1, n + 1)
    return float(np.exp(np.sum(gammaln(j) + gammaln(j + beta) - 2 * gammaln(j + beta / 2))))


@lru_cache(maxsize=256)
def normalizer_exact(n: int, beta: float) -> float:
    """
    E e^{βX_N(θ)} = D_{n−1}(|z−1|^β)

    The Toeplitz determinant is cross-checked against the Gamma product.
    """
    if n < 1 or beta < 0:
        raise InvalidArgumentError(f"need n ≥ 1 and beta ≥ 0, got n={n}, beta={beta}")
    if beta == 0:
        return 1.0
    fhat = fourier_coefficients(fisher_hartwig_symbol(beta), n - 1)
    det = toeplitz_det(fhat, n)
    closed = normalizer_product_formula(n, beta)
    if det.degenerate or abs(det.value / closed - 1) > config.DET_CONSISTENCY_TOL:
        raise ConsistencyError(f"normalizer mismatch at n={n}, beta={beta}: {det.value} vs {closed}")
    return float(det.value)


@lru_cache(maxsize=256)
def truncated_normalizer(n: int, m: int, beta: float) -> float:
    """E e^{βX_{N,M}(θ)} = D_{n−1}(e^{βV_M}) for the truncated log-singularity V_M at angle 0"""
    if m < 1:
        raise InvalidArgumentError(f"m must be positive, got {m}")
    if beta == 0:
        return 1.0
    symbol = Symbol(log_singularity_laurent(beta, m, 0.0))
    return float(toeplitz_det(fourier_coefficients(symbol, n - 1), n).value)


def full_normalizer(n: int, beta: float) -> Normalizer:
    return Normalizer("full", n, 0, beta, normalizer_exact(n, float(beta)))


def trunc_normalizer(n: int, m: int, beta: float) -> Normalizer:
    return Normalizer("truncated", n, m, beta, truncated_normalizer(n, m, float(beta)))


def gauss_normalizer(m: int, beta: float) -> Normalizer:
    return Normalizer("gaussian", 0, m, beta, gaussian_normalizer(m, beta))


# ---------------------------------------------------------------------------
# Masses
# ---------------------------------------------------------------------------

def weight_grid(phi: PhiLike, grid_size: int) -> np.ndarray:
    """Grid values of a test function: None/"one", "one_plus_cos" or a user grid"""
    angles = 2 * np.pi * np.arange(grid_size) / grid_size
    if phi is None or (isinstance(phi, str) and phi == "one"):
        return np.ones(grid_size)
    if isinstance(phi, str):
        if phi == "one_plus_cos":
            return 1 + np.cos(angles)
        raise InvalidArgumentError(f"unknown test function {phi!r}")
    values = np.asarray(phi, dtype=float)
    if values.shape != (grid_size,) or np.any(values < 0):
        raise InvalidArgumentError("a user test function must be a nonnegative grid of matching size")
    return values


def _density(values: np.ndarray, beta: float, normalizer: float) -> np.ndarray:
    if beta == 0:
        return np.full(values.shape, 1.0 / normalizer)
    with np.errstate(under="ignore"):
        return np.exp(beta * values) / normalizer


def mass_from_field(field: FieldGrid, beta: float, normalizer: Normalizer,
                    phi: PhiLike = None) -> MassSample:
    """
    (1/G)Σ_g φ(θ_g) e^{βX(θ_g)} / normalizer

    Args:
        field: FieldGrid of kind full, truncated or gaussian
        beta: Inverse temperature
        normalizer: Normalizer of the same kind, size, truncation and beta
        phi: Test function

    Returns:
        MassSample
    """
    if (normalizer.kind != field.kind or normalizer.m != field.m or normalizer.beta != beta
            or (field.kind != "gaussian" and normalizer.n != field.n)):
        raise InvalidArgumentError(
            f"normalizer ({normalizer.kind}, n={normalizer.n}, m={normalizer.m}, beta={normalizer.beta}) "
            f"does not match field ({field.kind}, n={field.n}, m={field.m}, beta={beta})"
        )
    weights = weight_grid(phi, field.grid_size)
    mass = float(np.mean(weights * _density(field.values, beta, normalizer.value)))
    return MassSample(field.n, field.m, beta, field.grid_size, mass, field.seed, field.stream)


def mass_batch(batch: CueBatch, beta: float, grid_size: int, mode: str = "full",
               m: Optional[int] = None, phi: PhiLike = None) -> np.ndarray:
    """Masses of every draw in a batch"""
    if mode == "full":
        normalizer = normalizer_exact(batch.n, float(beta))
    else:
        normalizer = truncated_normalizer(batch.n, m, float(beta))
    values = batch.fields(grid_size, mode, m)
    weights = weight_grid(phi, grid_size)
    return np.mean(weights * _density(values, beta, normalizer), axis=1)


def dyadic_top(n: int, delta: float) -> int:
    """k_N = ⌊log₂ N^{1−δ}⌋"""
    return int(np.floor((1 - delta) * np.log2(n) + 1e-12))


def decompose_mass(sample: CueSample, beta: float, spec: BarrierSpec, delta: float, m: int,
                   phi: PhiLike = None, grid_size: int = config.GRID_SIZE) -> MassSample:
    """
    Split ∫φ dμ_{N,β} = G + E⁽¹⁾ + E⁽²⁾ on the grid

    G    = ∫φ 1{B_{l,M}} dμ^{(M)}
    E⁽¹⁾ = ∫φ 1{not B_{l}} dμ
    E⁽²⁾ = ∫φ 1{B_{l}} dμ − G

    B_l uses scales l..k_N with k_N = ⌊log₂ N^{1−δ}⌋, B_{l,M} uses l..⌊log₂ M⌋.
    spec.top is replaced by these two ranges.
    """
    n = sample.n
    k_n = dyadic_top(n, delta)
    k_m = int(np.floor(np.log2(m) + 1e-12))
    if 2 ** spec.l > m or m > n:
        raise InvalidArgumentError(f"need 2^l ≤ M ≤ N, got l={spec.l}, M={m}, N={n}")
    if k_n < spec.l:
        raise InvalidArgumentError(f"no dyadic scales between l={spec.l} and k_N={k_n}")

    scales = {
        k: field_on_grid(sample, grid_size, "truncated", 2 ** k).values
        for k in range(spec.l, max(k_n, k_m) + 1)
    }
    inside_full = barrier_mask(scales, spec.with_range(spec.l, k_n))
    inside_m = barrier_mask(scales, spec.with_range(spec.l, k_m))

    weights = weight_grid(phi, grid_size)
    full = field_on_grid(sample, grid_size, "full")
    truncated = field_on_grid(sample, grid_size, "truncated", m)
    dens_full = weights * _density(full.values, beta, normalizer_exact(n, float(beta)))
    dens_m = weights * _density(truncated.values, beta, truncated_normalizer(n, m, float(beta)))

    g = float(np.mean(np.where(inside_m, dens_m, 0.0)))
    e1 = float(np.mean(np.where(inside_full, 0.0, dens_full)))
    e2 = float(np.mean(np.where(inside_full, dens_full, 0.0))) - g
    return MassSample(n, m, beta, grid_size, float(np.mean(dens_full)),
                      sample.seed, sample.stream, g, e1, e2)


# ---------------------------------------------------------------------------
# Tilted (biased) estimators
# ---------------------------------------------------------------------------

@dataclass
class BiasedDraws:
    """X_N at θ and θ′ plus the dyadic truncations X_{N,2^k} there, one entry per draw"""

    x_theta: np.ndarray
    x_theta_prime: np.ndarray
    scales_theta: Dict[int, np.ndarray]
    scales_theta_prime: Dict[int, np.ndarray]

    def __len__(self) -> int:
        return len(self.x_theta)


def collect_biased_draws(n: int, theta: float, theta_prime: float, ks: Sequence[int],
                         draws: int, stream: np.random.Generator) -> BiasedDraws:
    batch = CueBatch.draw(n, draws, stream)
    x = batch.field_at([theta, theta_prime], "full")
    scales = {k: batch.field_at([theta, theta_prime], "truncated", 2 ** k) for k in ks}
    return BiasedDraws(
        x[:, 0], x[:, 1],
        {k: v[:, 0] for k, v in scales.items()},
        {k: v[:, 1] for k, v in scales.items()},
    )


@dataclass(frozen=True)
class BiasedEstimate:
    estimate: float
    stderr: float
    ess: float
    draws: int
    unreliable: bool


def biased_probability_mc(draws: BiasedDraws, beta: float,
                          event: Tuple[BarrierSpec, BarrierSpec],
                          min_draws: int = 1000) -> BiasedEstimate:
    """
    Self-normalized estimate of ℚ(B(θ) ∩ B(θ′)) with weights e^{β(X_N(θ)+X_N(θ′))}

    The standard error is the leave-one-out jackknife of the ratio estimator.
    The estimate is flagged unreliable when the effective sample size falls
    below MIN_ESS; its bias is of order 1/ess.
    """
    size = len(draws)
    if size < min_draws:
        raise InvalidArgumentError(f"need at least {min_draws} draws, got {size}")
    log_w = beta * (draws.x_theta + draws.x_theta_prime)
    finite = np.isfinite(log_w)
    w = np.zeros(size)
    w[finite] = np.exp(log_w[finite] - np.max(log_w[finite]))
    hits = (barrier_mask(draws.scales_theta, event[0])
            & barrier_mask(draws.scales_theta_prime, event[1])).astype(float)

    total_w = w.sum()
    total_hit = (w * hits).sum()
    estimate = total_hit / total_w
    remaining = total_w - w
    if np.any(remaining <= 0):
        # one draw carries all the weight; leaving it out leaves nothing
        stderr = float("nan")
    else:
        loo = (total_hit - w * hits) / remaining
        stderr = float(np.sqrt((size - 1) / size * np.sum((loo - loo.mean()) ** 2)))
    ess = float(total_w ** 2 / np.sum(w ** 2))
    return BiasedEstimate(float(estimate), stderr, ess, size, ess < config.MIN_ESS)


@dataclass(frozen=True)
class TiltedMean:
    """Tilted means of Tr U^j/√j for j = 1..l with their standard errors"""

    mean: np.ndarray
    stderr: np.ndarray
    ess: float


def tilted_trace_mean(x_theta: np.ndarray, x_theta_prime: np.ndarray, traces: np.ndarray,
                      beta: float) -> TiltedMean:
    """
    Self-normalized mean of (Tr U^j/√j)_j under weights e^{β(X_N(θ)+X_N(θ′))}

    Args:
        x_theta, x_theta_prime: X_N at θ and θ′, one entry per draw
        traces: Tr U^j for j = 1..l, shape (draws, l)
        beta: Tilt

    Returns:
        TiltedMean; stderr is the delta-method error of the ratio, E|x − mean|² style
    """
    traces = np.atleast_2d(np.asarray(traces, dtype=complex))
    if traces.shape[0] != len(x_theta) or len(x_theta) != len(x_theta_prime):
        raise InvalidArgumentError("field values and traces must have one row per draw")
    if traces.shape[0] < 2:
        raise InvalidArgumentError("need at least two draws")
    log_w = beta * (np.asarray(x_theta, dtype=float) + np.asarray(x_theta_prime, dtype=float))
    finite = np.isfinite(log_w)
    w = np.zeros(len(log_w))
    w[finite] = np.exp(log_w[finite] - np.max(log_w[finite]))
    w /= w.sum()
    scaled = traces / np.sqrt(np.arange(1, traces.shape[1] + 1))
    mean = w @ scaled
    stderr = np.sqrt((w ** 2) @ np.abs(scaled - mean) ** 2)
    return TiltedMean(mean, stderr, float(1.0 / np.sum(w ** 2)))
