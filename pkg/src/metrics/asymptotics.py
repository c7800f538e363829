"""
Closed-form predictions for exponential moments of the characteristic
polynomial, evaluated as exact finite sums
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import gamma as gamma_fn

from src.errors import InvalidArgumentError


def harmonic(k: int) -> float:
    """H_k = Σ_{j≤k} 1/j (0 for k ≤ 0)"""
    if k <= 0:
        return 0.0
    return float(np.sum(1.0 / np.arange(1, k + 1)))


def cosine_sum(k: int, delta: float) -> float:
    """Σ_{j≤k} cos(jδ)/j"""
    if k <= 0:
        return 0.0
    j = np.arange(1, k + 1)
    return float(np.sum(np.cos(j * delta) / j))


def _arc_distance(theta: float, theta_prime: float) -> float:
    diff = abs(float(np.mod(theta - theta_prime, 2 * np.pi)))
    return min(diff, 2 * np.pi - diff)


@dataclass
class TestimateParams:
    """Parameters of the mixed exponential moment E e^{Tr𝒯 + α₁X_{K₁} + α₂X_{K₂} + β₁X + β₂X′}"""

    __test__ = False  # not a pytest class

    alpha1: float = 0.0
    alpha2: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    k1: int = 1
    k2: int = 1
    theta: float = 0.0
    theta_prime: float = 0.0
    t_coeffs: Dict[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if not 1 <= self.k1 <= self.k2:
            raise InvalidArgumentError(f"need 1 ≤ k1 ≤ k2, got k1={self.k1}, k2={self.k2}")
        if self.beta1 < 0 or self.beta2 < 0:
            raise InvalidArgumentError("beta1 and beta2 must be nonnegative")
        self.t_coeffs = {int(k): complex(v) for k, v in self.t_coeffs.items()}
        for k, v in self.t_coeffs.items():
            if abs(self.t_coeffs.get(-k, 0) - np.conj(v)) > 1e-12 * max(1.0, abs(v)):
                raise InvalidArgumentError("trace statistic must be real on the circle")

    @property
    def m(self) -> int:
        return max((abs(k) for k in self.t_coeffs), default=0)

    def t(self, k: int) -> complex:
        return self.t_coeffs.get(k, 0j)

    def t_at(self, angle: float) -> complex:
        """𝒯(e^{i·angle})"""
        return sum((v * np.exp(1j * k * angle) for k, v in self.t_coeffs.items()), 0j)


def _t_projection(params: TestimateParams, top: int, angle: float) -> complex:
    """Σ_{k≤top}(𝒯_k e^{ik·angle} + 𝒯_{−k}e^{−ik·angle})"""
    return sum(
        (params.t(k) * np.exp(1j * k * angle) + params.t(-k) * np.exp(-1j * k * angle)
         for k in range(1, top + 1)),
        0j,
    )


def testimate_exponent(params: TestimateParams) -> complex:
    """The exponent whose exponential predict_testimate returns"""
    a1, a2, b1, b2 = params.alpha1, params.alpha2, params.beta1, params.beta2
    k1, k2, m = params.k1, params.k2, params.m
    delta = params.theta - params.theta_prime
    exponent = (a1 ** 2 + 2 * a1 * a2 + 2 * a1 * b1) / 4 * harmonic(k1)
    exponent += (a2 ** 2 + 2 * a2 * b1) / 4 * harmonic(k2)
    exponent += a1 * b2 / 2 * cosine_sum(k1, delta)
    exponent += a2 * b2 / 2 * cosine_sum(k2, delta)
    exponent += sum((k * params.t(k) * params.t(-k) for k in range(1, m + 1)), 0j)
    exponent -= a1 / 2 * _t_projection(params, min(k1, m), params.theta)
    exponent -= a2 / 2 * _t_projection(params, min(k2, m), params.theta)
    exponent -= b1 / 2 * params.t_at(params.theta)
    exponent -= b2 / 2 * params.t_at(params.theta_prime)
    return complex(exponent)


def predict_testimate(params: TestimateParams) -> float:
    """
    Leading-order ratio E[e^{Tr𝒯 + α₁X_{K₁}(θ) + α₂X_{K₂}(θ) + β₁X(θ) + β₂X(θ′)}] / E[e^{β₁X(θ) + β₂X(θ′)}]

    Args:
        params: TestimateParams

    Returns:
        exp of the exact finite-sum exponent
    """
    return float(np.exp(testimate_exponent(params).real))


def predict_corollary(mode: str, params: TestimateParams, m: Optional[int] = None) -> float:
    """
    Specializations of predict_testimate

    onept:       E e^{αX_{N,K}(θ)+βX_N(θ)} / E e^{βX_N(θ)} with α=alpha1, β=beta1, K=k1
    twopt_mixed: E e^{α₁X_{K₁}(θ)+α₂X_{K₂}(θ)+βX_{N,M}(θ′)} ratio, β=beta1, M=m
    twopt_full:  E e^{α₁X_{K₁}(θ)+α₂X_{K₂}(θ)+βX_N(θ)+βX_N(θ′)} ratio, β=beta1
    """
    a1, a2, beta = params.alpha1, params.alpha2, params.beta1
    k1, k2 = params.k1, params.k2
    delta = params.theta - params.theta_prime
    if mode == "onept":
        exponent = (a1 ** 2 / 2 + a1 * beta) * harmonic(k1) / 2
    elif mode == "twopt_mixed":
        if m is None or m < 1:
            raise InvalidArgumentError("twopt_mixed needs the truncation m of X_{N,M}(θ′)")
        exponent = harmonic(k1) * (a1 ** 2 / 4 + a1 * beta / 2 + a1 * a2 / 2)
        exponent += harmonic(k2) * (a2 ** 2 / 4 + a2 * beta / 2)
        exponent += a1 * beta / 2 * cosine_sum(min(k1, m), delta)
        exponent += a2 * beta / 2 * cosine_sum(min(k2, m), delta)
    elif mode == "twopt_full":
        exponent = sum(
            (a1 ** 2 / 4 + a1 * beta / 2 * (np.cos(j * delta) + 1) + a1 * a2 / 2) / j
            for j in range(1, k1 + 1)
        )
        exponent += sum(
            (a2 ** 2 / 4 + a2 * beta / 2 * (np.cos(j * delta) + 1)) / j
            for j in range(1, k2 + 1)
        )
    else:
        raise InvalidArgumentError(f"unknown corollary mode {mode!r}")
    return float(np.exp(exponent))


def widom_limit(s: Sequence[float], t: Sequence[float], theta: float, theta_prime: float,
                beta: float, l: int) -> complex:
    """
    Limit of the trace-mgf ratio under the two-point tilt

    exp(−(β/2)Σ_j[(s_j+it_j)/√j (e^{ijθ}+e^{ijθ′}) + (s_j−it_j)/√j (e^{−ijθ}+e^{−ijθ′})]) · exp(Σ(s_j²+t_j²))
    """
    if theta == theta_prime:
        raise InvalidArgumentError("the two points must be distinct")
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if s.shape != (l,) or t.shape != (l,):
        raise InvalidArgumentError(f"s and t must have length {l}")
    j = np.arange(1, l + 1)
    plus = np.exp(1j * j * theta) + np.exp(1j * j * theta_prime)
    drift = np.sum((s + 1j * t) / np.sqrt(j) * plus + (s - 1j * t) / np.sqrt(j) * np.conj(plus))
    return complex(np.exp(-beta / 2 * drift + np.sum(s ** 2 + t ** 2)))


def widom_trace_coefficients(s: Sequence[float], t: Sequence[float]) -> Dict[int, complex]:
    """Laurent coefficients of Σ_j[s_j(z^j+z^{−j}) + it_j(z^j−z^{−j})]/√j"""
    out: Dict[int, complex] = {}
    for j, (sj, tj) in enumerate(zip(s, t), start=1):
        out[j] = (sj + 1j * tj) / np.sqrt(j)
        out[-j] = (sj - 1j * tj) / np.sqrt(j)
    return out


def dik_limit(beta1: float, beta2: float, theta: float, theta_prime: float,
              m: Optional[int] = None) -> float:
    """
    Two-point interaction factor

    Full field: |e^{iθ}−e^{iθ′}|^{−β₁β₂/2}; truncated at M:
    exp((β₁β₂/2)Σ_{j≤M}cos j(θ−θ′)/j).
    """
    product = beta1 * beta2
    if m is not None:
        return float(np.exp(product / 2 * cosine_sum(m, theta - theta_prime)))
    if _arc_distance(theta, theta_prime) == 0:
        raise InvalidArgumentError("the full-field factor needs θ ≠ θ′")
    if product == 0:
        return 1.0
    return float(abs(np.exp(1j * theta) - np.exp(1j * theta_prime)) ** (-product / 2))


def logsum(m: int, delta: float) -> Tuple[float, float]:
    """
    (Σ_{j≤M} cos(jΔ)/j, that sum minus min(log⁺ d⁻¹, log M))

    d is the arc distance of Δ from 0.
    """
    if m < 1:
        raise InvalidArgumentError(f"m must be positive, got {m}")
    total = cosine_sum(m, delta)
    d = _arc_distance(delta, 0.0)
    log_plus = np.inf if d == 0 else max(0.0, -np.log(d))
    return total, float(total - min(log_plus, np.log(m)))


def log_kernel(theta: float, theta_prime: float) -> float:
    """Limit covariance −½log|e^{iθ}−e^{iθ′}|"""
    return float(-0.5 * np.log(abs(np.exp(1j * theta) - np.exp(1j * theta_prime))))


# ---------------------------------------------------------------------------
# Total-mass law
# ---------------------------------------------------------------------------

def _fb_shape(beta: float) -> float:
    if not 0 < beta < 2:
        raise InvalidArgumentError(f"beta must lie in (0, 2), got {beta}")
    return beta ** 2 / 4


def fb_law(beta: float):
    """W = Y^{−β²/4}/Γ(1−β²/4) as a frozen Fréchet (inverse Weibull) law"""
    a = _fb_shape(beta)
    return stats.invweibull(c=1 / a, scale=1 / gamma_fn(1 - a))


def fb_cdf(beta: float, w):
    """P(W ≤ w) = exp(−(Γ(1−a)w)^{−1/a}), a = β²/4"""
    a = _fb_shape(beta)
    w = np.asarray(w, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(w > 0, np.exp(-(gamma_fn(1 - a) * np.maximum(w, 1e-300)) ** (-1 / a)), 0.0)
    return float(out) if out.ndim == 0 else out


def fb_sample(beta: float, stream: np.random.Generator, size: Optional[int] = None):
    """Map Exp(1) draws Y through Y^{−β²/4}/Γ(1−β²/4)"""
    a = _fb_shape(beta)
    y = stream.exponential(1.0, size)
    return y ** (-a) / gamma_fn(1 - a)


def fb_moment(beta: float, q: float) -> float:
    """E W^q = Γ(1−qa)/Γ(1−a)^q for qa < 1"""
    a = _fb_shape(beta)
    if q * a >= 1:
        raise InvalidArgumentError(f"moment of order {q} is infinite for beta={beta}")
    return float(gamma_fn(1 - q * a) / gamma_fn(1 - a) ** q)


def e1_union_bound(beta: float, gamma: float, l: int, top: int) -> float:
    """
    Σ_{k=l}^{top} exp(−(γ−β)²·H_{2^k}/4)

    Bounds E[E⁽¹⁾]/‖φ‖∞ up to a constant: an exponential Chebyshev bound with
    tilt γ−β applied at each scale, whose variance is H_{2^k}/2.
    """
    if gamma <= beta:
        raise InvalidArgumentError("the union bound needs gamma > beta")
    rate = -(gamma - beta) ** 2 / 4
    return float(sum(np.exp(rate * harmonic(2 ** k)) for k in range(l, top + 1)))


def ck_target_slope(beta: float) -> float:
    """Mesoscopic scaling exponent of the two-point ratio in d(θ,θ′)"""
    return -beta ** 2 / 2
