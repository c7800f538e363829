"""
Fisher–Hartwig symbols f(z) = e^{V(z)} Π_i |z − e^{iu_i}|^{β_i} and their
Fourier coefficients
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import fftconvolve
from scipy.special import gammaln

import config
from src.errors import InvalidArgumentError, InvalidSymbolError, PrecisionFailureError

TWO_PI = 2 * np.pi


def wrap_angle(angle: float) -> float:
    """Representative of an angle in (−π, π]"""
    wrapped = float(np.mod(angle + np.pi, TWO_PI) - np.pi)
    return np.pi if wrapped == -np.pi else wrapped


def arc_distance(theta: float, theta_prime: float) -> float:
    """d(θ,θ′) = min(|θ−θ′|, 2π − |θ−θ′|) after reduction mod 2π"""
    diff = abs(float(np.mod(theta - theta_prime, TWO_PI)))
    return min(diff, TWO_PI - diff)


@dataclass(frozen=True)
class Singularity:
    angle: float
    exponent: float


@dataclass
class Symbol:
    """
    Analytic Laurent part V plus a list of root-type singularities

    laurent maps j to V_j. When real_valued is set, V_{-j} = conj(V_j) and the
    symbol is real and positive on the circle.
    """

    laurent: Dict[int, complex] = field(default_factory=dict)
    singularities: Tuple[Singularity, ...] = ()
    real_valued: bool = True
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.laurent = {int(j): complex(v) for j, v in self.laurent.items() if v != 0}
        self.singularities = tuple(
            Singularity(wrap_angle(s.angle), float(s.exponent)) for s in self.singularities
        )
        for s in self.singularities:
            if s.exponent < 0:
                raise InvalidSymbolError(f"singularity exponent must be nonnegative, got {s.exponent}")
        if self.real_valued:
            for j, v in self.laurent.items():
                if abs(self.laurent.get(-j, 0) - np.conj(v)) > 1e-12 * max(1.0, abs(v)):
                    raise InvalidSymbolError(f"V_{-j} must equal conj(V_{j}) for a real symbol")

    @property
    def degree(self) -> int:
        return max((abs(j) for j in self.laurent), default=0)

    def coefficient(self, j: int) -> complex:
        return self.laurent.get(j, 0j)

    def V(self, z) -> np.ndarray:
        """Σ_j V_j z^j"""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for j, v in self.laurent.items():
            out = out + v * z ** j
        return out

    def smooth(self, z) -> np.ndarray:
        values = np.exp(self.V(z))
        return values.real if self.real_valued else values

    def singular_factor(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.ones(z.shape)
        for s in self.singularities:
            if s.exponent:
                out = out * np.abs(z - np.exp(1j * s.angle)) ** s.exponent
        return out

    def __call__(self, z) -> np.ndarray:
        return self.smooth(z) * self.singular_factor(z)

    def without_smooth_part(self) -> "Symbol":
        return Symbol({}, self.singularities, True, dict(self.meta))

    def spectral_product(self, secular: np.ndarray, traces: np.ndarray) -> np.ndarray:
        """
        Π_j f(e^{iθ_j}) for each draw, without eigenvalues

        Args:
            secular: (size, n+1) monic coefficients of Φ_N
            traces: (size, k) power sums, k ≥ degree

        Returns:
            One value per draw (real for real symbols)
        """
        secular = np.atleast_2d(secular)
        traces = np.atleast_2d(traces)
        n = secular.shape[1] - 1
        if traces.shape[1] < self.degree:
            raise InvalidArgumentError(f"need traces up to {self.degree}, got {traces.shape[1]}")
        exponent = n * self.coefficient(0) * np.ones(secular.shape[0], dtype=complex)
        for k in range(1, self.degree + 1):
            tr = traces[:, k - 1]
            exponent = exponent + self.coefficient(k) * tr + self.coefficient(-k) * np.conj(tr)
        values = np.exp(exponent)
        for s in self.singularities:
            if s.exponent:
                powers = np.exp(1j * s.angle * np.arange(n + 1))
                values = values * np.abs(secular @ powers) ** s.exponent
        return values.real if self.real_valued else values


def real_laurent(positive: Mapping[int, complex]) -> Dict[int, complex]:
    """Complete {k: c_k, k > 0} with c_{-k} = conj(c_k)"""
    out: Dict[int, complex] = {}
    for k, v in positive.items():
        if k <= 0:
            raise InvalidArgumentError("only positive indices are completed by conjugation")
        out[k] = complex(v)
        out[-k] = complex(np.conj(v))
    return out


def log_singularity_laurent(weight: float, m: int, angle: float) -> Dict[int, complex]:
    """
    Laurent coefficients of weight · (−½)Σ_{k≤m}(1/k)(e^{−ik·angle}z^k + e^{ik·angle}z^{−k})

    As a linear statistic over the spectrum this is weight · X_{N,m}(angle).
    """
    out: Dict[int, complex] = {}
    if weight == 0:
        return out
    for k in range(1, m + 1):
        out[k] = -weight * np.exp(-1j * k * angle) / (2 * k)
        out[-k] = -weight * np.exp(1j * k * angle) / (2 * k)
    return out


def _merge_laurent(*parts: Mapping[int, complex]) -> Dict[int, complex]:
    out: Dict[int, complex] = {}
    for part in parts:
        for j, v in part.items():
            out[j] = out.get(j, 0j) + v
    return out


def build_symbol(theta: float, theta_prime: float, alpha1: float, alpha2: float,
                 k1: int, k2: int, t_coeffs: Optional[Mapping[int, complex]] = None,
                 *, beta1: float = 0.0, beta2: float = 0.0) -> Symbol:
    """
    The rotated two-point symbol

    After rotating by φ(θ,θ′), θ lands at ±u and θ′ at ∓u with u = d(θ,θ′)/2.
    θ−θ′ ∈ (0,π] ∪ (−2π,−π) puts θ at +u; θ−θ′ ∈ [−π,0) ∪ (π,2π) puts it at
    −u. θ = θ′ merges both singularities into one at angle 0 with exponent β₁+β₂.

    Args:
        theta, theta_prime: Angles in [0, 2π)
        alpha1, alpha2: Weights of X_{N,K₁}(θ), X_{N,K₂}(θ)
        k1, k2: Truncations, k1 ≤ k2
        t_coeffs: Laurent coefficients 𝒯_k of the trace statistic (both signs)
        beta1, beta2: Exponents of |z − e^{iθ}|, |z − e^{iθ′}|

    Returns:
        Symbol with meta holding the original parameters, u, φ and the case
    """
    for name, angle in (("theta", theta), ("theta_prime", theta_prime)):
        if not 0 <= angle < TWO_PI:
            raise InvalidArgumentError(f"{name} must lie in [0, 2π), got {angle}")
    if k1 > k2 or k1 < 1:
        raise InvalidArgumentError(f"need 1 ≤ k1 ≤ k2, got k1={k1}, k2={k2}")
    if beta1 < 0 or beta2 < 0:
        raise InvalidSymbolError("exponents must be nonnegative")
    t_coeffs = {int(k): complex(v) for k, v in (t_coeffs or {}).items()}
    if t_coeffs.get(0, 0) != 0:
        raise InvalidSymbolError("the trace statistic must not carry a constant term")

    diff = theta - theta_prime
    if diff == 0:
        u, phi, case = 0.0, theta, "merged"
        singularities = (Singularity(0.0, beta1 + beta2),)
        at_theta = 0.0
    else:
        u = arc_distance(theta, theta_prime) / 2
        phi = (theta + theta_prime) / 2 if abs(diff) <= np.pi else (theta + theta_prime + TWO_PI) / 2
        case = "A1" if (0 < diff <= np.pi or diff < -np.pi) else "A2"
        at_theta = u if case == "A1" else -u
        singularities = (Singularity(at_theta, beta1), Singularity(-at_theta, beta2))

    rotated_t = {k: v * np.exp(1j * k * phi) for k, v in t_coeffs.items()}
    laurent = _merge_laurent(
        rotated_t,
        log_singularity_laurent(alpha1, k1, at_theta),
        log_singularity_laurent(alpha2, k2, at_theta),
    )
    meta = dict(theta=theta, theta_prime=theta_prime, alpha1=alpha1, alpha2=alpha2,
                k1=k1, k2=k2, beta1=beta1, beta2=beta2, t_coeffs=t_coeffs,
                u=u, phi=phi, case=case)
    return Symbol(laurent, singularities, True, meta)


def fisher_hartwig_symbol(beta: float, angle: float = 0.0) -> Symbol:
    """|z − e^{i·angle}|^β"""
    return Symbol({}, (Singularity(angle, beta),))


# ---------------------------------------------------------------------------
# Fourier coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierCoefficients:
    """f̂_j for |j| ≤ count, stored at values[count + j]"""

    values: np.ndarray

    @property
    def count(self) -> int:
        return (len(self.values) - 1) // 2

    def __getitem__(self, j: int) -> complex:
        if abs(j) > self.count:
            raise IndexError(f"coefficient {j} outside |j| ≤ {self.count}")
        return self.values[self.count + j]

    def window(self, lo: int, hi: int) -> np.ndarray:
        """f̂_lo..f̂_hi inclusive"""
        if -lo > self.count or hi > self.count:
            raise InvalidArgumentError(f"window [{lo}, {hi}] exceeds |j| ≤ {self.count}")
        return self.values[self.count + lo:self.count + hi + 1]

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.values))))
        return bool(np.max(np.abs(self.values - np.conj(self.values[::-1]))) <= tol * scale)

    def toeplitz(self, n: int) -> np.ndarray:
        """The n×n matrix (f̂_{j−k})"""
        if n - 1 > self.count:
            raise InvalidArgumentError(f"an order-{n} matrix needs |j| ≤ {n - 1}, have {self.count}")
        column = self.window(0, n - 1)
        row = self.window(-(n - 1), 0)[::-1]
        return toeplitz(column, row)


def singular_family(beta: float, angle: float, count: int) -> np.ndarray:
    """
    Fourier coefficients of |z − e^{i·angle}|^β for |j| ≤ count

    ĉ_j = e^{−ij·angle}(−1)^j Γ(1+β)/(Γ(1+β/2+j)Γ(1+β/2−j)), generated by the
    ratio (j − β/2)/(j + 1 + β/2) from ĉ_0 = Γ(1+β)/Γ(1+β/2)².
    """
    c = np.empty(count + 1)
    c[0] = np.exp(gammaln(1 + beta) - 2 * gammaln(1 + beta / 2))
    if count:
        j = np.arange(count)
        c[1:] = c[0] * np.cumprod((j - beta / 2) / (j + 1 + beta / 2))
    positive = c * np.exp(-1j * angle * np.arange(count + 1))
    return np.concatenate([np.conj(positive[:0:-1]), positive])


def singular_coefficients(singularities, count: int) -> np.ndarray:
    """Coefficients of the product of singular factors for |j| ≤ count"""
    active = [s for s in singularities if s.exponent]
    if not active:
        out = np.zeros(2 * count + 1, dtype=complex)
        out[count] = 1.0
        return out
    if len(active) == 1:
        return singular_family(active[0].exponent, active[0].angle, count)
    tail = max(config.SINGULAR_TAIL, 2 * count)
    product = singular_family(active[0].exponent, active[0].angle, tail)
    for s in active[1:]:
        full = fftconvolve(product, singular_family(s.exponent, s.angle, tail))
        mid = len(full) // 2
        product = full[mid - tail:mid + tail + 1]
    return product[tail - count:tail + count + 1]


def _grid_coefficients(func: Callable, points: int, check_positive: bool) -> np.ndarray:
    theta = TWO_PI * np.arange(points) / points
    values = func(np.exp(1j * theta))
    if check_positive and np.any(np.real(values) <= 0):
        raise InvalidSymbolError("smooth factor is not positive on the sampling grid")
    c = np.fft.fft(values) / points
    half = points // 2 - 1
    return np.concatenate([c[points - half:], c[:half + 1]])


def smooth_coefficients(func: Callable, degree: int, check_positive: bool = False) -> np.ndarray:
    """
    Fourier coefficients of a smooth circle function by resolution doubling

    Doubling stops once two successive grids agree to FOURIER_TOL on every
    shared coefficient.

    Returns:
        Coefficients for |j| ≤ J, centered at index J
    """
    points = max(64, 1 << int(np.ceil(np.log2(4 * (degree + 1)))))
    previous = _grid_coefficients(func, points, check_positive)
    while True:
        points *= 2
        if points > config.FOURIER_MAX_POINTS:
            raise PrecisionFailureError(
                f"Fourier coefficients did not settle below {config.FOURIER_MAX_POINTS} points"
            )
        current = _grid_coefficients(func, points, check_positive)
        half = len(previous) // 2
        mid = len(current) // 2
        shared = current[mid - half:mid + half + 1]
        scale = max(1.0, float(np.max(np.abs(current))))
        if np.max(np.abs(shared - previous)) <= config.FOURIER_TOL * scale:
            return shared
        previous = current


def _combine(smooth: np.ndarray, singularities, count: int, real_valued: bool) -> FourierCoefficients:
    span = len(smooth) // 2
    sing = singular_coefficients(singularities, count + span)
    values = np.convolve(smooth, sing, mode="valid")
    if real_valued:
        values = (values + np.conj(values[::-1])) / 2
    return FourierCoefficients(values)


def fourier_coefficients(symbol: Symbol, count: int) -> FourierCoefficients:
    """
    f̂_j = (1/2π)∫ f(e^{iθ}) e^{−ijθ} dθ for |j| ≤ count

    Args:
        symbol: The symbol f
        count: Largest |j| required

    Returns:
        FourierCoefficients
    """
    if count < 0:
        raise InvalidArgumentError(f"count must be nonnegative, got {count}")
    if symbol.laurent:
        smooth = smooth_coefficients(symbol.smooth, symbol.degree)
    else:
        smooth = np.ones(1, dtype=complex)
    return _combine(smooth, symbol.singularities, count, symbol.real_valued)


def deformed_coefficients(symbol: Symbol, t: float, count: int) -> FourierCoefficients:
    """Coefficients of f_t = (1 − t + t e^V)·(singular factors), any real t"""
    if not symbol.laurent:
        smooth = np.ones(1, dtype=complex)
    else:
        smooth = smooth_coefficients(lambda z: 1 - t + t * symbol.smooth(z), symbol.degree,
                                     check_positive=symbol.real_valued)
    return _combine(smooth, symbol.singularities, count, symbol.real_valued)


def deform_symbol(symbol: Symbol, t: float, count: int) -> FourierCoefficients:
    """
    Coefficients of the deformation f_t with V_t = log(1 − t + t e^V)

    t = 0 leaves only the singular factors; t = 1 gives f itself.
    """
    if not 0 <= t <= 1:
        raise InvalidArgumentError(f"t must lie in [0, 1], got {t}")
    if not symbol.real_valued:
        raise InvalidSymbolError("deformation requires a symbol real on the circle")
    return deformed_coefficients(symbol, t, count)
