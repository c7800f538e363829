"""
Toeplitz determinants, orthogonal polynomials on the unit circle, the first
column of the orthogonal-polynomial matrix Y and the differential identity
"""
import warnings
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import LinAlgWarning, lu_factor

import config
from src.errors import (ConsistencyError, InvalidArgumentError, InvalidSymbolError,
                        PrecisionFailureError)
from src.toeplitz.symbol import FourierCoefficients, Symbol, deformed_coefficients


@dataclass(frozen=True)
class DeterminantResult:
    """det of an n×n Toeplitz matrix as sign · exp(log_abs)"""

    value: complex
    log_abs: float
    sign: complex
    degenerate: bool = False


@dataclass
class ToeplitzResult:
    """
    D_0..D_{n−1}, χ_0..χ_{n−1} and the recursion data behind them

    D_j = Π_{k≤j} χ_k^{−2}. ``monic`` holds the ascending coefficients of
    the monic orthogonal polynomials Φ_0..Φ_order.
    """

    dets: np.ndarray
    chis: np.ndarray
    log_dets: np.ndarray
    verblunsky: np.ndarray
    norms: np.ndarray
    monic: List[np.ndarray]

    @property
    def determinant(self) -> float:
        return float(self.dets[-1])


def toeplitz_det(fhat: FourierCoefficients, n: int) -> DeterminantResult:
    """
    D_{n−1} = det(f̂_{j−k})_{0≤j,k<n} by LU with partial pivoting

    Args:
        fhat: Coefficients spanning |j| ≤ n−1
        n: Matrix order

    Returns:
        DeterminantResult; a singular matrix gives value 0 with degenerate set
    """
    if n < 1:
        raise InvalidArgumentError(f"matrix order must be positive, got {n}")
    matrix = fhat.toeplitz(n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(matrix)
    diag = np.diag(lu)
    if np.any(diag == 0) or not np.all(np.isfinite(diag)):
        return DeterminantResult(0.0, -np.inf, 0.0, True)
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    sign = (-1) ** swaps * np.prod(diag / np.abs(diag))
    log_abs = float(np.sum(np.log(np.abs(diag))))
    value = sign * np.exp(log_abs)
    if abs(np.imag(sign)) <= 1e-12:
        sign = float(np.real(sign))
        value = float(np.real(value))
    return DeterminantResult(value, log_abs, sign)


def _szego_recursion(fhat: FourierCoefficients, order: int) -> ToeplitzResult:
    """Monic OPUC Φ_0..Φ_order with ‖Φ_k‖² and α_k, O(order²)"""
    if order > fhat.count:
        raise InvalidArgumentError(f"order {order} needs coefficients up to |j| ≤ {order}")
    if not fhat.is_hermitian(1e-10):
        raise InvalidSymbolError("orthogonal polynomials need a real symbol (Hermitian moments)")
    moments = fhat.window(-order, 0)[::-1] if order else np.empty(0)  # f̂_0, f̂_{−1}, ...
    norms = np.empty(order + 1)
    norms[0] = float(np.real(fhat[0]))
    alphas = np.empty(order, dtype=complex)
    phi = np.ones(1, dtype=complex)
    monic = [phi]
    for k in range(order + 1):
        if not np.isfinite(norms[k]) or norms[k] <= 0:
            raise PrecisionFailureError(f"moment matrix lost positive definiteness at order {k}")
        if k == order:
            break
        # ⟨zΦ_k, 1⟩ = Σ_i φ_i f̂_{−(i+1)}
        inner = np.dot(phi, moments[1:k + 2])
        conj_alpha = inner / norms[k]
        alphas[k] = np.conj(conj_alpha)
        nxt = np.zeros(k + 2, dtype=complex)
        nxt[1:] = phi
        nxt[:k + 1] -= conj_alpha * np.conj(phi[::-1])
        phi = nxt
        monic.append(phi)
        norms[k + 1] = norms[k] * (1.0 - abs(alphas[k]) ** 2)
    log_dets = np.cumsum(np.log(norms))
    return ToeplitzResult(
        dets=np.exp(log_dets),
        chis=norms ** -0.5,
        log_dets=log_dets,
        verblunsky=alphas,
        norms=norms,
        monic=monic,
    )


def opuc_chi(fhat: FourierCoefficients, n: int) -> ToeplitzResult:
    """
    Leading coefficients χ_j = sqrt(D_{j−1}/D_j) for j < n

    Runs the Szegő (Levinson–Durbin) recursion on the moments; D_{n−1} is
    Π χ_j^{−2}.

    Raises:
        PrecisionFailureError: a pivot became nonpositive
    """
    if n < 1:
        raise InvalidArgumentError(f"order must be positive, got {n}")
    return _szego_recursion(fhat, n - 1)


def checked_determinant(fhat: FourierCoefficients, n: int,
                        tol: Optional[float] = None) -> DeterminantResult:
    """toeplitz_det cross-checked against the χ-product; raises when they disagree"""
    tol = config.DET_CONSISTENCY_TOL if tol is None else tol
    direct = toeplitz_det(fhat, n)
    chain = opuc_chi(fhat, n)
    gap = abs(np.expm1(chain.log_dets[-1] - direct.log_abs))
    if direct.degenerate or abs(direct.sign - 1.0) > tol or gap > tol:
        raise ConsistencyError(
            f"determinant routes disagree at order {n}: LU {direct.value!r}, "
            f"χ-product {chain.determinant!r} (relative gap {gap:.2e})"
        )
    return direct


@dataclass(frozen=True)
class YColumn:
    """Y₁₁, Y₂₁ and their z-derivatives at the requested points"""

    y11: np.ndarray
    y21: np.ndarray
    dy11: np.ndarray
    dy21: np.ndarray


def y_first_column(fhat: FourierCoefficients, n: int, z) -> YColumn:
    """
    First column of Y: Y₁₁ = Φ_n(z), Y₂₁ = −χ_{n−1}² Φ*_{n−1}(z)

    Φ_n is the monic orthogonal polynomial, and χ_{n−1}² Φ*_{n−1}(z) equals
    χ_{n−1} z^{n−1} p̄_{n−1}(1/z) for the orthonormal p_{n−1}.
    """
    if n < 1:
        raise InvalidArgumentError(f"order must be positive, got {n}")
    rec = _szego_recursion(fhat, n)
    z = np.asarray(z, dtype=complex)
    top = rec.monic[n]
    reversed_prev = np.conj(rec.monic[n - 1][::-1]) / rec.norms[n - 1]
    return YColumn(
        y11=P.polyval(z, top),
        y21=-P.polyval(z, reversed_prev),
        dy11=P.polyval(z, P.polyder(top)),
        dy21=-P.polyval(z, P.polyder(reversed_prev)) if n > 1 else np.zeros_like(z),
    )


def _log_det(symbol: Symbol, t: float, n: int) -> float:
    return toeplitz_det(deformed_coefficients(symbol, t, n - 1), n).log_abs


def _finite_difference(symbol: Symbol, n: int, t: float, h: float) -> float:
    """d/dt log D_{n−1}(f_t), Richardson-extrapolated"""
    def central(step):
        return (_log_det(symbol, t + step, n) - _log_det(symbol, t - step, n)) / (2 * step)

    def one_sided(step, direction):
        s = direction * step
        return direction * (
            -3 * _log_det(symbol, t, n) + 4 * _log_det(symbol, t + s, n) - _log_det(symbol, t + 2 * s, n)
        ) / (2 * step)

    if t - h >= 0 and t + h <= 1:
        return (4 * central(h / 2) - central(h)) / 3
    direction = 1 if t - h < 0 else -1
    return (4 * one_sided(h / 2, direction) - one_sided(h, direction)) / 3


def _contour_integral(symbol: Symbol, ycol_fhat: FourierCoefficients, n: int, points: int) -> complex:
    theta = 2 * np.pi * np.arange(points) / points
    z = np.exp(1j * theta)
    y = y_first_column(ycol_fhat, n, z)
    df = (symbol.smooth(z) - 1.0) * symbol.singular_factor(z)
    integrand = z ** (1 - n) * (y.y11 * y.dy21 - y.y21 * y.dy11) * df
    return complex(np.mean(integrand))


def differential_identity_check(symbol: Symbol, n: int, t: float,
                                grid_size: int = 1024, step: float = 1e-2) -> Tuple[float, float, float]:
    """
    Compare both sides of ∂_t log D_{n−1}(f_t) = (1/2πi)∮ z^{−n}(Y₁₁Y₂₁′ − Y₂₁Y₁₁′)∂_t f_t dz

    The left side comes from finite differences of log-determinants, the right
    side from the trapezoid rule on the circle, doubling grid_size until two
    successive values agree to CONTOUR_TOL.

    Returns:
        (lhs, rhs, |lhs − rhs|)
    """
    if not 1 <= n <= 32:
        raise InvalidArgumentError(f"differential identity check is desk-scale (1 ≤ n ≤ 32), got {n}")
    if not 0 <= t <= 1:
        raise InvalidArgumentError(f"t must lie in [0, 1], got {t}")
    if not symbol.laurent:
        return 0.0, 0.0, 0.0
    lhs = _finite_difference(symbol, n, t, step)
    fhat_t = deformed_coefficients(symbol, t, n)
    points = grid_size
    previous = _contour_integral(symbol, fhat_t, n, points)
    while True:
        points *= 2
        if points > config.CONTOUR_MAX_POINTS:
            raise PrecisionFailureError("contour quadrature did not stabilize")
        current = _contour_integral(symbol, fhat_t, n, points)
        if abs(current - previous) < config.CONTOUR_TOL:
            break
        previous = current
    rhs = float(np.real(current))
    return float(lhs), rhs, float(abs(lhs - current))
