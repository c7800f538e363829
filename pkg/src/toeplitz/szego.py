"""
Szegő function of a Fisher–Hartwig symbol

For a singularity at angle a the factor (z − e^{ia})^{β/2} uses the branch of
arg(z − e^{ia}) in (a, a + 2π), cut along e^{ia}[1, ∞). Outside the disk the
extra z^{β/2} uses arg z ∈ (a, a + 2π), cut along e^{ia}[0, ∞). With these
choices 𝒟_in(0) = e^{V_0} and f = 𝒟_in,+ / 𝒟_out,− on the circle.
"""
import numpy as np

from src.errors import BranchCutError, InvalidArgumentError
from src.toeplitz.symbol import Symbol

CUT_TOL = 1e-13


def _branch_arg(w: np.ndarray, a: float) -> np.ndarray:
    """arg w in (a, a+2π); raises if w lies on the ray of direction a"""
    offset = np.mod(np.angle(w) - a, 2 * np.pi)
    if np.any(np.abs(w) == 0) or np.any((offset < CUT_TOL) | (offset > 2 * np.pi - CUT_TOL)):
        raise BranchCutError(f"point on the branch cut of direction {a:.6g}")
    return a + offset


def _laurent_sum(symbol: Symbol, z: np.ndarray, inside: bool) -> np.ndarray:
    out = np.zeros_like(z)
    for j, v in symbol.laurent.items():
        if (j >= 0) == inside:
            out = out + v * z ** j
    return out


def szego_function(symbol: Symbol, z, side: str = "in") -> np.ndarray:
    """
    𝒟_in(z) for |z| ≤ 1 or 𝒟_out(z) for |z| ≥ 1

    𝒟_in(z)  = e^{Σ_{j≥0}V_j z^j} Π (z − e^{ia})^{β/2} / (e^{iβa/2} e^{iβπ/2})
    𝒟_out(z)^{-1} = e^{Σ_{j<0}V_j z^j} Π (z − e^{ia})^{β/2} / z^{β/2}

    Args:
        symbol: The symbol f
        z: Evaluation points (scalar or array)
        side: "in" or "out"

    Returns:
        Complex values of 𝒟_in or 𝒟_out (not its inverse)

    Raises:
        BranchCutError: z lies on a cut
    """
    z = np.asarray(z, dtype=complex)
    if side not in ("in", "out"):
        raise InvalidArgumentError(f"side must be 'in' or 'out', got {side!r}")
    radius = np.abs(z)
    if side == "in" and np.any(radius > 1 + 1e-12):
        raise InvalidArgumentError("the inner Szegő function lives in the closed unit disk")
    if side == "out" and np.any(radius < 1 - 1e-12):
        raise InvalidArgumentError("the outer Szegő function lives outside the open unit disk")

    log_value = _laurent_sum(symbol, z, inside=(side == "in"))
    for s in symbol.singularities:
        if not s.exponent:
            continue
        half = s.exponent / 2
        w = z - np.exp(1j * s.angle)
        log_w = np.log(np.abs(w)) + 1j * _branch_arg(w, s.angle)
        if side == "in":
            log_value = log_value + half * log_w - 1j * half * (s.angle + np.pi)
        else:
            log_z = np.log(radius) + 1j * _branch_arg(z, s.angle)
            log_value = log_value + half * (log_w - log_z)
    value = np.exp(log_value)
    return value if side == "in" else 1.0 / value


def factorization_residual(symbol: Symbol, z) -> np.ndarray:
    """|𝒟_in(z)/𝒟_out(z) − f(z)| at points on the circle"""
    z = np.asarray(z, dtype=complex)
    return np.abs(szego_function(symbol, z, "in") / szego_function(symbol, z, "out") - symbol(z))
