"""
Statistical checks used by the experiments: empirical laws, KS tests,
log-log scaling fits and standard-error bands
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Sequence, Tuple, Union

import numpy as np
from scipy import stats

import config
from src.errors import InvalidArgumentError


@dataclass
class EmpiricalLaw:
    """Sorted finite sample plus where it came from"""

    values: np.ndarray
    source: str = ""
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError(f"empirical law {self.source!r} has non-finite values")
        self.values = np.sort(values)

    @property
    def size(self) -> int:
        return len(self.values)

    def cdf(self, x) -> np.ndarray:
        """Right-continuous empirical CDF"""
        return np.searchsorted(self.values, x, side="right") / self.size


Reference = Union[Callable, EmpiricalLaw, np.ndarray]


def ks_test(sample: EmpiricalLaw, reference: Reference,
            min_size: int = config.MIN_KS_SIZE) -> Tuple[float, float]:
    """
    One-sample KS against a CDF, or two-sample KS against another sample

    Args:
        sample: EmpiricalLaw with at least min_size values
        reference: Callable CDF, EmpiricalLaw or raw sample

    Returns:
        (statistic, p_value)
    """
    if sample.size < min_size:
        raise InvalidArgumentError(f"KS test needs at least {min_size} values, got {sample.size}")
    if callable(reference):
        result = stats.kstest(sample.values, reference)
    else:
        other = reference if isinstance(reference, EmpiricalLaw) else EmpiricalLaw(reference)
        if other.size < min_size:
            raise InvalidArgumentError(f"KS test needs at least {min_size} values, got {other.size}")
        result = stats.ks_2samp(sample.values, other.values)
    return float(result.statistic), float(result.pvalue)


def scaling_regression(x: Sequence[float], y: Sequence[float],
                       min_span: float = 10.0) -> Tuple[float, float]:
    """
    Least-squares slope of log y against log x

    Args:
        x, y: Positive values, at least 5 points
        min_span: Required ratio max(x)/min(x)

    Returns:
        (slope, standard error of the slope)
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 5:
        raise InvalidArgumentError("scaling regression needs at least 5 matching points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidArgumentError("log-log regression needs positive data")
    if x.max() / x.min() < min_span * (1 - 1e-12):
        raise InvalidArgumentError(f"x spans a factor {x.max() / x.min():.3g}, need {min_span:g}")
    log_y = np.log(y)
    if np.ptp(log_y) == 0:
        return 0.0, 0.0
    fit = stats.linregress(np.log(x), log_y)
    return float(fit.slope), float(fit.stderr)


def mean_with_stderr(values) -> Tuple[complex, float]:
    """Sample mean and its standard error; complex input uses E|x − mean|²"""
    values = np.asarray(values)
    if values.size < 2:
        raise InvalidArgumentError("need at least two values for a standard error")
    mean = values.mean()
    spread = np.sqrt(np.mean(np.abs(values - mean) ** 2) * values.size / (values.size - 1))
    mean = float(mean) if not np.iscomplexobj(values) else complex(mean)
    return mean, float(spread / np.sqrt(values.size))


def z_score(value, target, stderr: float) -> float:
    """|value − target| in units of stderr (0 when both agree exactly)"""
    gap = abs(value - target)
    if gap == 0:
        return 0.0
    return float(gap / stderr) if stderr > 0 else float("inf")
