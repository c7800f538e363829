import numpy as np
import pytest
from scipy import stats

from src.errors import InvalidArgumentError
from src.harness.statistics import EmpiricalLaw, ks_test, mean_with_stderr, scaling_regression, z_score


def test_empirical_law_is_sorted_and_finite():
    law = EmpiricalLaw([3.0, 1.0, 2.0], source="demo")
    np.testing.assert_array_equal(law.values, [1.0, 2.0, 3.0])
    assert law.cdf(2.0) == pytest.approx(2 / 3)
    assert law.cdf(0.5) == 0.0
    with pytest.raises(InvalidArgumentError):
        EmpiricalLaw([1.0, np.nan])


def test_sample_against_its_own_cdf_is_within_one_step(rng):
    law = EmpiricalLaw(rng.standard_normal(200))
    statistic, _ = ks_test(law, law.cdf)
    assert statistic <= 1 / law.size + 1e-12


def test_exponential_sample_against_exponential_cdf(rng):
    law = EmpiricalLaw(rng.exponential(1.0, 2000))
    _, p_value = ks_test(law, stats.expon.cdf)
    assert p_value > 0.001


def test_two_sample_mode(rng):
    a = EmpiricalLaw(rng.standard_normal(500))
    statistic, p_value = ks_test(a, rng.standard_normal(500))
    assert 0 <= statistic <= 1 and p_value > 0.001
    _, p_value = ks_test(a, EmpiricalLaw(rng.standard_normal(500) + 3))
    assert p_value < 1e-6


def test_small_samples_are_rejected(rng):
    with pytest.raises(InvalidArgumentError):
        ks_test(EmpiricalLaw(rng.standard_normal(10)), stats.norm.cdf)
    with pytest.raises(InvalidArgumentError):
        ks_test(EmpiricalLaw(rng.standard_normal(100)), rng.standard_normal(10))


def test_power_law_slope():
    x = np.geomspace(1e-3, 1.0, 12)
    slope, stderr = scaling_regression(x, 5 * x ** -1.0)
    assert slope == pytest.approx(-1.0)
    assert stderr == pytest.approx(0.0, abs=1e-10)


def test_constant_data_has_zero_slope():
    assert scaling_regression(np.geomspace(1, 100, 6), np.full(6, 2.0)) == (0.0, 0.0)


def test_regression_input_checks():
    with pytest.raises(InvalidArgumentError):
        scaling_regression([1, 2, 3, 4], [1, 2, 3, 4])
    with pytest.raises(InvalidArgumentError):
        scaling_regression(np.linspace(1, 2, 8), np.ones(8))
    assert scaling_regression(np.linspace(1, 2, 8), np.ones(8), min_span=2.0) == (0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        scaling_regression(np.geomspace(1, 100, 6), -np.ones(6))


def test_mean_with_stderr():
    mean, se = mean_with_stderr([1.0, 2.0, 3.0, 4.0])
    assert mean == 2.5
    assert se == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)
    mean, se = mean_with_stderr(np.array([1j, -1j]))
    assert mean == 0 and se == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        mean_with_stderr([1.0])


def test_z_score():
    assert z_score(1.0, 1.0, 0.0) == 0.0
    assert z_score(1.5, 1.0, 0.25) == pytest.approx(2.0)
    assert z_score(1.5, 1.0, 0.0) == np.inf
