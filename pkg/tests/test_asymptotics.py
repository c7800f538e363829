import numpy as np
import pytest

from src.errors import InvalidArgumentError
from src.metrics.asymptotics import (TestimateParams, ck_target_slope, cosine_sum, dik_limit, e1_union_bound,
                                     fb_cdf, fb_law, fb_moment, fb_sample, harmonic, log_kernel, logsum,
                                     predict_corollary, predict_testimate, widom_limit,
                                     widom_trace_coefficients)
from src.sampling.streams import make_stream


def test_harmonic_and_cosine_sums():
    assert harmonic(0) == 0.0
    assert harmonic(4) == pytest.approx(25 / 12)
    assert cosine_sum(3, 0.0) == pytest.approx(harmonic(3))
    assert cosine_sum(2, np.pi) == pytest.approx(-1 + 0.5)


def test_params_validation():
    with pytest.raises(InvalidArgumentError):
        TestimateParams(k1=3, k2=2)
    with pytest.raises(InvalidArgumentError):
        TestimateParams(beta1=-1.0)
    with pytest.raises(InvalidArgumentError):
        TestimateParams(t_coeffs={1: 1.0})
    assert TestimateParams(t_coeffs={2: 1j, -2: -1j}).m == 2


def test_trivial_prediction_is_one():
    assert predict_testimate(TestimateParams(beta1=1.0, beta2=0.5, theta=1.0)) == 1.0


def test_one_point_corollary_matches_general_formula():
    params = TestimateParams(alpha1=0.7, beta1=1.2, k1=5, k2=5)
    assert predict_corollary("onept", params) == pytest.approx(predict_testimate(params))


def test_two_point_full_corollary_matches_general_formula():
    params = TestimateParams(alpha1=0.4, alpha2=-0.3, beta1=0.8, beta2=0.8, k1=2, k2=5,
                             theta=0.3, theta_prime=2.0)
    assert predict_corollary("twopt_full", params) == pytest.approx(predict_testimate(params))


def test_two_point_mixed_corollary():
    params = TestimateParams(alpha1=0.5, beta1=1.0, k1=3, k2=3, theta=0.2, theta_prime=1.0)
    expected = np.exp(harmonic(3) * (0.25 / 4 + 0.25) + 0.25 * cosine_sum(2, -0.8))
    assert predict_corollary("twopt_mixed", params, m=2) == pytest.approx(expected)
    with pytest.raises(InvalidArgumentError):
        predict_corollary("twopt_mixed", params)
    with pytest.raises(InvalidArgumentError):
        predict_corollary("other", params)


def test_trace_statistic_terms():
    params = TestimateParams(t_coeffs={1: 0.3, -1: 0.3})
    assert predict_testimate(params) == pytest.approx(np.exp(0.09))


def test_dik_limit():
    assert dik_limit(1.0, 1.0, np.pi, 0.0) == pytest.approx(2 ** -0.5)
    assert dik_limit(0.0, 1.0, 1.0, 0.0) == 1.0
    assert dik_limit(1.0, 2.0, 0.5, 0.5, m=4) == pytest.approx(np.exp(harmonic(4)))
    with pytest.raises(InvalidArgumentError):
        dik_limit(1.0, 1.0, 0.5, 0.5)


def test_logsum_remainder():
    total, remainder = logsum(1000, 1e-6)
    assert total == pytest.approx(harmonic(1000), abs=1e-5)
    assert remainder == pytest.approx(harmonic(1000) - np.log(1000), abs=1e-5)
    _, remainder = logsum(1000, 0.0)
    assert remainder == pytest.approx(np.euler_gamma, abs=1e-3)
    with pytest.raises(InvalidArgumentError):
        logsum(0, 1.0)


def test_widom_limit():
    assert widom_limit([0.0, 0.0], [0.0, 0.0], 0.0, 1.0, 1.0, 2) == 1.0
    assert widom_limit([0.3], [0.0], 0.0, np.pi, 1.0, 1) == pytest.approx(np.exp(0.09))
    with pytest.raises(InvalidArgumentError):
        widom_limit([0.3], [0.0], 1.0, 1.0, 1.0, 1)
    with pytest.raises(InvalidArgumentError):
        widom_limit([0.3], [0.0, 0.1], 0.0, 1.0, 1.0, 1)
    coeffs = widom_trace_coefficients([0.2], [0.1])
    assert coeffs[1] == pytest.approx(0.2 + 0.1j) and coeffs[-1] == pytest.approx(0.2 - 0.1j)


def test_log_kernel_and_slope():
    assert log_kernel(np.pi, 0.0) == pytest.approx(-0.5 * np.log(2))
    assert ck_target_slope(np.sqrt(2)) == pytest.approx(-1.0)


def test_total_mass_law():
    w = np.array([0.3, 1.0, 2.5])
    np.testing.assert_allclose(fb_cdf(1.0, w), fb_law(1.0).cdf(w), rtol=1e-12)
    assert fb_cdf(1.0, 0.0) == 0.0
    assert fb_moment(1.0, 1) == pytest.approx(1.0)
    assert fb_law(1.0).mean() == pytest.approx(1.0)
    with pytest.raises(InvalidArgumentError):
        fb_moment(1.0, 4)
    with pytest.raises(InvalidArgumentError):
        fb_law(2.0)


@pytest.mark.slow
def test_total_mass_sampler_mean():
    samples = fb_sample(0.8, make_stream(4, 0), 20000)
    se = samples.std(ddof=1) / np.sqrt(samples.size)
    assert abs(samples.mean() - 1) < 4 * se


def test_union_bound():
    values = [e1_union_bound(1.0, 2.0, l, 6) for l in range(1, 6)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert e1_union_bound(1.0, 2.0, 3, 3) == pytest.approx(np.exp(-harmonic(8) / 4))
    with pytest.raises(InvalidArgumentError):
        e1_union_bound(1.0, 1.0, 2, 4)
