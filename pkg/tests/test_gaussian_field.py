import numpy as np
import pytest
from scipy import stats

from src.errors import InvalidArgumentError
from src.fields.gaussian_field import (BarrierSpec, GaussianDraw, barrier_indicator, barrier_mask,
                                       biased_trace_limit, covariance_sigma, gaussian_biased_probability,
                                       gaussian_field_from_draw, gaussian_field_values, gaussian_mass,
                                       gaussian_mass_values, gaussian_normalizer, sample_gaussian_draw,
                                       tilted_offsets)
from src.metrics.asymptotics import harmonic
from src.sampling.streams import make_stream


def test_covariance_at_zero_is_half_harmonic():
    assert covariance_sigma(10, 0.0) == pytest.approx(harmonic(10) / 2)
    np.testing.assert_allclose(covariance_sigma(3, [0.0, np.pi]), [harmonic(3) / 2, (-1 + 0.5 - 1 / 3) / 2])
    with pytest.raises(InvalidArgumentError):
        covariance_sigma(0, 0.0)


def test_draw_shapes_and_variance(stream):
    draw = sample_gaussian_draw(6, stream)
    assert isinstance(draw, GaussianDraw) and draw.z.shape == (6,)
    z = sample_gaussian_draw(4, stream, size=20000)
    assert z.shape == (20000, 4)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, abs=0.03)


def test_grid_values_match_pointwise(stream):
    draw = sample_gaussian_draw(8, stream)
    grid = gaussian_field_from_draw(draw, 64)
    assert grid.kind == "gaussian" and grid.m == 8
    np.testing.assert_allclose(draw.values_at(grid.angles), grid.values, atol=1e-12)


def test_scales_are_partial_sums(stream):
    draw = sample_gaussian_draw(8, stream)
    scales = draw.scales_at(0.7, [0, 1, 3])
    assert scales[3] == pytest.approx(float(draw.values_at(0.7)))
    assert scales[0] == pytest.approx(float(np.real(draw.z[0] * np.exp(-0.7j))))
    with pytest.raises(InvalidArgumentError):
        draw.scales_at(0.7, [4])


def test_normalizer_and_zero_beta_mass(stream):
    assert gaussian_normalizer(16, 0.0) == 1.0
    assert gaussian_mass(16, 0.0, 64, stream) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidArgumentError):
        gaussian_mass(16, 2.0, 64, stream)


def test_gaussian_mass_has_unit_mean():
    z = sample_gaussian_draw(16, make_stream(77, 0), size=4000)
    masses = gaussian_mass_values(z, 0.5, 64)
    se = masses.std(ddof=1) / np.sqrt(masses.size)
    assert abs(masses.mean() - 1) < 4 * se


def test_barrier_spec_validation():
    with pytest.raises(InvalidArgumentError):
        BarrierSpec(1.0, 3, 2)
    with pytest.raises(InvalidArgumentError):
        BarrierSpec(np.inf, 1, 2)
    spec = BarrierSpec(1.5, 1, 3, {2: -0.1})
    assert list(spec.scales) == [1, 2, 3]
    assert spec.in_standard_range
    assert not BarrierSpec(5.0, 1, 2).in_standard_range
    assert spec.threshold(2) == pytest.approx(1.5 * harmonic(4) / 2 - 0.1)
    assert spec.with_range(2, 4).offsets == {2: -0.1}


def test_barrier_indicator_and_mask():
    spec = BarrierSpec(1.0, 1, 2)
    assert barrier_indicator({1: 0.0, 2: 0.0}, spec)
    assert not barrier_indicator({1: 10.0, 2: 0.0}, spec)
    with pytest.raises(InvalidArgumentError):
        barrier_indicator({1: 0.0}, spec)
    mask = barrier_mask({1: np.array([0.0, 10.0]), 2: np.array([0.0, 0.0])}, spec)
    np.testing.assert_array_equal(mask, [True, False])


def test_tilted_offsets_at_coincident_points():
    beta, gamma = 0.7, 1.5
    offsets = tilted_offsets(beta, 0.0, 1, 3)
    spec = BarrierSpec(gamma, 1, 3, offsets)
    for k in range(1, 4):
        assert spec.threshold(k) == pytest.approx((gamma - 2 * beta) * covariance_sigma(2 ** k, 0.0))


def test_biased_probability_extremes(stream):
    p, se = gaussian_biased_probability(16, 1.0, 1.0, BarrierSpec(100.0, 1, 3), 500, stream)
    assert p == 1.0
    p, _ = gaussian_biased_probability(16, 1.0, 1.0, BarrierSpec(-100.0, 1, 3), 500, stream)
    assert p == 0.0
    with pytest.raises(InvalidArgumentError):
        gaussian_biased_probability(4, 1.0, 1.0, BarrierSpec(1.0, 1, 3), 10, stream)


@pytest.mark.slow
def test_biased_trace_limit_mean(stream):
    beta, theta, theta_prime = 1.0, 0.4, 2.0
    samples = biased_trace_limit(beta, theta, theta_prime, 3, stream, 20000)
    j = np.arange(1, 4)
    shift = -beta * (np.exp(1j * j * theta) + np.exp(1j * j * theta_prime)) / (2 * np.sqrt(j))
    np.testing.assert_allclose(samples.mean(axis=0), shift, atol=0.04)


def test_mass_law_is_rotation_invariant():
    m, beta, grid_size, alpha = 16, 1.0, 128, 0.3
    angles = 2 * np.pi * np.arange(grid_size) / grid_size
    weights = 1 + np.cos(angles)
    plain = gaussian_mass_values(sample_gaussian_draw(m, make_stream(41, 0), size=3000), beta, grid_size, weights)

    z = sample_gaussian_draw(m, make_stream(41, 1), size=3000)
    turned = z * np.exp(-1j * np.arange(1, m + 1) * alpha)
    np.testing.assert_allclose(gaussian_field_values(turned[:1], grid_size)[0],
                               GaussianDraw(m, z[0]).values_at(angles + alpha), atol=1e-10)
    rotated = gaussian_mass_values(turned, beta, grid_size, weights)
    assert stats.ks_2samp(plain, rotated).pvalue > 0.01
