import numpy as np
import pytest
from scipy import stats
from scipy.special import gamma

from src.chaos.measure import (BiasedDraws, biased_probability_mc, collect_biased_draws, decompose_mass,
                               dyadic_top, full_normalizer, gauss_normalizer, mass_batch, mass_from_field,
                               normalizer_exact, normalizer_product_formula, tilted_trace_mean,
                               trunc_normalizer, truncated_normalizer, weight_grid)
from src.errors import InvalidArgumentError
from src.fields.gaussian_field import BarrierSpec, biased_trace_limit, sample_gaussian_field
from src.sampling.cue_sampler import CueBatch, FieldGrid, field_on_grid, sample_verblunsky
from src.sampling.streams import make_stream


def test_small_normalizers():
    assert normalizer_exact(5, 0.0) == 1.0
    assert normalizer_exact(1, 2.0) == pytest.approx(2.0)
    assert normalizer_exact(2, 2.0) == pytest.approx(3.0)
    assert normalizer_exact(1, 1.0) == pytest.approx(1 / gamma(1.5) ** 2)


@pytest.mark.parametrize("n, beta", [(4, 0.5), (16, 1.0), (64, 1.5)])
def test_normalizer_matches_product_formula(n, beta):
    assert normalizer_exact(n, beta) == pytest.approx(normalizer_product_formula(n, beta), rel=1e-9)


def test_normalizer_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        normalizer_exact(0, 1.0)
    with pytest.raises(InvalidArgumentError):
        truncated_normalizer(4, 0, 1.0)


def test_truncated_normalizer_for_one_eigenvalue():
    theta = 2 * np.pi * np.arange(4096) / 4096
    k = np.arange(1, 5)
    field = -np.cos(np.outer(theta, k)) @ (1 / k)
    expected = np.mean(np.exp(0.8 * field))
    assert truncated_normalizer(1, 4, 0.8) == pytest.approx(expected, rel=1e-8)
    assert truncated_normalizer(3, 4, 0.0) == 1.0


def test_weight_grid():
    assert np.all(weight_grid(None, 8) == 1)
    np.testing.assert_allclose(weight_grid("one_plus_cos", 4), [2, 1, 0, 1], atol=1e-15)
    with pytest.raises(InvalidArgumentError):
        weight_grid("two", 8)
    with pytest.raises(InvalidArgumentError):
        weight_grid(-np.ones(8), 8)
    with pytest.raises(InvalidArgumentError):
        weight_grid(np.ones(4), 8)


def test_zero_beta_mass_is_one(stream):
    field = field_on_grid(sample_verblunsky(8, stream), 64)
    assert mass_from_field(field, 0.0, full_normalizer(8, 0.0)).mass == 1.0


def test_single_eigenvalue_mass(stream):
    sample = sample_verblunsky(1, stream)
    field = field_on_grid(sample, 256)
    eigenvalue = -sample.secular[0]
    angles = 2 * np.pi * np.arange(256) / 256
    expected = np.mean(np.abs(np.exp(1j * angles) - eigenvalue)) / normalizer_exact(1, 1.0)
    result = mass_from_field(field, 1.0, full_normalizer(1, 1.0))
    assert result.mass == pytest.approx(expected, rel=1e-10)
    assert result.n == 1 and result.grid_size == 256


def test_normalizer_must_match_field(stream):
    sample = sample_verblunsky(8, stream)
    full = field_on_grid(sample, 64)
    with pytest.raises(InvalidArgumentError):
        mass_from_field(full, 1.0, trunc_normalizer(8, 4, 1.0))
    with pytest.raises(InvalidArgumentError):
        mass_from_field(full, 1.0, full_normalizer(16, 1.0))
    with pytest.raises(InvalidArgumentError):
        mass_from_field(full, 0.5, full_normalizer(8, 1.0))
    gaussian = sample_gaussian_field(8, 64, stream)
    assert mass_from_field(gaussian, 1.0, gauss_normalizer(8, 1.0)).mass > 0


@pytest.mark.slow
def test_mass_has_unit_mean():
    batch = CueBatch.draw(8, 4000, make_stream(31, 0))
    masses = mass_batch(batch, 0.5, 256)
    se = masses.std(ddof=1) / np.sqrt(masses.size)
    assert abs(masses.mean() - 1) < 4 * se


@pytest.mark.slow
def test_truncated_mass_with_cosine_weight_has_unit_mean():
    batch = CueBatch.draw(8, 4000, make_stream(32, 0))
    masses = mass_batch(batch, 0.5, 256, "truncated", 4, "one_plus_cos")
    se = masses.std(ddof=1) / np.sqrt(masses.size)
    assert abs(masses.mean() - 1) < 4 * se


def test_dyadic_top():
    assert dyadic_top(16, 0.2) == 3
    assert dyadic_top(64, 0.0) == 6
    assert dyadic_top(256, 0.25) == 6


def _decompose(stream, gamma_value, **kwargs):
    sample = sample_verblunsky(16, stream)
    return decompose_mass(sample, 1.0, BarrierSpec(gamma_value, 2, 3), 0.2, 8, grid_size=256, **kwargs)


def test_decomposition_reconstructs_mass(stream):
    result = _decompose(stream, 1.2)
    g, e1, e2 = result.decomposition
    assert g + e1 + e2 == pytest.approx(result.mass, rel=1e-12, abs=1e-14)
    assert g >= 0 and e1 >= 0


def test_decomposition_extremes(stream):
    loose = _decompose(stream, 100.0)
    assert loose.e1 == 0.0
    assert loose.e2 == pytest.approx(loose.mass - loose.g)
    strict = _decompose(make_stream(12345, 0), -50.0)
    assert strict.g == 0.0 and strict.e2 == 0.0
    assert strict.e1 == pytest.approx(strict.mass)


def test_decomposition_with_weight(stream):
    result = _decompose(stream, 1.2, phi="one_plus_cos")
    assert sum(result.decomposition) == pytest.approx(result.mass, rel=1e-12, abs=1e-14)


def test_decomposition_rejects_bad_scales(stream):
    sample = sample_verblunsky(16, stream)
    with pytest.raises(InvalidArgumentError):
        decompose_mass(sample, 1.0, BarrierSpec(1.0, 4, 4), 0.2, 8, grid_size=256)
    with pytest.raises(InvalidArgumentError):
        decompose_mass(sample, 1.0, BarrierSpec(1.0, 2, 3), 0.2, 32, grid_size=256)
    with pytest.raises(InvalidArgumentError):
        decompose_mass(sample, 1.0, BarrierSpec(1.0, 3, 3), 0.5, 8, grid_size=256)


def test_undecomposed_sample_has_no_parts(stream):
    field = field_on_grid(sample_verblunsky(4, stream), 64)
    with pytest.raises(InvalidArgumentError):
        mass_from_field(field, 1.0, full_normalizer(4, 1.0)).decomposition


def _draws(x_theta, scales_theta):
    size = len(x_theta)
    zeros = np.zeros(size)
    return BiasedDraws(np.asarray(x_theta, dtype=float), zeros, {1: np.asarray(scales_theta)}, {1: zeros})


def test_biased_estimate_of_sure_event(rng):
    draws = _draws(rng.standard_normal(2000), np.zeros(2000))
    spec = BarrierSpec(100.0, 1, 1)
    result = biased_probability_mc(draws, 1.0, (spec, spec))
    assert result.estimate == pytest.approx(1.0)
    assert result.stderr == pytest.approx(0.0, abs=1e-12)
    assert result.draws == 2000 and not result.unreliable


def test_zero_tilt_gives_plain_frequency(rng):
    values = rng.standard_normal(3000)
    draws = _draws(rng.standard_normal(3000), values)
    spec = BarrierSpec(1.0, 1, 1)
    result = biased_probability_mc(draws, 0.0, (spec, spec))
    assert result.estimate == pytest.approx(np.mean(values <= 0.75))
    assert result.ess == pytest.approx(3000)
    assert result.stderr == pytest.approx(np.sqrt(result.estimate * (1 - result.estimate) / 2999), rel=1e-6)


def test_biased_estimator_needs_draws(rng):
    draws = _draws(rng.standard_normal(10), np.zeros(10))
    spec = BarrierSpec(1.0, 1, 1)
    with pytest.raises(InvalidArgumentError):
        biased_probability_mc(draws, 1.0, (spec, spec))


def test_dominated_weights_are_unreliable():
    x = np.zeros(1500)
    x[0] = 1000.0
    draws = _draws(x, np.zeros(1500))
    spec = BarrierSpec(1.0, 1, 1)
    with np.errstate(divide="raise", invalid="raise"):
        result = biased_probability_mc(draws, 1.0, (spec, spec))
    assert result.estimate == pytest.approx(1.0)
    assert np.isnan(result.stderr)
    assert result.ess == pytest.approx(1.0)
    assert result.unreliable


def test_collect_biased_draws(stream):
    draws = collect_biased_draws(8, 0.0, np.pi, [1, 2], 5, stream)
    assert len(draws) == 5
    assert sorted(draws.scales_theta) == [1, 2]
    assert draws.scales_theta_prime[2].shape == (5,)


def test_grid_rotation_keeps_mass(stream):
    field = field_on_grid(sample_verblunsky(8, stream), 256)
    normalizer = full_normalizer(8, 1.0)
    assert mass_from_field(field.rotated(37), 1.0, normalizer).mass == pytest.approx(
        mass_from_field(field, 1.0, normalizer).mass, rel=1e-12)


def test_mass_law_is_rotation_invariant():
    n, beta, grid_size, alpha = 8, 1.0, 256, 0.3
    angles = 2 * np.pi * np.arange(grid_size) / grid_size
    plain = mass_batch(CueBatch.draw(n, 3000, make_stream(51, 0)), beta, grid_size, phi="one_plus_cos")

    values = CueBatch.draw(n, 3000, make_stream(51, 1)).field_at(angles + alpha)
    first = mass_from_field(FieldGrid(grid_size, values[0], "full", n), beta, full_normalizer(n, beta),
                            "one_plus_cos")
    rotated = np.mean(weight_grid("one_plus_cos", grid_size) * np.exp(beta * values), axis=1)
    rotated /= normalizer_exact(n, beta)
    assert first.mass == pytest.approx(rotated[0], rel=1e-12)
    assert stats.ks_2samp(plain, rotated).pvalue > 0.01


def test_untilted_trace_mean_is_plain_average(rng):
    traces = rng.standard_normal((500, 2)) + 1j * rng.standard_normal((500, 2))
    x = rng.standard_normal(500)
    result = tilted_trace_mean(x, x, traces, 0.0)
    expected = traces.mean(axis=0) / np.sqrt([1.0, 2.0])
    np.testing.assert_allclose(result.mean, expected, atol=1e-12)
    spread = np.sqrt(np.mean(np.abs(traces / np.sqrt([1.0, 2.0]) - expected) ** 2, axis=0) / 500)
    np.testing.assert_allclose(result.stderr, spread, rtol=1e-10)
    assert result.ess == pytest.approx(500)


def test_tilted_trace_mean_follows_the_weights():
    traces = np.array([[1.0], [3.0]], dtype=complex)
    x = np.log(np.array([1.0, 3.0]))
    result = tilted_trace_mean(x, np.zeros(2), traces, 1.0)
    assert result.mean[0] == pytest.approx(2.5)
    assert result.ess == pytest.approx(1.6)
    with pytest.raises(InvalidArgumentError):
        tilted_trace_mean(x, np.zeros(2), traces[:1], 1.0)


@pytest.mark.slow
def test_tilted_traces_approach_their_limit():
    beta, theta, l = 1.0, np.pi, 2
    batch = CueBatch.draw(32, 20000, make_stream(91, 0))
    x = batch.field_at([theta, 0.0])
    result = tilted_trace_mean(x[:, 0], x[:, 1], batch.ensure_traces(l), beta)
    limit = biased_trace_limit(beta, theta, 0.0, l, make_stream(91, 1), 20000).mean(axis=0)
    assert np.all(np.abs(result.mean - limit) < 4 * np.hypot(result.stderr, 1 / np.sqrt(20000)))
