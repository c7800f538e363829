import numpy as np
import pytest

from src.errors import BranchCutError, InvalidArgumentError
from src.toeplitz.symbol import Singularity, Symbol, fisher_hartwig_symbol, real_laurent
from src.toeplitz.szego import factorization_residual, szego_function


def _circle_points(count=37, offset=0.1):
    return np.exp(1j * (offset + 2 * np.pi * np.arange(count) / count))


@pytest.mark.parametrize("name", ["pure_pair", "smooth_mixed", "single_root", "tilted_pair", "antipodal"])
def test_factorization_on_the_circle(corpus, name):
    residual = factorization_residual(corpus[name].symbol(), _circle_points())
    assert np.max(residual) < 1e-10


def test_value_at_origin():
    symbol = Symbol({0: 0.3, **real_laurent({1: 0.1})}, (Singularity(1.0, 0.5),))
    assert szego_function(symbol, 0.0) == pytest.approx(np.exp(0.3), rel=1e-12)


def test_smooth_symbol_uses_analytic_half():
    laurent = real_laurent({1: 0.2 - 0.1j, 2: 0.05})
    symbol = Symbol(laurent)
    z = np.array([0.0, 0.4 + 0.2j, -0.7j])
    expected = np.exp(laurent[1] * z + laurent[2] * z ** 2)
    np.testing.assert_allclose(szego_function(symbol, z, "in"), expected, rtol=1e-13)
    outer = np.array([2.0, -1.5j])
    expected_out = np.exp(-(laurent[-1] / outer + laurent[-2] / outer ** 2))
    np.testing.assert_allclose(szego_function(symbol, outer, "out"), expected_out, rtol=1e-13)


def test_side_and_domain_checks():
    symbol = fisher_hartwig_symbol(1.0, 0.5)
    with pytest.raises(InvalidArgumentError):
        szego_function(symbol, 0.2, "up")
    with pytest.raises(InvalidArgumentError):
        szego_function(symbol, 0.5, "out")
    with pytest.raises(InvalidArgumentError):
        szego_function(symbol, 2.0, "in")


def test_point_on_the_cut_is_rejected():
    symbol = fisher_hartwig_symbol(1.0, 0.5)
    angle = symbol.singularities[0].angle
    with pytest.raises(BranchCutError):
        szego_function(symbol, 2 * np.exp(1j * angle), "out")
    with pytest.raises(BranchCutError):
        szego_function(symbol, np.exp(1j * angle), "in")
