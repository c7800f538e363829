import numpy as np
import pytest

from src.errors import InvalidArgumentError, PrecisionFailureError
from src.toeplitz.determinants import (checked_determinant, differential_identity_check, opuc_chi,
                                       toeplitz_det, y_first_column)
from src.toeplitz.symbol import FourierCoefficients, Symbol, fisher_hartwig_symbol, fourier_coefficients


@pytest.mark.parametrize("n", [1, 2, 5, 16, 64])
def test_root_squared_determinant(n):
    fhat = fourier_coefficients(fisher_hartwig_symbol(2.0), n - 1)
    result = toeplitz_det(fhat, n)
    assert result.value == pytest.approx(n + 1, rel=1e-10)
    assert result.sign == 1.0 and not result.degenerate
    assert opuc_chi(fhat, n).determinant == pytest.approx(n + 1, rel=1e-10)


def test_chi_product_matches_lu_for_corpus(corpus):
    for record in corpus.values():
        fhat = fourier_coefficients(record.symbol(), 11)
        for n in (1, 4, 12):
            chain = opuc_chi(fhat, n)
            direct = toeplitz_det(fhat, n)
            assert np.prod(chain.chis ** -2.0) == pytest.approx(direct.value, rel=1e-9)
            assert chain.log_dets[-1] == pytest.approx(direct.log_abs, abs=1e-9)


def test_checked_determinant_returns_lu_value(corpus):
    fhat = fourier_coefficients(corpus["smooth_mixed"].symbol(), 7)
    assert checked_determinant(fhat, 8).value == pytest.approx(toeplitz_det(fhat, 8).value)


def test_singular_matrix_is_degenerate():
    result = toeplitz_det(FourierCoefficients(np.zeros(5, dtype=complex)), 3)
    assert result.degenerate and result.value == 0.0


def test_indefinite_moments_fail_recursion():
    with pytest.raises(PrecisionFailureError):
        opuc_chi(FourierCoefficients(np.array([0.0, -1.0, 0.0], dtype=complex)), 1)


def test_orders_are_validated():
    fhat = fourier_coefficients(fisher_hartwig_symbol(1.0), 2)
    with pytest.raises(InvalidArgumentError):
        toeplitz_det(fhat, 0)
    with pytest.raises(InvalidArgumentError):
        opuc_chi(fhat, 5)


def test_first_column_for_constant_symbol():
    fhat = fourier_coefficients(Symbol(), 3)
    z = np.array([0.3 + 0.1j, -0.5j, 1.0])
    y = y_first_column(fhat, 3, z)
    np.testing.assert_allclose(y.y11, z ** 3, atol=1e-14)
    np.testing.assert_allclose(y.y21, -1.0, atol=1e-14)
    np.testing.assert_allclose(y.dy11, 3 * z ** 2, atol=1e-14)
    np.testing.assert_allclose(y.dy21, 0.0, atol=1e-14)


def test_first_column_is_orthogonal(corpus):
    n = 4
    fhat = fourier_coefficients(corpus["one_cosine"].symbol(), n)
    theta = 2 * np.pi * np.arange(4096) / 4096
    z = np.exp(1j * theta)
    weight = corpus["one_cosine"].symbol()(z)
    y11 = y_first_column(fhat, n, z).y11
    for k in range(n):
        assert abs(np.mean(y11 * z ** (-k) * weight)) < 1e-8


@pytest.mark.parametrize("name", ["one_cosine", "smooth_mixed"])
def test_differential_identity(corpus, name):
    lhs, rhs, gap = differential_identity_check(corpus[name].symbol(), 4, 0.5)
    assert gap < 1e-4
    assert lhs == pytest.approx(rhs, abs=1e-4)


def test_differential_identity_trivial_and_limits(corpus):
    assert differential_identity_check(fisher_hartwig_symbol(1.0), 3, 0.5) == (0.0, 0.0, 0.0)
    with pytest.raises(InvalidArgumentError):
        differential_identity_check(corpus["one_cosine"].symbol(), 33, 0.5)
    with pytest.raises(InvalidArgumentError):
        differential_identity_check(corpus["one_cosine"].symbol(), 4, 1.5)


@pytest.mark.parametrize("name", ["tilted_pair", "antipodal", "single_root"])
@pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 1.0])
def test_differential_identity_with_singularities(corpus, name, t):
    lhs, rhs, gap = differential_identity_check(corpus[name].symbol(), 8, t)
    assert gap < 1e-4
    assert lhs == pytest.approx(rhs, abs=1e-4)
