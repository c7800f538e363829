"""
CUE chaos laboratory: characteristic polynomials of random unitary matrices,
their multiplicative chaos, and Toeplitz-determinant oracles
"""
__version__ = "1.0.0"
