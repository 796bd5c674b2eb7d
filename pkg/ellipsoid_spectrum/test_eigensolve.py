# coding: utf8
"""This module tests the eigenvalue kernels against scipy.linalg"""
import numpy as np
import pytest
import scipy.linalg
from pytest import approx

from ellipsoid_spectrum.eigensolve import (
    AsymmetricMatrixError,
    ConvergenceError,
    NotPositiveDefiniteError,
    SymTridiagonal,
    eig_dense_symmetric,
    eig_generalized,
    eig_tridiagonal,
    tridiagonal_eigenvector,
)


def random_tridiagonal(size, seed):
    rng = np.random.default_rng(seed)
    return SymTridiagonal(rng.normal(size=size), rng.normal(size=size - 1))


def random_symmetric(size, seed):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(size, size))
    return matrix + matrix.T


@pytest.mark.parametrize(("size", "seed"), [(1, 0), (2, 1), (7, 2), (50, 3), (200, 4)])
def test_tridiagonal_matches_scipy(size, seed):
    matrix = random_tridiagonal(size, seed)
    pairs = eig_tridiagonal(matrix)
    expected = scipy.linalg.eigh_tridiagonal(matrix.diag, matrix.offdiag, eigvals_only=True)
    assert pairs.values == approx(expected, abs=1e-11)
    residual = matrix.to_dense() @ pairs.vectors - pairs.vectors * pairs.values
    assert np.max(np.abs(residual)) < 1e-10
    assert pairs.vectors.T @ pairs.vectors == approx(np.eye(size), abs=1e-10)


def test_tridiagonal_values_only():
    matrix = random_tridiagonal(30, 5)
    pairs = eig_tridiagonal(matrix, compute_vectors=False)
    assert pairs.vectors is None
    assert pairs.residual_bound == approx(30 * 2.0 ** -52 * matrix.norm())
    assert pairs.values == approx(eig_tridiagonal(matrix).values, abs=1e-12)


def test_tridiagonal_with_zero_couplings():
    matrix = SymTridiagonal([3.0, 1.0, 2.0, 1.0], [0.0, 0.5, 0.0])
    values = eig_tridiagonal(matrix).values
    assert values == approx(np.sort([3.0, 1.0, 1.5 + np.sqrt(0.5), 1.5 - np.sqrt(0.5)]))


def test_eigenvector_sign_convention():
    vectors = eig_tridiagonal(random_tridiagonal(10, 6)).vectors
    for column in vectors.T:
        first = column[np.abs(column) > 1e-12 * np.max(np.abs(column))][0]
        assert first > 0


def test_inverse_iteration():
    matrix = random_tridiagonal(80, 7)
    pairs = eig_tridiagonal(matrix)
    for index in (0, 40, 79):
        vector = tridiagonal_eigenvector(matrix, pairs.values[index])
        assert np.abs(vector) == approx(np.abs(pairs.vectors[:, index]), abs=1e-8)


def test_invalid_tridiagonal():
    with pytest.raises(ValueError):
        SymTridiagonal([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        SymTridiagonal([1.0, np.nan], [1.0])


@pytest.mark.parametrize(("size", "seed"), [(1, 0), (3, 1), (12, 2), (30, 3)])
def test_dense_matches_scipy(size, seed):
    matrix = random_symmetric(size, seed)
    pairs = eig_dense_symmetric(matrix)
    assert pairs.values == approx(scipy.linalg.eigh(matrix, eigvals_only=True), abs=1e-10)
    assert pairs.residual_bound < 1e-10


def test_dense_rejects_asymmetric():
    with pytest.raises(AsymmetricMatrixError):
        eig_dense_symmetric(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_dense_reports_partial_values():
    with pytest.raises(ConvergenceError) as info:
        eig_dense_symmetric(random_symmetric(5, 8), max_sweeps=0)
    assert len(info.value.partial_values) == 5


class TestGeneralized:
    @classmethod
    def setup_class(cls):
        rng = np.random.default_rng(11)
        cls.stiffness = random_symmetric(15, 12)
        factor = rng.normal(size=(15, 15))
        cls.mass = factor @ factor.T + 15 * np.eye(15)
        cls.pairs = eig_generalized(cls.stiffness, cls.mass)

    def test_values(self):
        expected = scipy.linalg.eigh(self.stiffness, self.mass, eigvals_only=True)
        assert self.pairs.values == approx(expected, abs=1e-10)

    def test_mass_orthonormal(self):
        vectors = self.pairs.vectors
        assert vectors.T @ self.mass @ vectors == approx(np.eye(15), abs=1e-10)

    def test_residual(self):
        assert self.pairs.residual_bound < 1e-9

    def test_count(self):
        assert len(eig_generalized(self.stiffness, self.mass, count=4)) == 4

    def test_indefinite_mass(self):
        with pytest.raises(NotPositiveDefiniteError):
            eig_generalized(self.stiffness, np.diag([1.0] * 14 + [-1.0]))
