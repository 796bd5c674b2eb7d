# coding: utf8
"""This module contains the symmetric eigenvalue kernels shared by all solvers.

* eig_tridiagonal: implicit-shift QL on a symmetric tridiagonal matrix
* eig_dense_symmetric: cyclic Jacobi rotations on a dense symmetric matrix
* eig_generalized: A x = λ M x reduced through the Cholesky factor of M
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ellipsoid_spectrum.spectrum_logging import logger
from ellipsoid_spectrum.utils import fix_sign

MACHEP = 2.0 ** -52
MAX_QL_ITERATIONS = 30
MAX_JACOBI_SWEEPS = 50
JACOBI_TOLERANCE = 1e-13
SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class SymTridiagonal:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diag", np.asarray(self.diag, dtype=float))
        object.__setattr__(self, "offdiag", np.asarray(self.offdiag, dtype=float))
        if self.diag.ndim != 1 or self.diag.size < 1:
            raise ValueError("A tridiagonal matrix needs at least one diagonal entry")
        if self.offdiag.shape != (self.diag.size - 1,):
            raise ValueError(
                f"Off-diagonal length {self.offdiag.size} does not match size {self.diag.size}"
            )
        if not (np.all(np.isfinite(self.diag)) and np.all(np.isfinite(self.offdiag))):
            raise ValueError("Tridiagonal entries must be finite")

    @property
    def size(self) -> int:
        return self.diag.size

    def norm(self) -> float:
        """Maximum absolute row sum"""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(np.max(rows))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, vectors: np.ndarray) -> np.ndarray:
        result = self.diag.reshape((-1,) + (1,) * (vectors.ndim - 1)) * vectors
        off = self.offdiag.reshape((-1,) + (1,) * (vectors.ndim - 1))
        result[:-1] += off * vectors[1:]
        result[1:] += off * vectors[:-1]
        return result


@dataclass(eq=False)
class EigenPairs:
    """Ascending eigenvalues with their eigenvectors stored as columns"""

    values: np.ndarray
    vectors: Optional[np.ndarray]
    residual_bound: float

    def __len__(self):
        return self.values.size


def _finalize(values: Sequence[float], vectors: Optional[np.ndarray]):
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    values = values[order]
    if vectors is None:
        return values, None
    vectors = vectors[:, order]
    for column in range(vectors.shape[1]):
        vectors[:, column] = fix_sign(vectors[:, column])
    return values, vectors


def eig_tridiagonal(matrix: SymTridiagonal, compute_vectors: bool = True) -> EigenPairs:
    """All eigenpairs of a symmetric tridiagonal matrix by the implicit QL method"""
    n = matrix.size
    d = [float(value) for value in matrix.diag]
    e = [float(value) for value in matrix.offdiag] + [0.0]
    # row i of z holds the i-th column of the accumulated rotations
    z = np.eye(n) if compute_vectors else None

    for index in range(n):
        iterations = 0
        while True:
            m = index
            while m < n - 1:
                if abs(e[m]) <= MACHEP * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == index:
                break
            if iterations == MAX_QL_ITERATIONS:
                raise ConvergenceError(
                    f"QL did not converge for eigenvalue {index} of {n}",
                    partial_values=sorted(d[:index]),
                )
            iterations += 1

            g = (d[index + 1] - d[index]) / (2.0 * e[index])
            r = math.hypot(g, 1.0)
            g = d[m] - d[index] + e[index] / (g + math.copysign(r, g))
            s, c, p = 1.0, 1.0, 0.0
            underflow = False
            for i in range(m - 1, index - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    row_i = z[i].copy()
                    z[i] = c * row_i - s * z[i + 1]
                    z[i + 1] = s * row_i + c * z[i + 1]
            if underflow:
                continue
            d[index] -= p
            e[index] = g
            e[m] = 0.0

    values, vectors = _finalize(d, None if z is None else z.T.copy())
    if vectors is None:
        residual = n * MACHEP * matrix.norm()
    else:
        residual = float(
            np.max(np.linalg.norm(matrix.matvec(vectors) - vectors * values, axis=0))
        )
    return EigenPairs(values, vectors, residual)


def tridiagonal_eigenvector(matrix: SymTridiagonal, value: float) -> np.ndarray:
    """Unit eigenvector for a known eigenvalue by inverse iteration"""
    n = matrix.size
    banded = np.zeros((3, n))
    banded[0, 1:] = matrix.offdiag
    banded[2, :-1] = matrix.offdiag
    vector = np.linspace(1.0, 2.0, n)
    vector /= np.linalg.norm(vector)
    shift = 1e-12 * max(1.0, abs(value))
    for attempt in range(4):
        banded[1] = matrix.diag - (value + shift)
        try:
            for _ in range(3):
                vector = scipy.linalg.solve_banded((1, 1), banded, vector)
                if not np.all(np.isfinite(vector)):
                    raise np.linalg.LinAlgError("non finite inverse iterate")
                vector /= np.linalg.norm(vector)
            return fix_sign(vector)
        except (np.linalg.LinAlgError, ValueError, FloatingPointError):
            logger.warning(
                f"Inverse iteration singular at λ={value}, retry {attempt + 1} with larger shift"
            )
            shift *= 1e3
            vector = np.linspace(1.0, 2.0, n) / math.sqrt(n)
    raise ConvergenceError(f"Inverse iteration failed for λ={value}")


def _check_symmetric(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise AsymmetricMatrixError(f"Expected a square matrix, got shape {matrix.shape}")
    scale = np.max(np.abs(matrix)) if matrix.size else 0.0
    if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOLERANCE * max(scale, 1e-300):
        raise AsymmetricMatrixError("Matrix is not symmetric within 1e-12 relative")
    return 0.5 * (matrix + matrix.T)


def _off_diagonal_norm(matrix: np.ndarray) -> float:
    return math.sqrt(2.0 * float(np.sum(np.triu(matrix, 1) ** 2)))


def eig_dense_symmetric(matrix: np.ndarray, max_sweeps: int = MAX_JACOBI_SWEEPS) -> EigenPairs:
    """Full eigen-decomposition of a dense symmetric matrix by cyclic Jacobi sweeps"""
    a = _check_symmetric(matrix)
    n = a.shape[0]
    original = a.copy()
    v = np.eye(n)
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return EigenPairs(np.zeros(n), v, 0.0)

    sweep = 0
    while _off_diagonal_norm(a) > JACOBI_TOLERANCE * norm:
        if sweep == max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps",
                partial_values=sorted(np.diag(a)),
            )
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                a[:, p] = c * col_p - s * a[:, q]
                a[:, q] = s * col_p + c * a[:, q]
                row_p = a[p, :].copy()
                a[p, :] = c * row_p - s * a[q, :]
                a[q, :] = s * row_p + c * a[q, :]
                a[p, q] = a[q, p] = 0.0
                vec_p = v[:, p].copy()
                v[:, p] = c * vec_p - s * v[:, q]
                v[:, q] = s * vec_p + c * v[:, q]
    if sweep > 20:
        logger.warning(f"Jacobi needed {sweep} sweeps for a {n}x{n} matrix")

    values, vectors = _finalize(np.diag(a), v)
    residual = float(np.max(np.linalg.norm(original @ vectors - vectors * values, axis=0)))
    return EigenPairs(values, vectors, residual)


def eig_generalized(
    stiffness: np.ndarray, mass: np.ndarray, count: Optional[int] = None, which: str = "SMALLEST"
) -> EigenPairs:
    """Smallest eigenpairs of A x = λ M x with M-orthonormal eigenvectors"""
    if which != "SMALLEST":
        raise ValueError(f"Only the smallest eigenvalues are supported, got {which}")
    stiffness = _check_symmetric(stiffness)
    mass = _check_symmetric(mass)
    try:
        lower = scipy.linalg.cholesky(mass, lower=True)
    except np.linalg.LinAlgError as err:
        raise NotPositiveDefiniteError(
            "Mass matrix is not positive definite, quadrature is probably under-resolved"
        ) from err
    half = scipy.linalg.solve_triangular(lower, stiffness, lower=True)
    reduced = scipy.linalg.solve_triangular(lower, half.T, lower=True)
    pairs = eig_dense_symmetric(0.5 * (reduced + reduced.T))
    count = pairs.values.size if count is None else min(count, pairs.values.size)
    values = pairs.values[:count]
    vectors = scipy.linalg.solve_triangular(
        lower, pairs.vectors[:, :count], lower=True, trans="T"
    )
    for column in range(count):
        vectors[:, column] = fix_sign(vectors[:, column])
    residual = float(
        np.max(
            np.linalg.norm(stiffness @ vectors - (mass @ vectors) * values, axis=0),
            initial=0.0,
        )
    )
    return EigenPairs(values, vectors, residual)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, partial_values=None):
        super().__init__(message)
        self.partial_values = list(partial_values or [])


class AsymmetricMatrixError(ValueError):
    pass


class NotPositiveDefiniteError(RuntimeError):
    pass
