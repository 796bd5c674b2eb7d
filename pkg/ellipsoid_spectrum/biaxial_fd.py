# coding: utf8
"""This module solves the reduced eigenvalue problem of a spheroid by finite differences.

On the spheroid (a sinφ cosθ, a sinφ sinθ, b cosφ) an eigenfunction v(φ)e^{imθ}
satisfies the Sturm–Liouville problem

    -(q v')' + m² r v = Λ w v,   q = a sinφ/√g₁₁, r = √g₁₁/(a sinφ), w = a sinφ √g₁₁

with g₁₁ = a²cos²φ + b²sin²φ. It is discretized on φ_j = jπ/N with half-node
fluxes, then symmetrized by the diagonal weights into a tridiagonal matrix.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Hashable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ellipsoid_spectrum import special_fn
from ellipsoid_spectrum.eigensolve import SymTridiagonal, eig_tridiagonal, tridiagonal_eigenvector
from ellipsoid_spectrum.geometry import EllipsoidSpec, metric_biaxial
from ellipsoid_spectrum.spectrum_logging import logger
from ellipsoid_spectrum.utils import pairwise

DEFAULT_GRID = 400
DEFAULT_COUNT = 10
MIN_GRID = 16
NEGATIVE_TOLERANCE = 1e-8


class PoleBC(str, enum.Enum):
    AUTO = "auto"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class FdGrid:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_GRID:
            raise GridError(f"Grid needs N >= {MIN_GRID} intervals, got {self.n}")

    @property
    def h(self) -> float:
        return math.pi / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) * self.h

    def refined(self, factor: int = 2) -> "FdGrid":
        return FdGrid(self.n * factor)


@dataclass(frozen=True, eq=False)
class FdSystem:
    """K v = Λ W v on the unknowns first..last, and its symmetrized form"""

    stiffness: SymTridiagonal
    weights: np.ndarray
    first: int
    last: int
    pole_rows: str

    @property
    def symmetric(self) -> SymTridiagonal:
        scale = 1.0 / np.sqrt(self.weights)
        return SymTridiagonal(
            self.stiffness.diag * scale * scale,
            self.stiffness.offdiag * scale[:-1] * scale[1:],
        )


@dataclass(eq=False)
class BiaxialEigenResult:
    m: int
    values: np.ndarray
    grid: FdGrid
    spec: EllipsoidSpec
    pole_bc: PoleBC
    vectors: Optional[np.ndarray] = None
    residual_bound: float = 0.0

    def __len__(self):
        return self.values.size


class ConvergenceRow(NamedTuple):
    n: int
    values: np.ndarray
    changes: Optional[np.ndarray]
    orders: Optional[np.ndarray]


@dataclass(eq=False)
class ConvergenceTable:
    m: int
    rows: List[ConvergenceRow]

    def stable_digits(self) -> np.ndarray:
        """Significant digits unchanged by the last refinement, per eigenvalue"""
        changes = self.rows[-1].changes
        with np.errstate(divide="ignore"):
            digits = np.floor(-np.log10(np.maximum(changes, 1e-17)))
        return digits.astype(int)


@dataclass(eq=False)
class LimitCheck:
    b: float
    m: int
    regime: str
    values: np.ndarray
    references: np.ndarray
    distances: np.ndarray = field(default_factory=lambda: np.zeros(0))


class Crossing(NamedTuple):
    first: Hashable
    second: Hashable
    b_low: float
    b_high: float
    b_estimate: float


def _to_spheroid(spec: EllipsoidSpec) -> EllipsoidSpec:
    if spec.is_biaxial:
        return spec
    relabeled = spec.as_spheroid()
    logger.info(f"Axes {spec.axes} relabeled to spheroid {relabeled.axes}")
    return relabeled


def _coefficients(spec: EllipsoidSpec, phi: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    metric = metric_biaxial(spec, phi)
    root = np.sqrt(metric.g11)
    sin_part = spec.equatorial * np.sin(phi)
    with np.errstate(divide="ignore"):
        return sin_part / root, root / sin_part, sin_part * root


def assemble_fd(
    spec: EllipsoidSpec, m: int, grid: FdGrid, pole_bc: PoleBC = PoleBC.AUTO
) -> FdSystem:
    if m < 0:
        raise ValueError(f"Azimuthal mode must be non negative, got {m}")
    spec = _to_spheroid(spec)
    pole_bc = PoleBC(pole_bc)
    n, h = grid.n, grid.h
    nodes = grid.nodes
    q_half, _, _ = _coefficients(spec, (np.arange(n) + 0.5) * h)
    q_nodes, r_nodes, w_nodes = _coefficients(spec, nodes[1:-1])

    # interior rows j = 1..N-1
    diag = (q_half[1:] + q_half[:-1]) / h ** 2 + m * m * r_nodes
    offdiag = -q_half[1:-1] / h ** 2
    weights = w_nodes.copy()

    if m == 0 or pole_bc == PoleBC.NEUMANN:
        # v_0 = v_1 and v_N = v_{N-1} cancel the outer flux; the pole nodes carry no weight
        diag[0] -= q_half[0] / h ** 2
        diag[-1] -= q_half[-1] / h ** 2
        return FdSystem(SymTridiagonal(diag, offdiag), weights, 1, n - 1, "neumann")
    return FdSystem(SymTridiagonal(diag, offdiag), weights, 1, n - 1, "dirichlet")


def _samples(system: FdSystem, vector: np.ndarray, n: int) -> np.ndarray:
    samples = np.zeros(n + 1)
    samples[system.first : system.last + 1] = vector / np.sqrt(system.weights)
    if system.pole_rows == "neumann":
        samples[0], samples[n] = samples[1], samples[n - 1]
    peak = np.max(np.abs(samples))
    return samples / peak if peak > 0 else samples


def solve_biaxial_fd(
    spec: EllipsoidSpec,
    m: int,
    n: int = DEFAULT_GRID,
    count: int = DEFAULT_COUNT,
    pole_bc: PoleBC = PoleBC.AUTO,
    vectors: bool = False,
) -> BiaxialEigenResult:
    """The count smallest physical eigenvalues Λ of azimuthal mode m"""
    grid = FdGrid(n)
    system = assemble_fd(spec, m, grid, pole_bc)
    matrix = system.symmetric
    logger.info(f"FD solve m={m}, N={n}, {matrix.size} unknowns, pole rows {system.pole_rows}")
    pairs = eig_tridiagonal(matrix, compute_vectors=False)
    values = pairs.values[:count]
    if values.size and values[0] < -NEGATIVE_TOLERANCE * max(1.0, abs(values[-1])):
        logger.warning(f"Negative eigenvalue {values[0]} for m={m}, N={n}")
    samples = None
    if vectors:
        samples = np.column_stack(
            [_samples(system, tridiagonal_eigenvector(matrix, value), n) for value in values]
        )
    return BiaxialEigenResult(
        m, values, grid, _to_spheroid(spec), PoleBC(pole_bc), samples, pairs.residual_bound
    )


def convergence_study(
    spec: EllipsoidSpec,
    m: int,
    n_list: Sequence[int],
    count: int = 6,
    pole_bc: PoleBC = PoleBC.AUTO,
) -> ConvergenceTable:
    """Eigenvalues over refined grids with relative changes and Richardson orders"""
    n_list = list(n_list)
    if len(n_list) < 2 or any(low >= high for low, high in pairwise(n_list)):
        raise GridError(f"Need at least two ascending grid sizes, got {n_list}")
    rows: List[ConvergenceRow] = []
    for index, n in enumerate(n_list):
        values = solve_biaxial_fd(spec, m, n, count, pole_bc).values
        changes, orders = None, None
        if index >= 1:
            previous = rows[-1].values
            changes = np.abs(values - previous) / np.maximum(np.abs(values), 1.0)
        if index >= 2:
            coarse = rows[-1].values - rows[-2].values
            fine = values - rows[-1].values
            ratio = n / n_list[index - 1]
            with np.errstate(divide="ignore", invalid="ignore"):
                orders = np.log(np.abs(coarse) / np.abs(fine)) / math.log(ratio)
        rows.append(ConvergenceRow(n, values, changes, orders))
    return ConvergenceTable(m, rows)


def limit_check(
    b: float,
    m: int,
    count: int,
    n: int = DEFAULT_GRID,
    pole_bc: PoleBC = PoleBC.AUTO,
) -> LimitCheck:
    """Distance of the spheroid (1, 1, b) spectrum to its degenerate limit.

    For b > 1 the lowest eigenvalue approaches m² (long thin spheroid), for b < 1
    the spectrum approaches the union of Dirichlet and Neumann disk spectra."""
    spec = EllipsoidSpec.spheroid(1.0, b)
    if spec.is_sphere:
        raise ValueError("The sphere b = 1 has no degenerate limit")
    if b > 1.0:
        values = solve_biaxial_fd(spec, m, n, 1, pole_bc).values
        references = np.array([float(m * m)])
        distances = np.abs(values - references) / max(m * m, 1)
        return LimitCheck(b, m, "elongated", values, references, distances)

    values = solve_biaxial_fd(spec, m, n, count, pole_bc).values
    references = special_fn.disk_eigenvalues(m, count + 2)
    nearest = references[np.argmin(np.abs(values[:, None] - references[None, :]), axis=1)]
    distances = np.abs(values - nearest) / np.maximum(nearest, 1.0)
    return LimitCheck(b, m, "flattened", values, references, distances)


def crossings(b_values: Sequence[float], curves: Dict[Hashable, Sequence[float]]) -> List[Crossing]:
    """Order swaps between eigenvalue curves sampled on the same b values"""
    b_values = np.asarray(b_values, dtype=float)
    labels = list(curves)
    found = []
    for i, first in enumerate(labels):
        for second in labels[i + 1 :]:
            diff = np.asarray(curves[first], dtype=float) - np.asarray(curves[second], dtype=float)
            for j in range(diff.size - 1):
                if diff[j] == 0.0 or diff[j] * diff[j + 1] >= 0.0:
                    continue
                low, high = b_values[j], b_values[j + 1]
                estimate = low + (high - low) * diff[j] / (diff[j] - diff[j + 1])
                found.append(Crossing(first, second, low, high, estimate))
    found.sort(key=lambda crossing: crossing.b_estimate)
    return found


class GridError(ValueError):
    pass
