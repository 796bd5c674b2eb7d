# coding: utf8
"""This module counts nodal domains of first-order eigenfunctions on the sphere.

Samples are taken at cell centres of a (φ, θ) grid with the two pole values
kept apart. Sign components come from scipy.ndimage.label, then the θ seam and
the pole caps are glued with a union-find over component labels.

A saddle whose value is below the sampling error decides whether two domains
touch on every grid alike. Critical points are therefore located by Newton's
method on the gradient, and the cells around each one take the sign of its
value before labelling.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from ellipsoid_spectrum import special_fn
from ellipsoid_spectrum.geometry import Family, FunctionJet, harmonic_grid, harmonic_jet
from ellipsoid_spectrum.perturbation import ModeIndex, PerturbedEigenvalue, perturbed_spectrum
from ellipsoid_spectrum.spectrum_logging import logger
from ellipsoid_spectrum.utils import are_close, cluster_sorted

# even n_phi keeps samples off the equator, n_theta % 4 == 0 keeps them off θ = ±π/2
DEFAULT_NODAL_GRID = (800, 1600)
TIE_FACTOR = 1e-13
POLE_ZERO_FACTOR = 1e-12
CROSSING_FACTOR = 1e-9
CRITICAL_ROWS_PER_LEVEL = 32
CRITICAL_GRADIENT_FACTOR = 1e-8
NEWTON_STEPS = 30
POLE_GUARD = 1e-3
OVERRIDE_RADIUS = 2


class NodalCase(str, enum.Enum):
    OBLATE = "OBLATE"
    PROLATE = "PROLATE"
    TRIAXIAL = "TRIAXIAL"


class ClassifiedCase(NamedTuple):
    case: NodalCase
    order: Tuple[int, int, int]


class CriticalPoint(NamedTuple):
    phi: float
    theta: float
    value: float
    saddle: bool


@dataclass(eq=False)
class SphereGrid:
    """Cell-centred samples values[i, k] at φ_i = (i+½)π/n_phi, θ_k = (k+½)2π/n_theta"""

    values: np.ndarray
    north: float
    south: float
    function: Optional["ModeFunction"] = None

    @property
    def n_phi(self) -> int:
        return self.values.shape[0]

    @property
    def n_theta(self) -> int:
        return self.values.shape[1]

    @property
    def phi(self) -> np.ndarray:
        return (np.arange(self.n_phi) + 0.5) * math.pi / self.n_phi

    @property
    def theta(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * 2.0 * math.pi / self.n_theta

    @property
    def critical_points(self) -> Tuple[CriticalPoint, ...]:
        return self.function.critical_points() if self.function is not None else ()

    def scale(self) -> float:
        return max(float(np.max(np.abs(self.values))), abs(self.north), abs(self.south))


@dataclass(eq=False)
class NodalRow:
    rank: int
    lambda1: float
    multiplicity: int
    count: int
    expected: int
    courant_bound: int
    cluster_passed: bool
    resolution_suspect: bool = False

    @property
    def cumulative_index(self) -> int:
        return self.courant_bound


@dataclass(eq=False)
class NodalReport:
    level: int
    perturbation: Tuple[float, float, float]
    case: NodalCase
    order: Tuple[int, int, int]
    grid: Tuple[int, int]
    rows: List[NodalRow] = field(default_factory=list)

    @property
    def counts(self) -> List[int]:
        return [row.count for row in self.rows]

    @property
    def expected(self) -> List[int]:
        return [row.expected for row in self.rows]

    @property
    def passed(self) -> bool:
        return all(row.cluster_passed for row in self.rows)

    @property
    def courant_ok(self) -> bool:
        return all(1 <= row.count <= row.courant_bound for row in self.rows)

    @property
    def resolution_suspect(self) -> bool:
        return any(row.resolution_suspect for row in self.rows)


class UnionFind:
    """Union-find with path compression over component labels"""

    def __init__(self, size: int):
        self.size = size
        self.parents = list(range(size))
        self.num_components = size

    def find_parent(self, elem: int) -> int:
        root = elem
        while root != self.parents[root]:
            root = self.parents[root]
        while elem != root:
            self.parents[elem], elem = root, self.parents[elem]
        return root

    def union(self, a: int, b: int) -> None:
        root_a, root_b = self.find_parent(a), self.find_parent(b)
        if root_a == root_b:
            return
        self.parents[root_b] = root_a
        self.num_components -= 1

    def retrieve_components(self) -> List[List[int]]:
        components = {}
        for elem in range(self.size):
            components.setdefault(self.find_parent(elem), []).append(elem)
        return list(components.values())


def _check_labels(l: int, eigvec: Sequence[float], mode_labels: Sequence[ModeIndex]):
    eigvec = np.asarray(eigvec, dtype=float)
    if eigvec.shape != (len(mode_labels),):
        raise ValueError(f"{eigvec.size} coefficients for {len(mode_labels)} modes")
    if any(mode.l != l for mode in mode_labels):
        raise ValueError(f"Mode labels {[str(mode) for mode in mode_labels]} are not all at level {l}")
    if not np.any(eigvec):
        raise ZeroFunctionError(f"Zero coefficient vector at level {l}")
    return eigvec


class ModeFunction:
    """Σ C_k Y_k over real spherical harmonics Y_k of one level"""

    def __init__(self, level: int, coefficients: Sequence[float], mode_labels: Sequence[ModeIndex]):
        self.coefficients = _check_labels(level, coefficients, mode_labels)
        self.level = level
        self.mode_labels = tuple(mode_labels)
        self._critical_points: Optional[Tuple[CriticalPoint, ...]] = None

    @classmethod
    def from_record(cls, record: PerturbedEigenvalue) -> "ModeFunction":
        return cls(record.level, record.eigvec, record.mode_labels)

    def combined(self, weight: float, other: "ModeFunction", other_weight: float) -> "ModeFunction":
        return ModeFunction(
            self.level,
            np.concatenate([weight * self.coefficients, other_weight * other.coefficients]),
            self.mode_labels + other.mode_labels,
        )

    def _terms(self):
        return [(coef, mode) for coef, mode in zip(self.coefficients, self.mode_labels) if coef != 0.0]

    def sample(self, n_phi: int, n_theta: int) -> SphereGrid:
        l = self.level
        phi = (np.arange(n_phi) + 0.5) * math.pi / n_phi
        theta = (np.arange(n_theta) + 0.5) * 2.0 * math.pi / n_theta
        table = special_fn.legendre_table(l, np.cos(phi))
        poles = special_fn.legendre_table(l, np.array([1.0, -1.0]))
        values = np.zeros((n_phi, n_theta))
        north = south = 0.0
        for coef, mode in self._terms():
            trig = np.cos(mode.m * theta) if mode.family == Family.COS else np.sin(mode.m * theta)
            values += coef * np.outer(table[l, mode.m], trig)
            if mode.m == 0:
                north += coef * poles[l, 0, 0]
                south += coef * poles[l, 0, 1]
        return SphereGrid(values, float(north), float(south), self)

    def gradient_grid(self, phi: np.ndarray, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Values, ∂φ and ∂θ on the tensor grid phi by theta"""
        terms = self._terms()
        labels = [(mode.l, mode.m, mode.family) for _, mode in terms]
        weights = np.array([coef for coef, _ in terms])
        values, d_phi, d_theta = harmonic_grid(labels, np.cos(phi), theta, derivatives=True)
        return tuple(np.tensordot(weights, part, axes=1) for part in (values, d_phi, d_theta))

    def jet(self, phi: np.ndarray, theta: np.ndarray) -> FunctionJet:
        parts = [np.zeros(np.broadcast(phi, theta).shape) for _ in FunctionJet._fields]
        for coef, mode in self._terms():
            for part, component in zip(parts, harmonic_jet(self.level, mode.m, mode.family)(phi, theta)):
                part += coef * component
        return FunctionJet(*parts)

    def critical_points(self) -> Tuple[CriticalPoint, ...]:
        if self._critical_points is None:
            self._critical_points = find_critical_points(self)
        return self._critical_points


def _sign_change_cells(values: np.ndarray) -> np.ndarray:
    """Cells spanned by samples i..i+1 and k..k+1 (θ periodic) whose signs differ"""
    positive = values > 0.0
    right = np.roll(positive, -1, axis=1)
    corners = np.stack([positive[:-1], positive[1:], right[:-1], right[1:]])
    return corners.any(axis=0) & ~corners.all(axis=0)


def find_critical_points(function: ModeFunction, n_phi: Optional[int] = None) -> Tuple[CriticalPoint, ...]:
    """Non degenerate critical points of function away from the poles.

    Seeds are the cells of a coarse grid in which both partial derivatives change
    sign. Newton steps are clipped to one cell and a point is kept when it stays
    within two cells of its seed."""
    n_phi = n_phi or CRITICAL_ROWS_PER_LEVEL * max(function.level, 2)
    n_theta = 2 * n_phi
    h_phi, h_theta = math.pi / n_phi, 2.0 * math.pi / n_theta
    phi = (np.arange(n_phi) + 0.5) * h_phi
    theta = (np.arange(n_theta) + 0.5) * h_theta
    values, d_phi, d_theta = function.gradient_grid(phi, theta)
    scale = float(np.max(np.abs(values)))
    rows, cols = np.nonzero(_sign_change_cells(d_phi) & _sign_change_cells(d_theta))
    if rows.size == 0 or scale == 0.0:
        return ()

    seed_phi, seed_theta = phi[rows] + h_phi / 2, theta[cols] + h_theta / 2
    point_phi, point_theta = seed_phi.copy(), seed_theta.copy()
    for _ in range(NEWTON_STEPS):
        jet = function.jet(point_phi, point_theta)
        det = jet.d_phiphi * jet.d_thetatheta - jet.d_phitheta ** 2
        safe = np.where(det == 0.0, 1.0, det)
        step_phi = (jet.d_thetatheta * jet.d_phi - jet.d_phitheta * jet.d_theta) / safe
        step_theta = (jet.d_phiphi * jet.d_theta - jet.d_phitheta * jet.d_phi) / safe
        point_phi = np.clip(point_phi - np.clip(step_phi, -h_phi, h_phi), POLE_GUARD, math.pi - POLE_GUARD)
        point_theta = point_theta - np.clip(step_theta, -h_theta, h_theta)

    jet = function.jet(point_phi, point_theta)
    det = jet.d_phiphi * jet.d_thetatheta - jet.d_phitheta ** 2
    gradient = np.abs(jet.d_phi) + np.abs(jet.d_theta) / np.sin(point_phi)
    kept = (
        (gradient <= CRITICAL_GRADIENT_FACTOR * (function.level + 1) * scale)
        & (det != 0.0)
        & (np.abs(point_phi - seed_phi) <= 2 * h_phi)
        & (np.abs(point_theta - seed_theta) <= 2 * h_theta)
        & (point_phi > 2 * POLE_GUARD)
        & (point_phi < math.pi - 2 * POLE_GUARD)
    )
    found = {}
    point_theta = np.mod(point_theta, 2.0 * math.pi)
    for index in np.flatnonzero(kept):
        key = (round(point_phi[index] / h_phi * 64), round(point_theta[index] / h_theta * 64) % (64 * n_theta))
        found.setdefault(
            key,
            CriticalPoint(
                float(point_phi[index]), float(point_theta[index]), float(jet.value[index]), bool(det[index] < 0.0)
            ),
        )
    logger.debug(f"{len(found)} critical points from {rows.size} seeds at level {function.level}")
    return tuple(found.values())


def eval_mode_function(
    l: int,
    eigvec: Sequence[float],
    mode_labels: Sequence[ModeIndex],
    n_phi: int = DEFAULT_NODAL_GRID[0],
    n_theta: int = DEFAULT_NODAL_GRID[1],
) -> SphereGrid:
    """Samples of Σ C_m v_m + D_m w_m at level l"""
    return ModeFunction(l, eigvec, mode_labels).sample(n_phi, n_theta)


def eval_eigenfunction(
    record: PerturbedEigenvalue,
    n_phi: int = DEFAULT_NODAL_GRID[0],
    n_theta: int = DEFAULT_NODAL_GRID[1],
) -> SphereGrid:
    return ModeFunction.from_record(record).sample(n_phi, n_theta)


def rotate_pair(first: SphereGrid, second: SphereGrid, angle: float) -> SphereGrid:
    """cos(angle)·first + sin(angle)·second, a member of the same eigenspace"""
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    function = None
    if first.function is not None and second.function is not None:
        function = first.function.combined(cos_a, second.function, sin_a)
    return SphereGrid(
        cos_a * first.values + sin_a * second.values,
        cos_a * first.north + sin_a * second.north,
        cos_a * first.south + sin_a * second.south,
        function,
    )


def _resolve_critical_point(grid: SphereGrid, positive: np.ndarray, point: CriticalPoint) -> None:
    """Give the cells around point the sign of its value, pole rows excluded"""
    n_phi, n_theta = grid.n_phi, grid.n_theta
    row = min(int(point.phi * n_phi / math.pi), n_phi - 1)
    col = int(point.theta * n_theta / (2.0 * math.pi)) % n_theta
    # same physical extent along θ as along φ
    stretch = 2.0 * n_phi / (n_theta * math.sin(point.phi))
    radius_theta = min(max(OVERRIDE_RADIUS, math.ceil(OVERRIDE_RADIUS * stretch)), n_theta // 8)
    rows = np.arange(max(row - OVERRIDE_RADIUS, 1), min(row + OVERRIDE_RADIUS + 1, n_phi - 1))
    cols = np.arange(col - radius_theta, col + radius_theta + 1) % n_theta
    positive[np.ix_(rows, cols)] = point.value > 0.0


def count_nodal_domains(grid: SphereGrid) -> int:
    """Connected sign components under 4-adjacency, θ seam glued, pole caps fused"""
    scale = grid.scale()
    if scale == 0.0:
        raise ZeroFunctionError("Cannot count nodal domains of the zero function")
    values = np.where(grid.values == 0.0, TIE_FACTOR * scale, grid.values)
    positive = values > 0.0
    for point in grid.critical_points:
        # nodal crossings keep their sampled signs
        if abs(point.value) > CROSSING_FACTOR * scale:
            _resolve_critical_point(grid, positive, point)

    pos_labels, n_pos = ndimage.label(positive)
    neg_labels, n_neg = ndimage.label(~positive)
    # component ids: positive 0..n_pos-1, negative n_pos..n_pos+n_neg-1
    ids = np.where(positive, pos_labels - 1, neg_labels - 1 + n_pos)

    poles = []
    for row, value in ((0, grid.north), (-1, grid.south)):
        if abs(value) > POLE_ZERO_FACTOR * scale:
            poles.append((row, value > 0.0))
    union_find = UnionFind(n_pos + n_neg + len(poles))

    seam = positive[:, 0] == positive[:, -1]
    for first, last in zip(ids[seam, 0], ids[seam, -1]):
        union_find.union(int(first), int(last))

    for offset, (row, sign) in enumerate(poles):
        pole_id = n_pos + n_neg + offset
        for cell_id in np.unique(ids[row][positive[row] == sign]):
            union_find.union(pole_id, int(cell_id))
    return union_find.num_components


def nodal_count_checked(grid_of, n_phi: int, n_theta: int) -> Tuple[int, bool]:
    """Count at (n_phi, n_theta) and flag a change at twice the resolution.

    grid_of(n_phi, n_theta) must return the SphereGrid of the same function."""
    count = count_nodal_domains(grid_of(n_phi, n_theta))
    refined = count_nodal_domains(grid_of(2 * n_phi, 2 * n_theta))
    if refined != count:
        logger.warning(
            f"Nodal count changes from {count} to {refined} when refining "
            f"{n_phi}x{n_theta}, result is resolution suspect"
        )
    return count, refined != count


def conjecture_sequences(l: int, case: NodalCase) -> List[int]:
    """Conjectured nodal counts of the 2l+1 eigenfunctions of level l by ascending Λ₁"""
    if l < 0:
        raise ValueError(f"Level must be non negative, got {l}")
    case = NodalCase(case)
    biaxial = [l + 1]
    for m in range(1, l + 1):
        biaxial += [(l + 1 - m) * 2 * m] * 2
    if case == NodalCase.PROLATE:
        return biaxial
    if case == NodalCase.OBLATE:
        return biaxial[::-1]
    triaxial = list(biaxial)
    for m in range(1, l + 1):
        triaxial[2 * m] = biaxial[2 * m] - 2 * (m - 1) if m < l else l + 1
    return triaxial


def classify_case(alpha: float, beta: float, gamma: float) -> ClassifiedCase:
    """Shape class and the axis order putting an equal pair first"""
    params = (alpha, beta, gamma)
    if are_close(alpha, beta) and are_close(beta, gamma):
        raise SphericalCaseError(f"{params} describes a sphere, every level is fully degenerate")
    for order in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        pair, distinct = params[order[0]], params[order[2]]
        if are_close(params[order[0]], params[order[1]]):
            case = NodalCase.PROLATE if pair < distinct else NodalCase.OBLATE
            return ClassifiedCase(case, order)
    return ClassifiedCase(NodalCase.TRIAXIAL, (0, 1, 2))


def check_nodal_grid(n_phi: int, n_theta: int) -> None:
    """Mirror symmetric sampling with no cell centre on the equator or on θ = ±π/2"""
    if n_phi < 4 or n_phi % 2 or n_theta < 4 or n_theta % 4:
        raise ValueError(f"Nodal grids need an even n_phi and n_theta divisible by 4, got {n_phi}x{n_theta}")


def check_conjecture(
    alpha: float,
    beta: float,
    gamma: float,
    l: int,
    n_phi: int = DEFAULT_NODAL_GRID[0],
    n_theta: int = DEFAULT_NODAL_GRID[1],
    resolution_check: bool = True,
) -> NodalReport:
    """Nodal counts of the level l eigenfunctions against the conjectured sequence.

    A spheroid is relabeled so that its symmetry axis is the polar axis of the
    grid; counts and Λ₁ do not depend on the labelling."""
    check_nodal_grid(n_phi, n_theta)
    case, order = classify_case(alpha, beta, gamma)
    params = (alpha, beta, gamma)
    if order != (0, 1, 2):
        logger.info(f"Axes relabeled by {order} to put the equal pair first")
    records = perturbed_spectrum(l, *(params[index] for index in order))
    expected = conjecture_sequences(l, case)
    report = NodalReport(l, params, case, order, (n_phi, n_theta))

    counts, suspects = [], []
    for record in records:
        function = ModeFunction.from_record(record)
        if resolution_check:
            count, suspect = nodal_count_checked(function.sample, n_phi, n_theta)
        else:
            count, suspect = count_nodal_domains(function.sample(n_phi, n_theta)), False
        counts.append(count)
        suspects.append(suspect)
        logger.debug(f"l={l} rank {len(counts) - 1}: {count} domains")

    for cluster in cluster_sorted([record.lambda1 for record in records]):
        passed = sorted(counts[index] for index in cluster) == sorted(expected[index] for index in cluster)
        bound = l * l + cluster[0] + 1
        for index in cluster:
            report.rows.append(
                NodalRow(
                    rank=index,
                    lambda1=records[index].lambda1,
                    multiplicity=records[index].multiplicity,
                    count=counts[index],
                    expected=expected[index],
                    courant_bound=bound,
                    cluster_passed=passed,
                    resolution_suspect=suspects[index],
                )
            )
    if not report.courant_ok:
        logger.warning(f"Courant bound violated at level {l} for {params}")
    return report


def write_sign_pgm(grid: SphereGrid, path: str) -> str:
    """Binary portable graymap of the sign pattern, white where positive"""
    pixels = np.where(grid.values > 0.0, 255, 0).astype(np.uint8)
    with open(path, "wb") as pgm_file:
        pgm_file.write(f"P5\n{grid.n_theta} {grid.n_phi}\n255\n".encode("ascii"))
        pgm_file.write(pixels.tobytes())
    return path


class ZeroFunctionError(ValueError):
    pass


class SphericalCaseError(ValueError):
    pass
