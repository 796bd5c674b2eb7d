# coding: utf8
"""This module computes eigenvalues of a triaxial ellipsoid by a Galerkin method.

The weak form of -Δ_g u = Λu is discretized on the real spherical harmonics
v_m = cos(mθ)P_l^m(cosφ), w_m = sin(mθ)P_l^m(cosφ) up to degree l_max, with
Gauss–Legendre quadrature in t = cosφ and the trapezoid rule in θ.

The metric is invariant under θ → -θ, θ → θ+π and φ → π-φ, so the matrices
split into eight classes labelled by (family, m mod 2, (l+m) mod 2). Each class
is solved separately.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ellipsoid_spectrum import special_fn
from ellipsoid_spectrum.eigensolve import eig_generalized
from ellipsoid_spectrum.geometry import EllipsoidSpec, Family, harmonic_grid
from ellipsoid_spectrum.perturbation import BlockKind, perturbed_spectrum
from ellipsoid_spectrum.spectrum_logging import logger
from ellipsoid_spectrum.utils import level_window

DEFAULT_LMAX = 12
QUADRATURE_PAD = 4

Label = Tuple[int, int, Family]


class SymmetryClass(NamedTuple):
    family: Family
    m_parity: int
    lm_parity: int

    def block(self) -> BlockKind:
        """Tridiagonal block the class feeds at the levels it contains"""
        if self.family == Family.COS:
            return BlockKind.COS_ODD if self.m_parity else BlockKind.COS_EVEN
        return BlockKind.SIN_ODD if self.m_parity else BlockKind.SIN_EVEN

    def contains_level(self, level: int) -> bool:
        return level % 2 == (self.m_parity + self.lm_parity) % 2


@dataclass(frozen=True, eq=False)
class GalerkinBasis:
    l_max: int
    labels: Tuple[Label, ...] = field(init=False)

    def __post_init__(self):
        if self.l_max < 2:
            raise ValueError(f"Galerkin basis needs l_max >= 2, got {self.l_max}")
        labels = []
        for l in range(self.l_max + 1):
            for m in range(l + 1):
                labels.append((l, m, Family.COS))
                if m:
                    labels.append((l, m, Family.SIN))
        object.__setattr__(self, "labels", tuple(labels))

    def __len__(self):
        return len(self.labels)

    @staticmethod
    def class_of(label: Label) -> SymmetryClass:
        l, m, family = label
        return SymmetryClass(family, m % 2, (l + m) % 2)

    def class_indices(self) -> Dict[SymmetryClass, List[int]]:
        classes: Dict[SymmetryClass, List[int]] = {}
        for index, label in enumerate(self.labels):
            classes.setdefault(self.class_of(label), []).append(index)
        return classes


@dataclass(frozen=True, eq=False)
class GalerkinMatrices:
    stiffness: np.ndarray
    mass: np.ndarray
    basis: GalerkinBasis
    quadrature: Dict[str, int]


@dataclass(eq=False)
class SpectrumResult:
    values: np.ndarray
    classes: List[SymmetryClass]
    spec: EllipsoidSpec
    basis: GalerkinBasis
    vectors: Optional[np.ndarray] = None
    residual_bound: float = 0.0

    def __len__(self):
        return self.values.size

    def in_window(self, level: int) -> List[int]:
        low, high = level_window(level)
        return [index for index, value in enumerate(self.values) if low <= value < high]


@dataclass(eq=False)
class SlopeTable:
    """Numeric eigenvalues of one level over ε with (Λ - Λ₀)/ε against Λ₁"""

    level: int
    perturbation: Tuple[float, float, float]
    eps: List[float]
    blocks: List[BlockKind]
    lambda1: np.ndarray
    values: np.ndarray
    slopes: np.ndarray

    @property
    def errors(self) -> np.ndarray:
        return self.slopes - self.lambda1[None, :]

    def extrapolated(self) -> np.ndarray:
        """Slopes extrapolated to ε = 0 by a polynomial through all ε samples"""
        eps = np.asarray(self.eps)
        degree = eps.size - 1
        return np.array(
            [np.polyval(np.polyfit(eps, self.slopes[:, j], degree), 0.0) for j in range(self.slopes.shape[1])]
        )


def _quadrature(l_max: int):
    rule = special_fn.gauss_legendre(2 * (l_max + QUADRATURE_PAD))
    theta, theta_weights = special_fn.periodic_trapezoid(4 * (l_max + QUADRATURE_PAD))
    return rule, theta, theta_weights


def assemble_galerkin(spec: EllipsoidSpec, l_max: int = DEFAULT_LMAX) -> GalerkinMatrices:
    """Stiffness ∬∇Y_jᵀg⁻¹∇Y_k√D and mass ∬Y_jY_k√D in the harmonic basis"""
    basis = GalerkinBasis(l_max)
    rule, theta, theta_weights = _quadrature(l_max)
    t = rule.nodes
    values, d_phi, d_theta = harmonic_grid(basis.labels, t, theta, derivatives=True)

    a2, b2, c2 = spec.a ** 2, spec.b ** 2, spec.c ** 2
    cos_phi = t[:, None]
    sin_phi = np.sqrt(1.0 - t * t)[:, None]
    cos_t2, sin_t2 = np.cos(theta)[None, :] ** 2, np.sin(theta)[None, :] ** 2
    sin_2t = np.sin(2.0 * theta)[None, :]
    k = (b2 - a2) / 4.0
    p_theta = a2 * cos_t2 + b2 * sin_t2
    q_theta = a2 * sin_t2 + b2 * cos_t2
    g11 = cos_phi ** 2 * p_theta + c2 * sin_phi ** 2
    # D = sin²φ R, and sinφ dφ = dt absorbs one sinφ
    reduced = g11 * q_theta - 4.0 * k * k * cos_phi ** 2 * sin_2t ** 2
    root = np.sqrt(reduced)
    weights = np.outer(rule.weights, theta_weights)

    n_basis = len(basis)
    w_phiphi = (weights * q_theta / root).ravel()
    w_cross = (weights * (-2.0 * k * cos_phi * sin_2t) / (sin_phi * root)).ravel()
    w_thetatheta = (weights * g11 / (sin_phi ** 2 * root)).ravel()
    w_mass = (weights * root).ravel()

    y, y_phi, y_theta = (array.reshape(n_basis, -1) for array in (values, d_phi, d_theta))
    cross = (y_phi * w_cross) @ y_theta.T
    stiffness = (y_phi * w_phiphi) @ y_phi.T + cross + cross.T + (y_theta * w_thetatheta) @ y_theta.T
    mass = (y * w_mass) @ y.T
    logger.info(
        f"Galerkin assembly l_max={l_max}: {n_basis} harmonics, "
        f"{t.size}x{theta.size} quadrature nodes"
    )
    return GalerkinMatrices(
        0.5 * (stiffness + stiffness.T),
        0.5 * (mass + mass.T),
        basis,
        {"gauss_legendre": t.size, "trapezoid": theta.size},
    )


def solve_triaxial(
    spec: EllipsoidSpec,
    l_max: int = DEFAULT_LMAX,
    count: Optional[int] = None,
    vectors: bool = False,
) -> SpectrumResult:
    """The count smallest eigenvalues, merged over the eight symmetry classes"""
    basis = GalerkinBasis(l_max)
    limit = len(basis) // 2
    count = limit if count is None else count
    if not 1 <= count <= limit:
        raise ValueError(f"Can resolve at most {limit} eigenvalues with l_max={l_max}, asked {count}")
    matrices = assemble_galerkin(spec, l_max)

    found = []
    residual = 0.0
    for symmetry, indices in sorted(basis.class_indices().items()):
        selection = np.ix_(indices, indices)
        pairs = eig_generalized(matrices.stiffness[selection], matrices.mass[selection])
        residual = max(residual, pairs.residual_bound)
        for column, value in enumerate(pairs.values):
            found.append((value, symmetry, indices, pairs.vectors[:, column]))
    found.sort(key=lambda item: item[0])
    found = found[:count]

    coefficients = None
    if vectors:
        coefficients = np.zeros((len(basis), count))
        for column, (_, _, indices, vector) in enumerate(found):
            coefficients[indices, column] = vector
    return SpectrumResult(
        np.array([item[0] for item in found]),
        [item[1] for item in found],
        spec,
        basis,
        coefficients,
        residual,
    )


def level_cluster(result: SpectrumResult, level: int) -> List[int]:
    """Indices of the 2l+1 eigenvalues attached to a sphere level"""
    members = result.in_window(level)
    if len(members) != 2 * level + 1:
        low, high = level_window(level)
        neighbours = sorted(
            {
                int(math.floor(math.sqrt(result.values[index])))
                for index in range(len(result))
                if abs(result.values[index] - level * (level + 1)) <= 2 * level + 2
            }
            - {level}
        )
        raise ClusterAmbiguityError(
            f"Found {len(members)} eigenvalues in [{low}, {high}) for level {level} "
            f"instead of {2 * level + 1}",
            levels=[level] + neighbours,
        )
    return members


def slope_extraction(
    alpha: float,
    beta: float,
    gamma: float,
    eps_values: Sequence[float],
    level: int,
    l_max: int = DEFAULT_LMAX,
) -> SlopeTable:
    """(Λ - l(l+1))/ε per eigenvalue of a level, matched to Λ₁ block by block"""
    exact = perturbed_spectrum(level, alpha, beta, gamma)
    order = sorted(range(len(exact)), key=lambda index: (exact[index].source_block, exact[index].lambda1))
    blocks = [exact[index].source_block for index in order]
    lambda1 = np.array([exact[index].lambda1 for index in order])

    values = np.zeros((len(eps_values), len(exact)))
    count = min((l_max + 1) ** 2 // 2, (level + 2) ** 2)
    for row, eps in enumerate(eps_values):
        spec = EllipsoidSpec.from_perturbation(alpha, beta, gamma, eps)
        result = solve_triaxial(spec, l_max, count)
        members = level_cluster(result, level)
        numeric = sorted(
            (result.classes[index].block(), result.values[index]) for index in members
        )
        if [item[0] for item in numeric] != blocks:
            raise ClusterAmbiguityError(
                f"Level {level} eigenvalues at ε={eps} do not split into the expected blocks",
                levels=[level],
            )
        values[row] = [item[1] for item in numeric]
    slopes = (values - level * (level + 1)) / np.asarray(eps_values)[:, None]
    return SlopeTable(level, (alpha, beta, gamma), list(eps_values), blocks, lambda1, values, slopes)


class ClusterAmbiguityError(LookupError):
    def __init__(self, message: str, levels=None):
        super().__init__(f"{message} (levels involved: {levels})")
        self.levels = list(levels or [])
