# coding: utf8
"""This module computes first-order eigenvalue corrections of near-spherical ellipsoids.

For axes a = 1+αε, b = 1+βε, c = 1+γε the eigenvalues bifurcating from the
sphere level l(l+1) read Λ = l(l+1) + εΛ₁ + O(ε²). Λ₁ is an eigenvalue of the
negated matrix of ⟨·, A₁·⟩ on the degree l harmonics, which splits into four
tridiagonal blocks by trigonometric family and parity of m.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from ellipsoid_spectrum import special_fn
from ellipsoid_spectrum.eigensolve import SymTridiagonal, eig_tridiagonal
from ellipsoid_spectrum.geometry import Family, a1_apply, harmonic_jet
from ellipsoid_spectrum.spectrum_logging import logger
from ellipsoid_spectrum.utils import TAU_MULT, are_close, cluster_sorted


class BlockKind(str, enum.Enum):
    COS_EVEN = "COS_EVEN"
    COS_ODD = "COS_ODD"
    SIN_EVEN = "SIN_EVEN"
    SIN_ODD = "SIN_ODD"
    BIAXIAL_CLOSED_FORM = "BIAXIAL_CLOSED_FORM"


TRIDIAGONAL_BLOCKS = (BlockKind.COS_EVEN, BlockKind.COS_ODD, BlockKind.SIN_EVEN, BlockKind.SIN_ODD)


class Multiplicity(str, enum.Enum):
    SIMPLE = "SIMPLE"
    DOUBLE = "DOUBLE"
    HIGHER = "HIGHER"


@dataclass(frozen=True)
class ModeIndex:
    l: int
    m: int
    family: Family = Family.COS

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.l < 0 or not 0 <= self.m <= self.l:
            raise InvalidModeError(f"Invalid mode l={self.l}, m={self.m}: need 0 <= m <= l")
        if self.family == Family.SIN and self.m == 0:
            raise InvalidModeError(f"w_0 vanishes identically (l={self.l})")

    @property
    def parity(self) -> int:
        return self.m % 2

    @property
    def block(self) -> BlockKind:
        return block_for_mode(self)

    def __str__(self):
        prefix = "v" if self.family == Family.COS else "w"
        return f"{prefix}{self.m}(l={self.l})"


def block_for_mode(mode: ModeIndex) -> BlockKind:
    if mode.family == Family.COS:
        return BlockKind.COS_ODD if mode.parity else BlockKind.COS_EVEN
    return BlockKind.SIN_ODD if mode.parity else BlockKind.SIN_EVEN


def block_modes(kind: BlockKind, l: int) -> List[ModeIndex]:
    """Modes of a block in ascending m"""
    family = Family.COS if kind in (BlockKind.COS_EVEN, BlockKind.COS_ODD) else Family.SIN
    odd = kind in (BlockKind.COS_ODD, BlockKind.SIN_ODD)
    start = 1 if odd else (0 if family == Family.COS else 2)
    return [ModeIndex(l, m, family) for m in range(start, l + 1, 2)]


@dataclass(frozen=True, eq=False)
class TridiagonalBlock:
    which: BlockKind
    diag: np.ndarray
    offdiag: np.ndarray
    mode_labels: Tuple[ModeIndex, ...]

    @property
    def size(self) -> int:
        return len(self.mode_labels)

    def to_dense(self) -> np.ndarray:
        if not self.size:
            return np.zeros((0, 0))
        return SymTridiagonal(self.diag, self.offdiag).to_dense()


@dataclass(eq=False)
class PerturbedEigenvalue:
    lambda0: float
    lambda1: float
    multiplicity: int
    eigvec: np.ndarray
    mode_labels: Tuple[ModeIndex, ...]
    source_block: BlockKind
    level: int = 0

    def value(self, eps: float) -> float:
        """First-order estimate Λ₀ + εΛ₁"""
        return self.lambda0 + eps * self.lambda1

    def coefficients(self) -> Dict[str, float]:
        """C_m / D_m coefficients keyed by mode name"""
        return {str(mode): float(coef) for mode, coef in zip(self.mode_labels, self.eigvec)}


@dataclass(eq=False)
class MultiplicityReport:
    level: int
    values: List[PerturbedEigenvalue]
    classes: List[Multiplicity]
    biaxial: bool
    empirical: bool
    notes: List[str] = field(default_factory=list)

    def count(self, kind: Multiplicity) -> int:
        """Number of distinct eigenvalues of the given class"""
        total, index = 0, 0
        while index < len(self.values):
            if self.classes[index] == kind:
                total += 1
            index += self.values[index].multiplicity
        return total


def _level_factor(l: int) -> float:
    return 2.0 * l * (l + 1) / ((2 * l + 3) * (2 * l - 1))


def biaxial_lambda1(l: int, m: int, alpha: float, beta: float) -> float:
    """Λ₁ of the mode (l, ±m) on the spheroid with equal axes 1+αε and distinct axis 1+βε"""
    ModeIndex(l, abs(m))
    return -2.0 * alpha * l * (l + 1) + (alpha - beta) * _level_factor(l) * (
        2 * l * l - 2 * m * m + 2 * l - 1
    )


def biaxial_spectrum(l: int, alpha: float, beta: float) -> List[float]:
    """All 2l+1 biaxial Λ₁ values, m = 0 once and ±m twice, ascending"""
    values = [biaxial_lambda1(l, 0, alpha, beta)]
    for m in range(1, l + 1):
        values += [biaxial_lambda1(l, m, alpha, beta)] * 2
    return sorted(values)


def triaxial_entry_diag(
    l: int, m: int, alpha: float, beta: float, gamma: float, family: Family = Family.COS
) -> float:
    """⟨v_m, A₁v_m⟩ or ⟨w_m, A₁w_m⟩"""
    mode = ModeIndex(l, m, family)
    if m == 1:
        # v_1 and w_1 see the x and y axes differently
        if mode.family == Family.COS:
            weight = 1.5 * alpha + 0.5 * beta - 2.0 * gamma
        else:
            weight = 1.5 * beta + 0.5 * alpha - 2.0 * gamma
        return weight * 2.0 * l * l * (l + 1) ** 2 / ((2 * l + 3) * (2 * l - 1)) + (
            2.0 * l * (l + 1) * gamma
        )
    return 2.0 * gamma * l * (l + 1) + (alpha + beta - 2.0 * gamma) * _level_factor(l) * (
        l * l + m * m + l - 1
    )


def triaxial_entry_offdiag(l: int, m: int, alpha: float, beta: float) -> float:
    """⟨v_{m-2}, A₁v_m⟩, equal to ⟨w_{m-2}, A₁w_m⟩ for m >= 3"""
    if m < 2:
        raise InvalidModeError(f"Off-diagonal entries couple m-2 and m, need m >= 2, got {m}")
    ModeIndex(l, m)
    value = (
        (beta - alpha)
        * l
        * (l + 1)
        / ((2 * l - 1) * (2 * l + 3))
        * math.sqrt((l - m + 1) * (l - m + 2) * (l + m - 1) * (l + m))
    )
    if m == 2:
        # √2 if m = 2: v_0 carries the 2π normalization, v_m the π one
        value *= math.sqrt(2.0)
    return value


def _assemble_block(kind: BlockKind, l: int, alpha: float, beta: float, gamma: float):
    modes = tuple(block_modes(kind, l))
    diag = np.array(
        [-triaxial_entry_diag(l, mode.m, alpha, beta, gamma, mode.family) for mode in modes]
    )
    offdiag = np.array([-triaxial_entry_offdiag(l, mode.m, alpha, beta) for mode in modes[1:]])
    return TridiagonalBlock(kind, diag, offdiag, modes)


def assemble_blocks(l: int, alpha: float, beta: float, gamma: float) -> List[TridiagonalBlock]:
    """The four negated tridiagonal blocks of level l, in COS_EVEN, COS_ODD, SIN_EVEN, SIN_ODD order"""
    if l < 0:
        raise InvalidModeError(f"Level must be non negative, got {l}")
    return [_assemble_block(kind, l, alpha, beta, gamma) for kind in TRIDIAGONAL_BLOCKS]


def perturbed_spectrum(
    l: int, alpha: float, beta: float, gamma: float, tol: float = TAU_MULT
) -> List[PerturbedEigenvalue]:
    """The 2l+1 first-order corrections of level l sorted by Λ₁"""
    records = []
    for block in assemble_blocks(l, alpha, beta, gamma):
        if not block.size:
            continue
        pairs = eig_tridiagonal(SymTridiagonal(block.diag, block.offdiag))
        for index, value in enumerate(pairs.values):
            records.append(
                PerturbedEigenvalue(
                    lambda0=float(l * (l + 1)),
                    lambda1=float(value),
                    multiplicity=1,
                    eigvec=pairs.vectors[:, index],
                    mode_labels=block.mode_labels,
                    source_block=block.which,
                    level=l,
                )
            )
    records.sort(key=lambda record: record.lambda1)
    for cluster in cluster_sorted([record.lambda1 for record in records], tol):
        for index in cluster:
            records[index].multiplicity = len(cluster)
    logger.debug(f"Level {l}: Λ₁ = {[record.lambda1 for record in records]}")
    return records


def _is_biaxial(alpha: float, beta: float, gamma: float) -> bool:
    return are_close(alpha, beta) or are_close(beta, gamma) or are_close(alpha, gamma)


def multiplicity_report(
    l: int, alpha: float, beta: float, gamma: float, tol: float = TAU_MULT
) -> MultiplicityReport:
    values = perturbed_spectrum(l, alpha, beta, gamma, tol)
    classes = []
    for value in values:
        if value.multiplicity == 1:
            classes.append(Multiplicity.SIMPLE)
        elif value.multiplicity == 2:
            classes.append(Multiplicity.DOUBLE)
        else:
            classes.append(Multiplicity.HIGHER)
    biaxial = _is_biaxial(alpha, beta, gamma)
    empirical = not biaxial and l >= 4
    report = MultiplicityReport(l, values, classes, biaxial, empirical)
    if empirical:
        report.notes.append(f"Simplicity at l={l} is observed, not guaranteed")
    if not biaxial and any(kind != Multiplicity.SIMPLE for kind in classes):
        logger.warning(f"Distinct axes {(alpha, beta, gamma)} give a repeated Λ₁ at l={l}")
    return report


def _surd_pair(base: float, scale: float, radicand: float) -> List[float]:
    root = scale * math.sqrt(max(radicand, 0.0))
    return [base - root, base + root]


def _l3_cos_even(alpha: float, beta: float, gamma: float) -> List[float]:
    return _surd_pair(
        -(104.0 / 15.0) * (alpha + beta) - (152.0 / 15.0) * gamma,
        32.0 / 15.0,
        4 * alpha ** 2 + 4 * beta ** 2 + gamma ** 2
        - 7 * alpha * beta - alpha * gamma - beta * gamma,
    )


def explicit_lambda1(l: int, alpha: float, beta: float, gamma: float) -> List[float]:
    """Closed-form Λ₁ values for l <= 3, ascending"""
    if l == 0:
        values = [0.0]
    elif l == 1:
        values = [
            -0.8 * (alpha + beta + 3 * gamma),
            -0.8 * (3 * alpha + beta + gamma),
            -0.8 * (alpha + 3 * beta + gamma),
        ]
    elif l == 2:
        values = _surd_pair(
            -4.0 * (alpha + beta + gamma),
            16.0 / 7.0,
            alpha ** 2 + beta ** 2 + gamma ** 2 - alpha * beta - alpha * gamma - beta * gamma,
        )
        values += [
            -(12.0 / 7.0) * (3 * alpha + beta + 3 * gamma),
            -(12.0 / 7.0) * (3 * alpha + 3 * beta + gamma),
            -(12.0 / 7.0) * (alpha + 3 * beta + 3 * gamma),
        ]
    elif l == 3:
        values = _l3_cos_even(alpha, beta, gamma)
        values += _l3_cos_even(gamma, beta, alpha)
        values += _l3_cos_even(alpha, gamma, beta)
        values.append(-8.0 * (alpha + beta + gamma))
    else:
        raise InvalidModeError(f"Closed forms exist up to l=3, got l={l}")
    return sorted(values)


def entry_by_quadrature(
    first: ModeIndex, second: ModeIndex, alpha: float, beta: float, gamma: float, order: int = None
) -> float:
    """⟨first, A₁ second⟩ on the round sphere by Gauss–Legendre and trapezoid rules"""
    order = order or 2 * max(first.l, second.l) + 16
    rule = special_fn.gauss_legendre(order)
    theta, theta_weights = special_fn.periodic_trapezoid(2 * order)
    phi = np.arccos(rule.nodes)[:, None]
    theta = theta[None, :]
    left = harmonic_jet(first.l, first.m, first.family)(phi, theta).value
    right = a1_apply(alpha, beta, gamma, harmonic_jet(second.l, second.m, second.family), phi, theta)
    return float(rule.weights @ (left * right) @ theta_weights)


class InvalidModeError(ValueError):
    pass
