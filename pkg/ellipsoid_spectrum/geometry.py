# coding: utf8
"""This module contains ellipsoid parameterizations, induced metrics and the
coefficient fields of the Laplace–Beltrami operator.

Two charts are kept apart on purpose:

* the spheroid chart (a sinφ cosθ, a sinφ sinθ, b cosφ) used by the reduced
  ODE, where a is the equatorial and b the polar semi-axis;
* the triaxial chart (a sinφ cosθ, b sinφ sinθ, c cosφ), φ the colatitude,
  in which Δ_g = A∂φφ + B∂φθ + C∂θθ + E∂φ + F∂θ.

Spherical harmonics v_m = cos(mθ)P_l^m(cosφ) and w_m = sin(mθ)P_l^m(cosφ) are
evaluated in the triaxial chart.
"""
import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ellipsoid_spectrum import special_fn
from ellipsoid_spectrum.utils import are_close

ArrayLike = Union[float, np.ndarray]

POLE_MARGIN = 1e-8
POLE_SNAP = 1e-15


class Family(str, enum.Enum):
    COS = "COS"
    SIN = "SIN"


@dataclass(frozen=True)
class EllipsoidSpec:
    """Semi-axes along x, y, z, optionally with the perturbative form
    a = 1+αε, b = 1+βε, c = 1+γε it was built from"""

    a: float
    b: float
    c: float
    perturbation: Optional[Tuple[float, float, float, float]] = None
    permutation: Tuple[int, int, int] = (0, 1, 2)

    def __post_init__(self):
        for name in "abc":
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise InvalidEllipsoidError(f"Semi-axis {name} must be positive, got {value}")

    @classmethod
    def from_axes(cls, a: float, b: float, c: float) -> "EllipsoidSpec":
        return cls(float(a), float(b), float(c))

    @classmethod
    def from_perturbation(
        cls, alpha: float, beta: float, gamma: float, eps: float
    ) -> "EllipsoidSpec":
        if eps < 0:
            raise InvalidEllipsoidError(f"ε must be non negative, got {eps}")
        axes = [1.0 + value * eps for value in (alpha, beta, gamma)]
        if min(axes) <= 0:
            raise InvalidEllipsoidError(
                f"(α, β, γ, ε) = {(alpha, beta, gamma, eps)} gives non positive axes {axes}"
            )
        return cls(*axes, perturbation=(float(alpha), float(beta), float(gamma), float(eps)))

    @classmethod
    def spheroid(cls, equatorial: float, polar: float) -> "EllipsoidSpec":
        return cls(float(equatorial), float(equatorial), float(polar))

    @property
    def axes(self) -> Tuple[float, float, float]:
        return self.a, self.b, self.c

    @property
    def is_biaxial(self) -> bool:
        return are_close(self.a, self.b)

    @property
    def is_sphere(self) -> bool:
        return self.is_biaxial and are_close(self.b, self.c)

    @property
    def equatorial(self) -> float:
        return self.a

    @property
    def polar(self) -> float:
        return self.c

    def permuted(self, order: Sequence[int]) -> "EllipsoidSpec":
        """Same shape with axis i of the result taken from axis order[i]"""
        order = tuple(int(index) for index in order)
        if sorted(order) != [0, 1, 2]:
            raise InvalidEllipsoidError(f"Not a permutation of the axes: {order}")
        axes = [self.axes[index] for index in order]
        perturbation = None
        if self.perturbation is not None:
            params = self.perturbation[:3]
            perturbation = tuple(params[index] for index in order) + (self.perturbation[3],)
        permutation = tuple(self.permutation[index] for index in order)
        return EllipsoidSpec(*axes, perturbation=perturbation, permutation=permutation)

    def as_spheroid(self) -> "EllipsoidSpec":
        """Relabel the axes so that an equal pair becomes the equatorial pair"""
        if self.a == self.b:
            return self
        if self.a == self.c:
            return self.permuted((0, 2, 1))
        if self.b == self.c:
            return self.permuted((1, 2, 0))
        raise InvalidEllipsoidError(f"Axes {self.axes} have no equal pair")


class MetricAtPoint(NamedTuple):
    g11: ArrayLike
    g12: ArrayLike
    g22: ArrayLike
    D: ArrayLike
    phi: ArrayLike
    theta: ArrayLike

    @property
    def at_pole(self) -> Union[bool, np.ndarray]:
        return np.asarray(self.D) == 0.0


class OperatorCoeffs(NamedTuple):
    A: ArrayLike
    B: ArrayLike
    C: ArrayLike
    E: ArrayLike
    F: ArrayLike


class FunctionJet(NamedTuple):
    """Value and partial derivatives of a function of (φ, θ)"""

    value: ArrayLike
    d_phi: ArrayLike
    d_theta: ArrayLike
    d_phiphi: ArrayLike
    d_phitheta: ArrayLike
    d_thetatheta: ArrayLike


def _sin_snapped(phi: ArrayLike) -> ArrayLike:
    sin_phi = np.sin(phi)
    return np.where(np.abs(sin_phi) < POLE_SNAP, 0.0, sin_phi)


def metric_triaxial(spec: EllipsoidSpec, phi: ArrayLike, theta: ArrayLike) -> MetricAtPoint:
    a2, b2, c2 = spec.a ** 2, spec.b ** 2, spec.c ** 2
    sin_phi, cos_phi = _sin_snapped(phi), np.cos(phi)
    cos_t2, sin_t2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    g11 = cos_phi ** 2 * (a2 * cos_t2 + b2 * sin_t2) + c2 * sin_phi ** 2
    g22 = sin_phi ** 2 * (a2 * sin_t2 + b2 * cos_t2)
    g12 = (b2 - a2) * (2.0 * sin_phi * cos_phi) * np.sin(2.0 * theta) / 4.0
    det = g11 * g22 - g12 * g12
    return MetricAtPoint(g11, g12, g22, det, phi, theta)


def metric_biaxial(spec: EllipsoidSpec, phi: ArrayLike) -> MetricAtPoint:
    if not spec.is_biaxial:
        raise InvalidEllipsoidError(
            f"Spheroid chart needs a = b, got axes {spec.axes}; use as_spheroid()"
        )
    a2, b2 = spec.equatorial ** 2, spec.polar ** 2
    sin_phi, cos_phi = _sin_snapped(phi), np.cos(phi)
    g11 = a2 * cos_phi ** 2 + b2 * sin_phi ** 2
    g22 = a2 * sin_phi ** 2
    zero = np.zeros_like(np.asarray(g11, dtype=float))
    return MetricAtPoint(g11, zero if zero.ndim else 0.0, g22, g11 * g22, phi, 0.0)


def _check_pole_margin(phi: ArrayLike, margin: float) -> None:
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < margin) or np.any(phi > math.pi - margin):
        raise PoleMarginError(f"φ must stay in [{margin}, π-{margin}], got {phi}")


def laplace_coeffs(
    spec: EllipsoidSpec, phi: ArrayLike, theta: ArrayLike, pole_margin: float = POLE_MARGIN
) -> OperatorCoeffs:
    """Coefficients of Δ_g in the triaxial chart from hand-differentiated metric terms"""
    _check_pole_margin(phi, pole_margin)
    a2, b2, c2 = spec.a ** 2, spec.b ** 2, spec.c ** 2
    sin_phi, cos_phi = np.sin(phi), np.cos(phi)
    sin_2phi, cos_2phi = np.sin(2.0 * phi), np.cos(2.0 * phi)
    sin_2t, cos_2t = np.sin(2.0 * theta), np.cos(2.0 * theta)
    cos_t2, sin_t2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    k = (b2 - a2) / 4.0

    p_theta = a2 * cos_t2 + b2 * sin_t2
    q_theta = a2 * sin_t2 + b2 * cos_t2
    dp_theta = (b2 - a2) * sin_2t

    g11 = cos_phi ** 2 * p_theta + c2 * sin_phi ** 2
    g22 = sin_phi ** 2 * q_theta
    g12 = k * sin_2phi * sin_2t
    g11_phi, g11_theta = sin_2phi * (c2 - p_theta), cos_phi ** 2 * dp_theta
    g22_phi, g22_theta = sin_2phi * q_theta, -(sin_phi ** 2) * dp_theta
    g12_phi, g12_theta = 2.0 * k * cos_2phi * sin_2t, 2.0 * k * sin_2phi * cos_2t

    det = g11 * g22 - g12 * g12
    det_phi = g11_phi * g22 + g11 * g22_phi - 2.0 * g12 * g12_phi
    det_theta = g11_theta * g22 + g11 * g22_theta - 2.0 * g12 * g12_theta
    det2 = 2.0 * det * det

    coeff_e = (
        g22_phi / det - g22 * det_phi / det2 - g12_theta / det + g12 * det_theta / det2
    )
    coeff_f = (
        g11_theta / det - g11 * det_theta / det2 - g12_phi / det + g12 * det_phi / det2
    )
    return OperatorCoeffs(g22 / det, -2.0 * g12 / det, g11 / det, coeff_e, coeff_f)


def a1_coeffs(
    alpha: float, beta: float, gamma: float, phi: ArrayLike, theta: ArrayLike
) -> OperatorCoeffs:
    """Coefficient fields of the first-order operator A₁ in Δ_g = A₀ + εA₁ + O(ε²)"""
    _check_pole_margin(phi, POLE_MARGIN)
    sin_phi, cos_phi = np.sin(phi), np.cos(phi)
    sin_t, cos_t = np.sin(theta), np.cos(theta)
    cos_t2, cos_p2 = cos_t ** 2, cos_phi ** 2
    coeff_a = (2 * beta - 2 * alpha) * cos_t2 * cos_p2 + (2 * gamma - 2 * beta) * cos_p2 - 2 * gamma
    coeff_b = 4 * (alpha - beta) * cos_phi * sin_t * cos_t / sin_phi
    coeff_c = ((2 * alpha - 2 * beta) * cos_t2 - 2 * alpha) / sin_phi ** 2
    coeff_e = (
        4
        * (
            ((beta - alpha) * cos_t2 - beta + gamma) * cos_p2
            + 1.5 * (alpha - beta) * cos_t2
            - alpha / 2
            + beta
            - gamma
        )
        * cos_phi
        / sin_phi
    )
    coeff_f = 4 * (beta - alpha) * sin_t * cos_t / sin_phi ** 2
    return OperatorCoeffs(coeff_a, coeff_b, coeff_c, coeff_e, coeff_f)


def apply_operator(coeffs: OperatorCoeffs, jet: FunctionJet) -> ArrayLike:
    return (
        coeffs.A * jet.d_phiphi
        + coeffs.B * jet.d_phitheta
        + coeffs.C * jet.d_thetatheta
        + coeffs.E * jet.d_phi
        + coeffs.F * jet.d_theta
    )


def a1_apply(
    alpha: float,
    beta: float,
    gamma: float,
    u: Callable[[ArrayLike, ArrayLike], FunctionJet],
    phi: ArrayLike,
    theta: ArrayLike,
) -> ArrayLike:
    """(A₁u)(φ, θ) for a function handle returning its jet"""
    return apply_operator(a1_coeffs(alpha, beta, gamma, phi, theta), u(phi, theta))


def _trig(family: Family, m: int, theta: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    if family == Family.COS:
        return np.cos(m * theta), -m * np.sin(m * theta)
    return np.sin(m * theta), m * np.cos(m * theta)


def harmonic_jet(l: int, m: int, family: Family) -> Callable[[ArrayLike, ArrayLike], FunctionJet]:
    """Jet of v_m (COS) or w_m (SIN) at degree l, usable with a1_apply"""
    if family == Family.SIN and m == 0:
        raise ValueError("w_0 vanishes identically")
    special_fn.LegendreMode(l, m)

    def jet(phi: ArrayLike, theta: ArrayLike) -> FunctionJet:
        _check_pole_margin(phi, POLE_MARGIN)
        sin_phi = np.sin(phi)
        table, d_table = special_fn.legendre_table(l, np.cos(phi), derivatives=True)
        p_value, p_phi = table[l, m], d_table[l, m]
        p_phiphi = -np.cos(phi) / sin_phi * p_phi - (l * (l + 1) - m * m / sin_phi ** 2) * p_value
        trig, d_trig = _trig(family, m, theta)
        return FunctionJet(
            trig * p_value,
            trig * p_phi,
            d_trig * p_value,
            trig * p_phiphi,
            d_trig * p_phi,
            -m * m * trig * p_value,
        )

    return jet


def harmonic_grid(
    labels: Sequence[Tuple[int, int, Family]],
    t: np.ndarray,
    theta: np.ndarray,
    derivatives: bool = False,
):
    """Values (and φ, θ derivatives) of the labelled harmonics on the tensor grid
    t = cosφ by θ, shaped (len(labels), len(t), len(theta))"""
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    l_max = max(label[0] for label in labels)
    if derivatives:
        table, d_table = special_fn.legendre_table(l_max, t, derivatives=True)
    else:
        table = special_fn.legendre_table(l_max, t)
    shape = (len(labels), t.size, theta.size)
    values = np.empty(shape)
    d_phi = np.empty(shape) if derivatives else None
    d_theta = np.empty(shape) if derivatives else None
    for index, (l, m, family) in enumerate(labels):
        trig, d_trig = _trig(family, m, theta)
        values[index] = np.outer(table[l, m], trig)
        if derivatives:
            d_phi[index] = np.outer(d_table[l, m], trig)
            d_theta[index] = np.outer(table[l, m], d_trig)
    if derivatives:
        return values, d_phi, d_theta
    return values


class InvalidEllipsoidError(ValueError):
    pass


class PoleMarginError(ValueError):
    pass
