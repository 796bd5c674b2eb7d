# coding: utf8
"""This module contains the scalar special functions every solver relies on.

Associated Legendre functions follow the convention
Q_l^m(t) = (1-t²)^{m/2} d^{l+m}/dt^{l+m} [(1-t²)^l] (no Condon–Shortley phase).
The normalized P_l^m is the positive multiple of the textbook function for which
cos(mθ)P_l^m(cosφ) has unit norm on the round sphere, i.e. 2π∫(P_l^0)²dt = 1 and
π∫(P_l^m)²dt = 1 for m ≥ 1. Values come from the three-term recurrence in l at
fixed m, seeded from the closed form at l = m.
"""
import functools
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy import optimize

ArrayLike = Union[float, np.ndarray]

SERIES_LIMIT = 12.0
ROOT_SCAN_STEP = 0.1


@dataclass(frozen=True)
class LegendreMode:
    l: int
    m: int

    def __post_init__(self):
        if self.l < 0 or self.m < 0 or self.m > self.l:
            raise LegendreDomainError(
                f"Invalid Legendre mode l={self.l}, m={self.m}: need 0 <= m <= l"
            )


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss–Legendre rule on [-1, 1]; nodes ascending, weights positive"""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        self.nodes.flags.writeable = False
        self.weights.flags.writeable = False

    def integrate(self, values: np.ndarray) -> float:
        """Apply the rule to samples taken at the nodes (last axis)"""
        return np.dot(np.asarray(values), self.weights)


def _check_argument(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-14):
        raise LegendreDomainError(f"Legendre argument outside [-1, 1]: {t}")
    return np.clip(t, -1.0, 1.0)


def _normalization(l: int, m: int) -> float:
    """Factor mapping the textbook P_l^m onto the unit sphere norm"""
    log_ratio = math.lgamma(l - m + 1) - math.lgamma(l + m + 1)
    circle = 2.0 * math.pi if m == 0 else math.pi
    return math.sqrt((2 * l + 1) / (2 * circle) * math.exp(log_ratio))


def legendre_table(
    l_max: int, t: ArrayLike, derivatives: bool = False
) -> Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]:
    """Normalized P_l^m(t) for all 0 <= m <= l <= l_max, indexed [l, m, ...].

    With derivatives=True also returns dP_l^m(cosφ)/dφ, which requires |t| < 1.
    """
    if l_max < 0:
        raise LegendreDomainError(f"l_max must be non negative, got {l_max}")
    t = _check_argument(t)
    sin_phi = np.sqrt(np.maximum(0.0, 1.0 - t * t))
    table = np.zeros((l_max + 1, l_max + 1) + t.shape)
    p_mm = np.full(t.shape, math.sqrt(1.0 / (4.0 * math.pi)))
    for m in range(l_max + 1):
        if m > 0:
            p_mm = p_mm * math.sqrt((2 * m + 1) / (2 * m)) * sin_phi
        table[m, m] = p_mm
        if m < l_max:
            table[m + 1, m] = math.sqrt(2 * m + 3) * t * p_mm
        for l in range(m + 2, l_max + 1):
            a_lm = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b_lm = math.sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            table[l, m] = a_lm * (t * table[l - 1, m] - b_lm * table[l - 2, m])
    # the recurrence carries the complex-harmonic norm, cos/sin pairs need √2 more
    table[:, 1:] *= math.sqrt(2.0)
    if not derivatives:
        return table

    if np.any(sin_phi == 0.0):
        raise LegendreDomainError("Legendre φ-derivatives need |t| < 1")
    d_table = np.zeros_like(table)
    for m in range(l_max + 1):
        d_table[m, m] = m * t * table[m, m] / sin_phi
        for l in range(m + 1, l_max + 1):
            c_lm = math.sqrt((2 * l + 1) / (2 * l - 1) * (l - m) * (l + m))
            d_table[l, m] = (l * t * table[l, m] - c_lm * table[l - 1, m]) / sin_phi
    return table, d_table


def legendre_p_normalized(mode: LegendreMode, t: ArrayLike) -> ArrayLike:
    values = legendre_table(mode.l, t)[mode.l, mode.m]
    return float(values) if np.ndim(values) == 0 else values


def legendre_q(mode: LegendreMode, t: ArrayLike) -> ArrayLike:
    """Q_l^m(t) = (-1)^l 2^l l! P_l^m(t) with P_l^m the textbook function"""
    log_scale = mode.l * math.log(2.0) + math.lgamma(mode.l + 1)
    scale = (-1) ** mode.l * math.exp(log_scale) / _normalization(mode.l, mode.m)
    return scale * legendre_p_normalized(mode, t)


def legendre_ratio(mode: LegendreMode) -> float:
    """∫t²(P_l^m)²dt / ∫(P_l^m)²dt in closed form"""
    l, m = mode.l, mode.m
    return (2 * l * l - 2 * m * m + 2 * l - 1) / ((2 * l + 3) * (2 * l - 1))


@functools.lru_cache(maxsize=64)
def gauss_legendre(order: int) -> QuadratureRule:
    """Newton-refined Gauss–Legendre nodes and weights"""
    if order < 1:
        raise ValueError(f"Quadrature order must be at least 1, got {order}")
    index = np.arange(1, order + 1)
    nodes = np.cos(math.pi * (index - 0.25) / (order + 0.5))
    for _ in range(100):
        p_prev = np.ones_like(nodes)
        p_curr = nodes.copy()
        for j in range(2, order + 1):
            p_prev, p_curr = p_curr, ((2 * j - 1) * nodes * p_curr - (j - 1) * p_prev) / j
        derivative = order * (nodes * p_curr - p_prev) / (nodes * nodes - 1.0)
        step = p_curr / derivative
        nodes = nodes - step
        if np.max(np.abs(step)) < 1e-16:
            break
    p_prev = np.ones_like(nodes)
    p_curr = nodes.copy()
    for j in range(2, order + 1):
        p_prev, p_curr = p_curr, ((2 * j - 1) * nodes * p_curr - (j - 1) * p_prev) / j
    derivative = order * (nodes * p_curr - p_prev) / (nodes * nodes - 1.0)
    weights = 2.0 / ((1.0 - nodes * nodes) * derivative * derivative)
    nodes, weights = nodes[::-1], weights[::-1]
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    return QuadratureRule(nodes.copy(), weights.copy(), order)


def periodic_trapezoid(points: int) -> Tuple[np.ndarray, np.ndarray]:
    """Equispaced nodes on [0, 2π) with equal weights"""
    nodes = 2.0 * math.pi * np.arange(points) / points
    return nodes, np.full(points, 2.0 * math.pi / points)


def _bessel_series(m: int, x: float) -> float:
    half = 0.5 * x
    term = math.exp(m * math.log(half) - math.lgamma(m + 1))
    total = term
    k = 0
    while True:
        k += 1
        term *= -half * half / (k * (k + m))
        total += term
        if k > half and abs(term) <= 1e-17 * abs(total):
            return total


def _bessel_miller(m: int, x: float) -> float:
    top = max(m, int(x))
    start = 2 * ((top + 20 + int(math.sqrt(40.0 * top))) // 2)
    upper, current = 0.0, 1e-30
    result, total = 0.0, 0.0
    for k in range(start, 0, -1):
        lower = 2.0 * k / x * current - upper
        upper, current = current, lower
        if abs(current) > 1e200:
            upper *= 1e-200
            current *= 1e-200
            result *= 1e-200
            total *= 1e-200
        index = k - 1
        if index == m:
            result = current
        if index == 0:
            total += current
        elif index % 2 == 0:
            total += 2.0 * current
    return result / total


def bessel_j(m: int, x: float) -> float:
    """J_m(x): ascending series below SERIES_LIMIT, Miller's backward recurrence above"""
    if m < 0 or x < 0:
        raise ValueError(f"bessel_j needs m >= 0 and x >= 0, got m={m}, x={x}")
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x < SERIES_LIMIT:
        return _bessel_series(m, x)
    return _bessel_miller(m, x)


def bessel_jp(m: int, x: float) -> float:
    """J'_m(x)"""
    if m == 0:
        return -bessel_j(1, x)
    return 0.5 * (bessel_j(m - 1, x) - bessel_j(m + 1, x))


def bessel_root(m: int, k: int, kind: str = "J") -> float:
    """k-th positive root of J_m (kind "J") or of J'_m (kind "J'")"""
    if k < 1:
        raise ValueError(f"Root index starts at 1, got {k}")
    if kind == "J":
        func = functools.partial(bessel_j, m)
    elif kind == "J'":
        func = functools.partial(bessel_jp, m)
    else:
        raise ValueError(f"Unknown Bessel root kind <{kind}>, use J or J'")
    lower = max(0.5, 0.5 * m)
    limit = lower + math.pi * (k + 2) + 2 * m + 10.0
    f_lower = func(lower)
    found = 0
    while lower < limit:
        upper = lower + ROOT_SCAN_STEP
        f_upper = func(upper)
        if f_lower * f_upper < 0.0 or f_upper == 0.0:
            found += 1
            if found == k:
                if f_upper == 0.0:
                    return upper
                root, info = optimize.brentq(
                    func, lower, upper, xtol=1e-15, rtol=1e-14, full_output=True
                )
                if not info.converged:
                    raise BesselRootError(m, k, kind, (lower, upper), info.flag)
                return root
        lower, f_lower = upper, f_upper
    raise BesselRootError(m, k, kind, (lower, limit), "no sign change found")


def disk_eigenvalues(m: int, count: int) -> np.ndarray:
    """Squares of the first roots of J_m and J'_m merged in ascending order"""
    values = [bessel_root(m, k, "J") ** 2 for k in range(1, count + 1)]
    values += [bessel_root(m, k, "J'") ** 2 for k in range(1, count + 1)]
    if m == 0:
        values.append(0.0)
    return np.sort(values)[:count]


class LegendreDomainError(ValueError):
    pass


class BesselRootError(RuntimeError):
    def __init__(self, m, k, kind, bracket, state):
        super().__init__(
            f"Root {k} of {kind}_{m} not found in bracket {bracket}: {state}"
        )
        self.bracket = bracket
        self.state = state
