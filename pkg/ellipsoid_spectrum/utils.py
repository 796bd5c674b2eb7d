# coding: utf8
"""This module contains various utility functions not specific to another module."""
from typing import Iterable, List, Sequence, Tuple

import numpy as np

TOLERANCE = 1e-12
TAU_MULT = 1e-9


def relative_scale(*values: float) -> float:
    """Magnitude used to turn an absolute gap into a relative one, never below 1"""
    return max([1.0] + [abs(float(value)) for value in values])


def are_close(x: float, y: float, tol: float = TOLERANCE) -> bool:
    return abs(x - y) <= tol * relative_scale(x, y)


def cluster_sorted(values: Sequence[float], tol: float = TAU_MULT) -> List[List[int]]:
    """Group ascending values whose neighbours are closer than tol (relative).

    The scale is the largest magnitude of the whole sequence, so that values
    near zero cluster the same way as large ones."""
    if not len(values):
        return []
    scale = relative_scale(*values)
    clusters = [[0]]
    for index in range(1, len(values)):
        if values[index] - values[index - 1] <= tol * scale:
            clusters[-1].append(index)
        else:
            clusters.append([index])
    return clusters


def level_window(level: int) -> Tuple[float, float]:
    """Half-gap window [l², (l+1)²) around the sphere eigenvalue l(l+1)"""
    return float(level * level), float((level + 1) * (level + 1))


def parse_floats(text: str, count: int = None) -> Tuple[float, ...]:
    """Parse "1,1.2,0.8" into floats, optionally enforcing their count"""
    try:
        values = tuple(float(item) for item in text.split(",") if item.strip())
    except ValueError as err:
        raise ValueError(f"Cannot read numbers from <{text}>") from err
    if count is not None and len(values) != count:
        raise ValueError(f"Expected {count} comma separated numbers, got <{text}>")
    return values


def parse_ints(text: str) -> Tuple[int, ...]:
    """Parse "1,2,5" or a range "1-5" into integers"""
    values: List[int] = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "-" in item[1:]:
            start, stop = item.split("-", 1)
            values.extend(range(int(start), int(stop) + 1))
        else:
            values.append(int(item))
    return tuple(values)


def format_float(value: float) -> str:
    return f"{value:.17g}"


def fix_sign(vector: np.ndarray) -> np.ndarray:
    """Make the first component that is not negligible positive"""
    magnitude = np.max(np.abs(vector)) if vector.size else 0.0
    if magnitude == 0.0:
        return vector
    for component in vector:
        if abs(component) > 1e-12 * magnitude:
            return -vector if component < 0 else vector
    return vector


def pairwise(items: Iterable) -> Iterable:
    items = list(items)
    return zip(items[:-1], items[1:])
