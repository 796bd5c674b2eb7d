# coding: utf8
"""This module tests nodal domain counting and the conjectured sequences"""
import math
import random

import numpy as np
import pytest

from ellipsoid_spectrum import special_fn
from ellipsoid_spectrum.geometry import Family
from ellipsoid_spectrum.nodal import (
    ModeFunction,
    NodalCase,
    SphereGrid,
    SphericalCaseError,
    UnionFind,
    ZeroFunctionError,
    check_conjecture,
    classify_case,
    conjecture_sequences,
    count_nodal_domains,
    eval_mode_function,
    find_critical_points,
    rotate_pair,
    write_sign_pgm,
)
from ellipsoid_spectrum.perturbation import ModeIndex


SADDLE_LABELS = [ModeIndex(4, 0), ModeIndex(4, 4)]


def random_specs(count, seed):
    rng = random.Random(seed)
    specs = []
    while len(specs) < count:
        params = tuple(round(rng.uniform(-1.0, 1.0), 6) for _ in range(3))
        if min(abs(params[0] - params[1]), abs(params[1] - params[2]), abs(params[0] - params[2])) > 0.05:
            specs.append(params)
    return specs


def saddle_coefficients(excess):
    """35u² − 30u + 3 − (15 + excess)(1 − u)² cos4θ with u = cos²φ.

    Along θ = π/4 it is 2(5u − 3)² + excess·(1 − u)², so its eight saddles at
    u = 0.6 have value 0.16·excess."""
    table = special_fn.legendre_table(4, np.array([1.0, 0.0]))
    return [8.0 / table[4, 0, 0], -(15.0 + excess) / table[4, 4, 1]]


def harmonic(l, m, family=Family.COS, n_phi=60, n_theta=120):
    return eval_mode_function(l, [1.0], [ModeIndex(l, m, family)], n_phi, n_theta)


@pytest.mark.parametrize(
    ("case", "expected"),
    [
        (NodalCase.PROLATE, [5, 8, 8, 12, 12, 12, 12, 8, 8]),
        (NodalCase.OBLATE, [8, 8, 12, 12, 12, 12, 8, 8, 5]),
        (NodalCase.TRIAXIAL, [5, 8, 8, 12, 10, 12, 8, 8, 5]),
    ],
)
def test_level_four_sequences(case, expected):
    assert conjecture_sequences(4, case) == expected


@pytest.mark.parametrize("case", list(NodalCase))
def test_level_zero_sequence(case):
    assert conjecture_sequences(0, case) == [1]


@pytest.mark.parametrize("l", range(1, 7))
def test_triaxial_sequence_is_symmetric(l):
    sequence = conjecture_sequences(l, NodalCase.TRIAXIAL)
    assert len(sequence) == 2 * l + 1
    assert sequence == sequence[::-1]


def test_negative_level():
    with pytest.raises(ValueError):
        conjecture_sequences(-1, NodalCase.PROLATE)


@pytest.mark.parametrize(
    ("params", "case", "order"),
    [
        ((0.0, 0.0, 1.0), NodalCase.PROLATE, (0, 1, 2)),
        ((0.0, 0.0, -1.0), NodalCase.OBLATE, (0, 1, 2)),
        ((1.0, 0.0, 1.0), NodalCase.OBLATE, (0, 2, 1)),
        ((2.0, 3.0, 3.0), NodalCase.PROLATE, (1, 2, 0)),
        ((1.0, 2.0, 3.0), NodalCase.TRIAXIAL, (0, 1, 2)),
    ],
)
def test_classify_case(params, case, order):
    classified = classify_case(*params)
    assert classified.case == case
    assert classified.order == order


def test_sphere_has_no_case():
    with pytest.raises(SphericalCaseError):
        classify_case(0.5, 0.5, 0.5)


def test_constant_has_one_domain():
    assert count_nodal_domains(SphereGrid(np.ones((20, 40)), 1.0, 1.0)) == 1


def test_seam_is_glued():
    grid = SphereGrid(np.zeros((20, 40)), 0.0, 0.0)
    grid.values = np.outer(np.sin(grid.phi), np.cos(grid.theta))
    assert count_nodal_domains(grid) == 2


def test_zonal_bands():
    assert count_nodal_domains(harmonic(4, 0)) == 5


@pytest.mark.parametrize(("l", "m"), [(1, 1), (2, 1), (3, 2), (4, 4), (5, 3)])
def test_sectoral_and_tesseral(l, m):
    expected = (l + 1 - m) * 2 * m
    assert count_nodal_domains(harmonic(l, m)) == expected
    assert count_nodal_domains(harmonic(l, m, Family.SIN)) == expected


@pytest.mark.parametrize("angle", [0.3, 1.0, 2.5])
def test_rotation_in_eigenspace(angle):
    rotated = rotate_pair(harmonic(3, 2), harmonic(3, 2, Family.SIN), angle)
    assert count_nodal_domains(rotated) == 8


def test_zero_function():
    with pytest.raises(ZeroFunctionError):
        count_nodal_domains(SphereGrid(np.zeros((10, 20)), 0.0, 0.0))
    with pytest.raises(ZeroFunctionError):
        eval_mode_function(2, [0.0, 0.0], [ModeIndex(2, 0), ModeIndex(2, 2)], 10, 20)


def test_mode_labels_are_checked():
    with pytest.raises(ValueError):
        eval_mode_function(2, [1.0, 0.5], [ModeIndex(2, 0)], 10, 20)
    with pytest.raises(ValueError):
        eval_mode_function(2, [1.0], [ModeIndex(3, 0)], 10, 20)


def test_pole_values():
    grid = harmonic(2, 0)
    assert grid.north == pytest.approx(math.sqrt(5.0 / (4.0 * math.pi)))
    assert grid.south == pytest.approx(grid.north)


def test_union_find():
    union_find = UnionFind(5)
    union_find.union(0, 1)
    union_find.union(2, 3)
    union_find.union(1, 3)
    union_find.union(0, 2)
    assert union_find.num_components == 2
    assert sorted(sorted(component) for component in union_find.retrieve_components()) == [[0, 1, 2, 3], [4]]
    assert union_find.find_parent(3) == union_find.find_parent(0)


@pytest.mark.parametrize("params", [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0), (1.0, 2.0, 3.0)])
@pytest.mark.parametrize("l", [1, 2, 3])
def test_conjecture_on_small_grid(params, l):
    report = check_conjecture(*params, l, 100, 200)
    assert report.passed, f"{report.counts} vs {report.expected}"
    assert report.courant_ok
    assert not report.resolution_suspect
    assert len(report.rows) == 2 * l + 1


@pytest.mark.parametrize(("excess", "expected"), [(1e-5, 5), (-1e-5, 7)])
def test_saddle_below_grid_resolution(excess, expected):
    coefficients = saddle_coefficients(excess)
    for n_phi in (60, 120, 240):
        grid = eval_mode_function(4, coefficients, SADDLE_LABELS, n_phi, 2 * n_phi)
        assert count_nodal_domains(grid) == expected, f"{n_phi} rows"


def test_saddles_are_located():
    points = find_critical_points(ModeFunction(4, saddle_coefficients(1e-3), SADDLE_LABELS))
    saddles = [point for point in points if point.saddle and abs(point.value) < 1e-2]
    assert len(saddles) == 8
    for point in saddles:
        assert math.cos(point.phi) ** 2 == pytest.approx(0.6, abs=1e-6)
        assert math.fmod(point.theta, math.pi / 2) == pytest.approx(math.pi / 4, abs=1e-6)
        assert point.value == pytest.approx(1.6e-4, rel=1e-3)


def test_pure_harmonic_has_no_saddle_off_its_nodal_lines():
    points = harmonic(3, 2).function.critical_points()
    assert points
    scale = harmonic(3, 2).scale()
    assert all(not point.saddle or abs(point.value) < 1e-9 * scale for point in points)


def test_rotation_keeps_the_function():
    rotated = rotate_pair(harmonic(2, 1), harmonic(2, 1, Family.SIN), 0.4)
    assert rotated.function is not None
    assert rotated.function.coefficients == pytest.approx([math.cos(0.4), math.sin(0.4)])


@pytest.mark.parametrize(("n_phi", "n_theta"), [(101, 200), (100, 202), (2, 4)])
def test_asymmetric_grid_rejected(n_phi, n_theta):
    with pytest.raises(ValueError):
        check_conjecture(1.0, 2.0, 3.0, 2, n_phi, n_theta)


def test_relabelled_spheroid():
    relabelled = check_conjecture(0.0, 1.0, 0.0, 3, 60, 120, resolution_check=False)
    direct = check_conjecture(0.0, 0.0, 1.0, 3, 60, 120, resolution_check=False)
    assert relabelled.order == (0, 2, 1)
    assert relabelled.perturbation == (0.0, 1.0, 0.0)
    assert relabelled.counts == direct.counts
    assert relabelled.passed


@pytest.mark.parametrize("params", [(0.0, 0.0, 1.0), (0.0, 0.0, -1.0), (0.0, 1.0, 0.0), (0.0, -1.0, 0.0)])
@pytest.mark.parametrize("l", [4, 5])
def test_spheroids_at_higher_levels(params, l):
    report = check_conjecture(*params, l, 80, 160)
    assert report.passed, f"{report.counts} vs {report.expected}"
    assert report.courant_ok
    assert not report.resolution_suspect


def test_triaxial_exemplar_at_level_four():
    report = check_conjecture(1.0, 2.0, 3.0, 4, 120, 240)
    assert report.counts == [5, 8, 8, 12, 10, 12, 8, 8, 5]
    assert not report.resolution_suspect


@pytest.mark.parametrize("params", [(1.0, 2.0, 3.0), (0.0, 1.0, -1.0)] + random_specs(3, 11))
@pytest.mark.parametrize("l", [4, 5])
def test_triaxial_counts_are_grid_independent(params, l):
    report = check_conjecture(*params, l, 120, 240)
    assert not report.resolution_suspect, f"{report.counts}"
    assert report.courant_ok
    assert len(report.rows) == 2 * l + 1


def test_triaxial_sequence_can_fail():
    # eight saddles of value about -2e-5 join or split the lobes of rank 4, never into 10 domains
    report = check_conjecture(-0.524, 0.088, -0.26, 4, 120, 240)
    assert report.expected[4] == 10
    assert report.counts[4] in (5, 7)
    assert not report.resolution_suspect


def test_courant_bound_grows_with_rank():
    report = check_conjecture(1.0, 2.0, 3.0, 2, 60, 120, resolution_check=False)
    assert [row.courant_bound for row in report.rows] == [5, 6, 7, 8, 9]


def test_sign_pgm(tmp_path):
    path = write_sign_pgm(harmonic(1, 1, n_phi=20, n_theta=40), str(tmp_path / "sign.pgm"))
    with open(path, "rb") as pgm_file:
        content = pgm_file.read()
    header = b"P5\n40 20\n255\n"
    assert content.startswith(header)
    assert len(content) == len(header) + 800
    assert set(content[len(header) :]) == {0, 255}
