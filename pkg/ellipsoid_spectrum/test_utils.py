# coding: utf8
import numpy as np
import pytest

from ellipsoid_spectrum import utils
from ellipsoid_spectrum.progress import Progress


def test_cluster_sorted():
    assert utils.cluster_sorted([]) == []
    assert utils.cluster_sorted([-1.6, 0.0, 1e-12, 1.6]) == [[0], [1, 2], [3]]
    assert utils.cluster_sorted([1.0, 1.0 + 1e-6, 2.0], tol=1e-3) == [[0, 1], [2]]


def test_are_close():
    assert utils.are_close(1e6, 1e6 + 1e-7)
    assert not utils.are_close(1.0, 1.0 + 1e-9)


def test_level_window():
    assert utils.level_window(3) == (9.0, 16.0)


@pytest.mark.parametrize(("text", "expected"), [("1,1.2, 0.8", (1.0, 1.2, 0.8)), ("-1,", (-1.0,))])
def test_parse_floats(text, expected):
    assert utils.parse_floats(text) == expected


def test_parse_floats_errors():
    with pytest.raises(ValueError):
        utils.parse_floats("1,x")
    with pytest.raises(ValueError):
        utils.parse_floats("1,2", 3)


@pytest.mark.parametrize(("text", "expected"), [("1-4", (1, 2, 3, 4)), ("0,2,5-6", (0, 2, 5, 6)), ("3", (3,))])
def test_parse_ints(text, expected):
    assert utils.parse_ints(text) == expected


def test_fix_sign():
    assert list(utils.fix_sign(np.array([0.0, -2.0, 1.0]))) == [0.0, 2.0, -1.0]
    assert list(utils.fix_sign(np.zeros(2))) == [0.0, 0.0]


def test_pairwise():
    assert list(utils.pairwise([1, 2, 3])) == [(1, 2), (2, 3)]


def test_progress_reports_tasks():
    reported = []
    Progress.reset()
    Progress.progress_func = lambda *args: reported.append(args)
    try:
        Progress.set(0, "Sweep_Solve", "", percent_range=50)
        Progress.new_task_count(2)
        Progress.set()
        Progress.set()
    finally:
        Progress.progress_func = None
        Progress.reset()
    assert reported == [(0, "Sweep_Solve", ""), (25, "Sweep_Solve", "1/2"), (50, "Sweep_Solve", "2/2")]
