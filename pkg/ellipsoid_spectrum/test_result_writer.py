# coding: utf8
"""This module tests CSV and JSON result files"""
import csv
import io
import json
import math

import numpy as np
import pytest

from ellipsoid_spectrum.perturbation import BlockKind
from ellipsoid_spectrum.result_writer import ResultWriter, csv_cell, plain
from ellipsoid_spectrum.version import __version__


@pytest.fixture
def writer():
    result = ResultWriter("table1", {"config": {"grid": 400}})
    result.write_table("table1", ["m", "l", "lambda1", "block", "match", "note"])
    result.write_row("table1", {"m": 0, "l": 1, "lambda1": -2.4, "block": BlockKind.COS_EVEN, "match": True})
    result.write_row("table1", {"m": np.int64(1), "l": 2, "lambda1": np.float64(-36 / 7), "match": np.bool_(False)})
    return result


def test_plain_values():
    assert plain(BlockKind.SIN_ODD) == "SIN_ODD"
    assert plain(np.array([1.5, 2.0])) == [1.5, 2.0]
    assert plain({"axes": (1, 2.5)}) == {"axes": [1, 2.5]}
    assert plain(math.nan) is None
    assert isinstance(plain(np.bool_(True)), bool)


@pytest.mark.parametrize(
    ("value", "expected"),
    [(True, "true"), (False, "false"), (None, ""), (math.inf, ""), (0.1, "0.10000000000000001"), (3, "3"), ("x", "x")],
)
def test_csv_cell(value, expected):
    assert csv_cell(value) == expected


def test_csv_layout(writer):
    lines = writer.to_csv().splitlines()
    metadata = json.loads(lines[0][2:])
    assert metadata == {"version": __version__, "command": "table1", "config": {"grid": 400}}
    assert lines[1] == "# table table1"
    rows = list(csv.reader(io.StringIO("\n".join(lines[2:]))))
    assert rows[0] == ["m", "l", "lambda1", "block", "match", "note"]
    assert rows[1] == ["0", "1", "-2.3999999999999999", "COS_EVEN", "true", ""]
    assert float(rows[2][2]) == -36 / 7
    assert rows[2][4] == "false"


def test_json_layout(writer):
    writer.write_note("first note")
    document = json.loads(writer.tostring("json"))
    assert document["metadata"]["notes"] == ["first note"]
    table = document["tables"]["table1"]
    assert table["columns"][:3] == ["m", "l", "lambda1"]
    assert table["rows"][0] == [0, 1, -2.4, "COS_EVEN", True, None]
    assert table["rows"][1][4] is False


def test_several_tables_are_separated(writer):
    writer.write_table("limits", ["b"])
    writer.write_row("limits", {"b": 500.0})
    text = writer.to_csv()
    assert "\n\n# table limits\nb\n500\n" in text


def test_unknown_column(writer):
    with pytest.raises(KeyError):
        writer.write_row("table1", {"eps": 0.1})


def test_unknown_format(writer):
    with pytest.raises(ValueError):
        writer.tostring("xml")


def test_write_to_file(writer, tmp_path):
    path = writer.write_to_file(str(tmp_path / "out" / "table1.json"), "json")
    sidecar = ResultWriter.write_sidecar(path, {"wall_time_s": 1.5, "jobs": np.int64(2)})
    with open(path, encoding="utf-8") as result_file:
        assert json.load(result_file)["metadata"]["command"] == "table1"
    with open(sidecar, encoding="utf-8") as meta_file:
        assert json.load(meta_file) == {"wall_time_s": 1.5, "jobs": 2}
    assert sidecar.endswith("table1.json.meta.json")
