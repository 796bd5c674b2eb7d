# coding: utf8
"""This module writes result tables to CSV or JSON files for plotting software"""
import csv
import enum
import io
import json
import math
import os
from typing import Any, Dict, List, Sequence

import numpy as np

from ellipsoid_spectrum.utils import format_float
from ellipsoid_spectrum.version import __version__

FORMATS = ("csv", "json")


def plain(value: Any) -> Any:
    """Convert numpy scalars, enums and tuples into JSON friendly values"""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.ndarray):
        return [plain(item) for item in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    return value


def csv_cell(value: Any) -> str:
    value = plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


class ResultWriter:
    """Collects metadata and named tables, then renders them"""

    def __init__(self, command: str, metadata: Dict[str, Any] = None):
        self.metadata: Dict[str, Any] = {"version": __version__, "command": command}
        self.metadata.update(metadata or {})
        self.tables: Dict[str, Dict[str, List]] = {}

    def write_metadata(self, key: str, value: Any) -> None:
        self.metadata[key] = plain(value)

    def write_note(self, note: str) -> None:
        self.metadata.setdefault("notes", []).append(note)

    def write_table(self, name: str, columns: Sequence[str]) -> None:
        self.tables[name] = {"columns": list(columns), "rows": []}

    def write_row(self, name: str, row: Dict[str, Any]) -> None:
        table = self.tables[name]
        unknown = set(row) - set(table["columns"])
        if unknown:
            raise KeyError(f"Columns {sorted(unknown)} are not in table <{name}>")
        table["rows"].append([plain(row.get(column)) for column in table["columns"]])

    def to_csv(self) -> str:
        output = io.StringIO()
        output.write("# " + json.dumps(plain(self.metadata), sort_keys=True) + "\n")
        writer = csv.writer(output, lineterminator="\n")
        for index, (name, table) in enumerate(self.tables.items()):
            if index:
                output.write("\n")
            output.write(f"# table {name}\n")
            writer.writerow(table["columns"])
            for row in table["rows"]:
                writer.writerow([csv_cell(value) for value in row])
        return output.getvalue()

    def to_json(self) -> str:
        document = {"metadata": plain(self.metadata), "tables": self.tables}
        return json.dumps(document, indent=2, sort_keys=True) + "\n"

    def tostring(self, fmt: str = "csv") -> str:
        if fmt not in FORMATS:
            raise ValueError(f"Unknown output format <{fmt}>, use one of {FORMATS}")
        return self.to_csv() if fmt == "csv" else self.to_json()

    def write_to_file(self, full_path: str, fmt: str = "csv") -> str:
        directory = os.path.dirname(full_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(full_path, "w", encoding="utf-8", newline="") as result_file:
            result_file.write(self.tostring(fmt))
        return full_path

    @staticmethod
    def write_sidecar(full_path: str, run_info: Dict[str, Any]) -> str:
        """Non deterministic run information next to the data file"""
        sidecar = f"{full_path}.meta.json"
        with open(sidecar, "w", encoding="utf-8") as meta_file:
            json.dump(plain(run_info), meta_file, indent=2, sort_keys=True)
            meta_file.write("\n")
        return sidecar
