"""JSON serialization for tables, measures, operator pairs and reports.

All floating-point values are printed with 17 significant digits so
that parsing the output reproduces the binary doubles exactly and
reruns are byte-identical.  Complex matrices are stored as nested
arrays of ``[re, im]`` pairs; a ``dim x 0`` matrix is a list of ``dim``
empty rows.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import SchemaError
from .gns import SymmetricPair
from .moments import AtomicMeasure, MomentTable
from .solutions import SolutionReport

__all__ = [
    "dumps",
    "write_json",
    "read_json",
    "moment_table_to_json",
    "moment_table_from_json",
    "measure_to_json",
    "measure_from_json",
    "complex_matrix_to_json",
    "complex_matrix_from_json",
    "complex_vector_to_json",
    "complex_vector_from_json",
    "pair_to_json",
    "pair_from_json",
    "report_to_json",
]


def _format_float(x: float) -> str:
    return "%.17g" % float(x)


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON text with 17-significant-digit floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [dumps(v, indent + 1) for v in obj]
        if all(len(p) < 40 and "\n" not in p for p in parts):
            return "[" + ", ".join(parts) + "]"
        return ("[\n" + ",\n".join(inner + p for p in parts) + "\n"
                + pad + "]")
    raise TypeError(f"cannot serialize value of type {type(obj).__name__}")


def write_json(obj, path: str):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")


def read_json(path: str):
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno} "
                          f"column {exc.colno}: {exc.msg}") from exc


def _expect(cond: bool, message: str):
    if not cond:
        raise SchemaError(message)


def _expect_dict(obj, what: str) -> dict:
    _expect(isinstance(obj, dict), f"{what} must be a JSON object")
    return obj


def _expect_list(obj, what: str) -> list:
    _expect(isinstance(obj, list), f"{what} must be a JSON array")
    return obj


def _expect_int(obj, what: str) -> int:
    _expect(isinstance(obj, int) and not isinstance(obj, bool),
            f"{what} must be an integer")
    return obj


def _expect_real(obj, what: str) -> float:
    _expect(isinstance(obj, (int, float)) and not isinstance(obj, bool),
            f"{what} must be a number")
    value = float(obj)
    _expect(np.isfinite(value), f"{what} must be finite")
    return value


def _get(obj: dict, key: str, what: str):
    _expect(key in obj, f"{what} is missing required field {key!r}")
    return obj[key]


def moment_table_to_json(table: MomentTable) -> dict:
    entries = [[m, n, float(table.values[m, n])]
               for m in range(table.max_m + 1)
               for n in range(table.max_n + 1)]
    return {"max_m": table.max_m, "max_n": table.max_n, "entries": entries}


def moment_table_from_json(obj) -> MomentTable:
    obj = _expect_dict(obj, "moment table")
    max_m = _expect_int(_get(obj, "max_m", "moment table"), "max_m")
    max_n = _expect_int(_get(obj, "max_n", "moment table"), "max_n")
    _expect(max_m >= 0 and max_n >= 0, "max_m and max_n must be >= 0")
    entries = _expect_list(_get(obj, "entries", "moment table"), "entries")
    values = np.full((max_m + 1, max_n + 1), np.nan)
    for i, entry in enumerate(entries):
        row = _expect_list(entry, f"entries[{i}]")
        _expect(len(row) == 3, f"entries[{i}] must be [m, n, s]")
        m = _expect_int(row[0], f"entries[{i}][0]")
        n = _expect_int(row[1], f"entries[{i}][1]")
        s = _expect_real(row[2], f"entries[{i}][2]")
        _expect(0 <= m <= max_m and 0 <= n <= max_n,
                f"entries[{i}] index ({m}, {n}) outside the rectangle")
        _expect(np.isnan(values[m, n]),
                f"entries[{i}] duplicates index ({m}, {n})")
        values[m, n] = s
    missing = np.argwhere(np.isnan(values))
    _expect(missing.size == 0,
            "moment table is missing entry "
            f"({int(missing[0][0])}, {int(missing[0][1])})"
            if missing.size else "")
    return MomentTable(max_m, max_n, values)


def measure_to_json(measure: AtomicMeasure) -> dict:
    atoms = [[float(measure.points[i, 0]), float(measure.points[i, 1]),
              float(measure.weights[i])] for i in range(measure.n_atoms)]
    return {"atoms": atoms}


def measure_from_json(obj) -> AtomicMeasure:
    obj = _expect_dict(obj, "measure")
    atoms = _expect_list(_get(obj, "atoms", "measure"), "atoms")
    points = []
    weights = []
    for i, entry in enumerate(atoms):
        row = _expect_list(entry, f"atoms[{i}]")
        _expect(len(row) == 3, f"atoms[{i}] must be [t1, t2, w]")
        t1 = _expect_real(row[0], f"atoms[{i}][0]")
        t2 = _expect_real(row[1], f"atoms[{i}][1]")
        w = _expect_real(row[2], f"atoms[{i}][2]")
        _expect(w > 0, f"atoms[{i}] weight must be positive")
        points.append([t1, t2])
        weights.append(w)
    pts = np.array(points) if points else np.zeros((0, 2))
    try:
        return AtomicMeasure(pts, np.array(weights))
    except ValueError as exc:
        raise SchemaError(f"measure: {exc}") from exc


def complex_matrix_to_json(mat: np.ndarray) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in mat]


def complex_matrix_from_json(obj, what: str, rows: int | None = None,
                             cols: int | None = None) -> np.ndarray:
    data = _expect_list(obj, what)
    if rows is not None:
        _expect(len(data) == rows, f"{what} must have {rows} rows")
    out_rows = []
    width = cols
    for i, row in enumerate(data):
        row = _expect_list(row, f"{what}[{i}]")
        if width is None:
            width = len(row)
        _expect(len(row) == width,
                f"{what}[{i}] has {len(row)} entries, expected {width}")
        values = []
        for j, cell in enumerate(row):
            cell = _expect_list(cell, f"{what}[{i}][{j}]")
            _expect(len(cell) == 2, f"{what}[{i}][{j}] must be [re, im]")
            values.append(complex(_expect_real(cell[0], f"{what}[{i}][{j}][0]"),
                                  _expect_real(cell[1], f"{what}[{i}][{j}][1]")))
        out_rows.append(values)
    n_rows = len(out_rows)
    n_cols = width if width is not None else 0
    out = np.zeros((n_rows, n_cols), dtype=complex)
    for i, values in enumerate(out_rows):
        out[i, :] = values
    return out


def complex_vector_to_json(vec: np.ndarray) -> list:
    vec = np.asarray(vec, dtype=complex).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in vec]


def complex_vector_from_json(obj, what: str, length: int | None = None) -> np.ndarray:
    data = _expect_list(obj, what)
    if length is not None:
        _expect(len(data) == length, f"{what} must have {length} entries")
    values = []
    for i, cell in enumerate(data):
        cell = _expect_list(cell, f"{what}[{i}]")
        _expect(len(cell) == 2, f"{what}[{i}] must be [re, im]")
        values.append(complex(_expect_real(cell[0], f"{what}[{i}][0]"),
                              _expect_real(cell[1], f"{what}[{i}][1]")))
    return np.array(values, dtype=complex)


def pair_to_json(pair: SymmetricPair) -> dict:
    return {
        "dim": pair.dim,
        "a1_domain": complex_matrix_to_json(pair.a1_domain),
        "a1_action": complex_matrix_to_json(pair.a1_action),
        "a2_domain": complex_matrix_to_json(pair.a2_domain),
        "a2_action": complex_matrix_to_json(pair.a2_action),
        "h00": complex_vector_to_json(pair.h00),
        "j_matrix": complex_matrix_to_json(pair.j_matrix),
        "a2_selfadjoint": bool(pair.a2_selfadjoint),
    }


def pair_from_json(obj) -> SymmetricPair:
    obj = _expect_dict(obj, "operator pair")
    dim = _expect_int(_get(obj, "dim", "operator pair"), "dim")
    _expect(dim >= 1, "dim must be >= 1")
    a1_domain = complex_matrix_from_json(_get(obj, "a1_domain", "operator pair"),
                                         "a1_domain", rows=dim)
    a1_action = complex_matrix_from_json(_get(obj, "a1_action", "operator pair"),
                                         "a1_action", rows=dim,
                                         cols=a1_domain.shape[1])
    a2_domain = complex_matrix_from_json(_get(obj, "a2_domain", "operator pair"),
                                         "a2_domain", rows=dim)
    a2_action = complex_matrix_from_json(_get(obj, "a2_action", "operator pair"),
                                         "a2_action", rows=dim,
                                         cols=a2_domain.shape[1])
    h00 = complex_vector_from_json(_get(obj, "h00", "operator pair"),
                                   "h00", length=dim)
    j_matrix = complex_matrix_from_json(_get(obj, "j_matrix", "operator pair"),
                                        "j_matrix", rows=dim, cols=dim)
    flag = _get(obj, "a2_selfadjoint", "operator pair")
    _expect(isinstance(flag, bool), "a2_selfadjoint must be a boolean")
    return SymmetricPair(dim=dim, a1_domain=a1_domain, a1_action=a1_action,
                         a2_domain=a2_domain, a2_action=a2_action,
                         h00=h00, j_matrix=j_matrix, a2_selfadjoint=flag)


def report_to_json(report: SolutionReport) -> dict:
    return {
        "atoms": measure_to_json(report.measure)["atoms"],
        "max_abs_moment_error": float(report.max_abs_moment_error),
        "degrees_checked": [int(report.degrees_checked[0]),
                            int(report.degrees_checked[1])],
        "determinate": report.determinate,
        "u2_seed": report.u2_seed,
    }
