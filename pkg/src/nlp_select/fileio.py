"""CSV and JSON file formats for the command-line pipeline.

Data CSVs are UTF-8 with LF line endings and a header row: the response
column is named "y" (0/1 values) and design columns are named "x1".."xp"
(decimal floats). A file may carry both (y first) or either alone. Parse
errors cite the 1-based data row and the column name.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .errors import InvalidInputError


def _open_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        raise InvalidInputError(f"{path}: empty file")
    return rows[0], rows[1:]


def _design_columns(header: list[str]) -> list[int]:
    cols = [c for c in header if c != "y"]
    expected = [f"x{j + 1}" for j in range(len(cols))]
    if cols != expected:
        raise InvalidInputError(
            f"design columns must be named x1..x{len(cols)} in order, got {cols[:5]}..."
        )
    return [i for i, c in enumerate(header) if c != "y"]


def read_table(path) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Read a data CSV; returns (X, y), either possibly None."""
    path = Path(path)
    header, rows = _open_rows(path)
    if not rows:
        raise InvalidInputError(f"{path}: no data rows")
    y_col = header.index("y") if "y" in header else None
    x_cols = _design_columns(header)
    n, p = len(rows), len(x_cols)
    X = np.empty((n, p)) if p else None
    y = np.empty(n) if y_col is not None else None
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise InvalidInputError(
                f"{path}: row {i + 1} has {len(row)} fields, expected {len(header)}"
            )
        if y_col is not None:
            val = row[y_col].strip()
            if val not in ("0", "1"):
                raise InvalidInputError(
                    f"{path}: row {i + 1}, column y: {val!r} is not 0 or 1"
                )
            y[i] = float(val)
        for j, c in enumerate(x_cols):
            try:
                v = float(row[c])
            except ValueError:
                raise InvalidInputError(
                    f"{path}: row {i + 1}, column {header[c]}: "
                    f"{row[c]!r} is not a number"
                ) from None
            if not math.isfinite(v):
                raise InvalidInputError(
                    f"{path}: row {i + 1}, column {header[c]}: non-finite value"
                )
            X[i, j] = v
    return X, y


def read_dataset(path) -> tuple[np.ndarray, np.ndarray]:
    X, y = read_table(path)
    if X is None or y is None:
        raise InvalidInputError(f"{path}: need both a y column and x1..xp columns")
    return X, y


def write_table(path, X=None, y=None) -> None:
    """Write a data CSV in the canonical format (y column first if present)."""
    path = Path(path)
    header = []
    if y is not None:
        header.append("y")
    ncol = 0 if X is None else X.shape[1]
    header += [f"x{j + 1}" for j in range(ncol)]
    lines = [",".join(header)]
    nrow = len(y) if y is not None else X.shape[0]
    for i in range(nrow):
        fields = []
        if y is not None:
            fields.append(str(int(y[i])))
        if X is not None:
            fields += [repr(float(v)) for v in X[i]]
        lines.append(",".join(fields))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_coefficients(path) -> np.ndarray:
    """Read a dense coefficient vector CSV with columns x1..xp, one data row."""
    X, _ = read_table(Path(path))
    if X is None or X.shape[0] != 1:
        raise InvalidInputError(
            f"{path}: coefficient file must have exactly one data row of x1..xp"
        )
    return X[0]


def _json_safe(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            # every score in the pipeline is finite by construction; a NaN or
            # infinity reaching serialization is a bug upstream
            raise InvalidInputError(f"refusing to serialize non-finite value {obj!r}")
        return obj
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return _json_safe(obj.item())
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    return obj


def write_json(path, payload: dict) -> None:
    Path(path).write_text(
        json.dumps(_json_safe(payload), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot parse {path}: {exc}") from exc
