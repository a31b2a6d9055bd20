"""CSV loading: one-hot encoding, min-max scaling, protected-column selection.

The loader is deliberately strict. Rows with empty cells are rejected with
the offending row number, the protected column must carry exactly two
distinct values, and numeric parsing failures name the cell. Encoding is
deterministic: categorical levels are expanded in lexicographic order, so
re-loading a file always yields an identical dataset.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import BalanceRatio, Dataset, balance_of
from .errors import (
    CellParseError,
    ContractViolationError,
    EmptyFileError,
    InfeasibilityError,
    MissingColumnError,
    MissingValueError,
    ProtectedLevelsError,
)


@dataclass(frozen=True)
class DatasetSpec:
    """How to read a CSV file into a :class:`Dataset`.

    ``positive_label`` names the protected value mapped to 1; when omitted
    the lexicographically larger of the two observed values is used.
    Columns in ``numeric_columns`` must parse as floats in every row
    (otherwise column types are inferred: numeric iff all values parse).
    """

    path: str | Path
    protected_column: str
    positive_label: str | None = None
    drop_columns: tuple[str, ...] = ()
    scale: str = "minmax"
    delimiter: str = ","
    numeric_columns: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.scale not in ("minmax", "none"):
            raise ContractViolationError(
                f"scale must be 'minmax' or 'none', got {self.scale!r}"
            )
        object.__setattr__(self, "drop_columns", tuple(self.drop_columns))
        object.__setattr__(self, "numeric_columns", tuple(self.numeric_columns))


def _parse_float(cell: str) -> float | None:
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(spec: DatasetSpec) -> Dataset:
    """Load, encode and scale a CSV file per ``spec``.

    Feature columns keep the header order, with each categorical column
    expanded in place into its sorted one-hot levels. The protected column
    never enters the feature matrix.
    """
    path = Path(spec.path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh, delimiter=spec.delimiter))
    rows = [r for r in rows if r]  # tolerate trailing blank lines
    if not rows:
        raise EmptyFileError(f"{path}: file is empty")
    header = [h.strip() for h in rows[0]]
    data_rows = rows[1:]
    if not data_rows:
        raise EmptyFileError(f"{path}: header only, no data rows")

    def col_index(name: str) -> int:
        if name not in header:
            raise MissingColumnError(
                f"{path}: column {name!r} not in header {header}"
            )
        return header.index(name)

    protected_idx = col_index(spec.protected_column)
    for name in spec.drop_columns:
        col_index(name)
    for name in spec.numeric_columns:
        col_index(name)
    dropped = {col_index(n) for n in spec.drop_columns} | {protected_idx}

    cleaned: list[list[str]] = []
    for lineno, row in enumerate(data_rows, start=2):
        if len(row) != len(header):
            raise CellParseError(
                f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}"
            )
        cells = [c.strip() for c in row]
        for j, cell in enumerate(cells):
            if cell == "":
                raise MissingValueError(
                    f"{path}:{lineno}: empty cell in column {header[j]!r}"
                )
        cleaned.append(cells)

    protected_values = [r[protected_idx] for r in cleaned]
    levels = sorted(set(protected_values))
    if len(levels) != 2:
        raise ProtectedLevelsError(
            f"{path}: protected column {spec.protected_column!r} has "
            f"{len(levels)} distinct values {levels[:6]}, expected exactly 2"
        )
    positive = spec.positive_label if spec.positive_label is not None else levels[1]
    if positive not in levels:
        raise ProtectedLevelsError(
            f"{path}: positive label {positive!r} not among observed values {levels}"
        )
    protected = np.array([1 if v == positive else 0 for v in protected_values])

    feature_cols: list[np.ndarray] = []
    forced_numeric = set(spec.numeric_columns)
    for j, name in enumerate(header):
        if j in dropped:
            continue
        raw = [r[j] for r in cleaned]
        parsed = [_parse_float(c) for c in raw]
        if name in forced_numeric:
            for lineno, value in enumerate(parsed, start=2):
                if value is None:
                    raise CellParseError(
                        f"{path}:{lineno}: column {name!r} is numeric but cell "
                        f"{raw[lineno - 2]!r} does not parse"
                    )
        if all(v is not None for v in parsed):
            col = np.array(parsed, dtype=np.float64)
            if spec.scale == "minmax":
                lo, hi = col.min(), col.max()
                col = (col - lo) / (hi - lo) if hi > lo else np.zeros_like(col)
            feature_cols.append(col)
        else:
            for level in sorted(set(raw)):
                feature_cols.append(
                    np.array([1.0 if c == level else 0.0 for c in raw])
                )

    features = np.column_stack(feature_cols)
    row_ids = tuple(str(i) for i in range(len(cleaned)))
    return Dataset(features=features, protected=protected, row_ids=row_ids)


def dataset_balance(data: Dataset) -> BalanceRatio:
    """Balance of the whole dataset; errors if a protected group is absent."""
    zeros, ones = data.group_counts()
    if zeros == 0 or ones == 0:
        raise InfeasibilityError(
            "a protected group is absent; no fairlet decomposition exists for t > 0"
        )
    return balance_of(zeros, ones)
