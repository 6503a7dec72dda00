"""Min-Max scaling onto [0,1], safe-signal inversion and column merging."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_float_vector, check_equal_length, check_unit_interval
from .errors import DataError, DegenerateColumnError
from .ingest import ResampledTable


@dataclass(frozen=True)
class NormalisedTable:
    """1 Hz table with every column scaled onto [0,1].

    ``ranges`` records the (min, max) each column was scaled from, so values
    can be mapped back and audits can show original units.
    """

    columns: dict[str, np.ndarray]
    ranges: dict[str, tuple[float, float]]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    @property
    def n_seconds(self) -> int:
        return len(next(iter(self.columns.values())))


def min_max_normalise(column) -> np.ndarray:
    """Affine map of a column onto [0,1] via its observed min and max."""
    column = as_float_vector(column, "column")
    if len(column) < 2:
        raise DegenerateColumnError("need at least 2 values to normalise")
    lo, hi = column.min(), column.max()
    if hi <= lo:
        raise DegenerateColumnError(
            f"constant column (min == max == {lo:g}) carries no information"
        )
    return (column - lo) / (hi - lo)


def invert(column) -> np.ndarray:
    """Complement of a normalised column: v -> 1 - v."""
    column = as_float_vector(column, "column")
    check_unit_interval(column, "column")
    return 1.0 - column


def merge_columns(a, b) -> np.ndarray:
    """Element-wise mean of two equal-length columns."""
    a = as_float_vector(a, "a")
    b = as_float_vector(b, "b")
    check_equal_length(a, b)
    return (a + b) / 2.0


def normalise_table(table: ResampledTable) -> NormalisedTable:
    """Min-Max normalise every column of a resampled table."""
    columns: dict[str, np.ndarray] = {}
    ranges: dict[str, tuple[float, float]] = {}
    for name, col in table.columns.items():
        try:
            columns[name] = min_max_normalise(col)
        except DegenerateColumnError as exc:
            raise DegenerateColumnError(f"column {name!r}: {exc}") from None
        ranges[name] = (float(col.min()), float(col.max()))
    return NormalisedTable(columns=columns, ranges=ranges)


def merge_normalised(
    table: NormalisedTable, a: str, b: str, new_name: str
) -> NormalisedTable:
    """Replace columns ``a`` and ``b`` with their renormalised mean.

    The mean of two [0,1] columns need not reach 0 or 1, so the merged
    column is Min-Max normalised again to keep signal strengths comparable.
    The merged column takes the position of whichever input came first.
    """
    for name in (a, b):
        if name not in table.columns:
            raise DataError(f"unknown column: {name!r}")
    merged = merge_columns(table.columns[a], table.columns[b])
    lo, hi = float(merged.min()), float(merged.max())
    if hi <= lo:
        raise DegenerateColumnError(
            f"merging {a!r} and {b!r} produced a constant column"
        )
    renormalised = (merged - lo) / (hi - lo)

    columns: dict[str, np.ndarray] = {}
    ranges: dict[str, tuple[float, float]] = {}
    for name in table.columns:
        if name == a or name == b:
            if new_name not in columns:
                columns[new_name] = renormalised
                ranges[new_name] = (lo, hi)
            continue
        columns[name] = table.columns[name]
        ranges[name] = table.ranges[name]
    return NormalisedTable(columns=columns, ranges=ranges)
