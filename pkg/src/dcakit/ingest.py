"""Loading, resampling, descriptive statistics and timeline segmentation.

Raw recordings arrive as a CSV with one time column (milliseconds since the
start of the record) and any number of numeric attribute columns.  They are
reduced to a 1 Hz table by averaging all samples that fall within each whole
second, and the timeline is later cut into labelled segments at the peaks of
a marker attribute.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    DetectionError,
    InsufficientDataError,
    ParseError,
    SchemaError,
)

LABEL_ANOMALOUS = "anomalous"
LABEL_NORMAL = "normal"
VALID_LABELS = (LABEL_ANOMALOUS, LABEL_NORMAL)


@dataclass(frozen=True)
class RawTable:
    """Multivariate series keyed by millisecond timestamps."""

    timestamps: np.ndarray
    columns: dict[str, np.ndarray]

    def __post_init__(self):
        n = len(self.timestamps)
        if n < 1:
            raise SchemaError("table has no rows")
        for name, col in self.columns.items():
            if len(col) != n:
                raise SchemaError(
                    f"column {name!r} has {len(col)} rows, expected {n}"
                )
        if np.any(np.diff(self.timestamps) < 0):
            raise SchemaError("timestamps must be non-decreasing")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    @property
    def n_rows(self) -> int:
        return len(self.timestamps)

    def drop(self, names) -> "RawTable":
        """Copy of the table without the given columns."""
        gone = set(names)
        missing = gone - set(self.columns)
        if missing:
            raise DataError(f"unknown column(s): {', '.join(sorted(missing))}")
        kept = {k: v for k, v in self.columns.items() if k not in gone}
        if not kept:
            raise DataError("cannot drop every attribute column")
        return RawTable(self.timestamps, kept)


@dataclass(frozen=True)
class ResampledTable:
    """1 Hz table; row i holds the averages for second i."""

    columns: dict[str, np.ndarray]

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise SchemaError("resampled columns have unequal lengths")
        if not lengths or 0 in lengths:
            raise SchemaError("resampled table has no rows")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.columns)

    @property
    def n_seconds(self) -> int:
        return len(next(iter(self.columns.values())))

    @property
    def seconds(self) -> np.ndarray:
        return np.arange(self.n_seconds)


@dataclass(frozen=True)
class AttributeStats:
    name: str
    min: float
    max: float
    median: float
    mean: float
    stdev: float


@dataclass(frozen=True)
class SegmentMap:
    """Contiguous segmentation of [0, n_seconds) with optional labels.

    ``boundaries[i]`` is the first second of segment i+1; segment 0 starts
    at second 0.
    """

    boundaries: tuple[int, ...]
    n_seconds: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        bounds = self.boundaries
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise DataError("segment boundaries must be strictly increasing")
        if bounds and (bounds[0] < 1 or bounds[-1] > self.n_seconds - 1):
            raise DataError(
                f"boundaries must fall inside (0, {self.n_seconds}), got {bounds}"
            )
        if self.labels is not None:
            if len(self.labels) != len(bounds) + 1:
                raise DataError(
                    f"{len(bounds) + 1} segments need {len(bounds) + 1} labels, "
                    f"got {len(self.labels)}"
                )
            bad = [l for l in self.labels if l not in VALID_LABELS]
            if bad:
                raise DataError(f"unknown segment label(s): {bad}")

    @property
    def n_segments(self) -> int:
        return len(self.boundaries) + 1

    def segments(self) -> list[tuple[int, int]]:
        """Half-open [start, stop) second ranges tiling the timeline."""
        edges = (0, *self.boundaries, self.n_seconds)
        return list(zip(edges, edges[1:]))


def load_csv(path, time_col: str = "time") -> RawTable:
    """Parse a CSV recording into a RawTable.

    The first row must be a header of unique names containing ``time_col``;
    every other cell must be numeric.  Line numbers in errors are 1-based
    (the header is line 1).
    """
    path = Path(path)
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise SchemaError(f"{path}: duplicate header name(s): {', '.join(dupes)}")
        if time_col not in header:
            raise SchemaError(f"{path}: no {time_col!r} column in header {header}")

        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(
                    f"{path}: line {lineno}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise ParseError(
                    f"{path}: line {lineno}: non-numeric cell in row {row}"
                ) from None

    if not rows:
        raise SchemaError(f"{path}: no data rows")

    data = np.asarray(rows, dtype=float)
    t_idx = header.index(time_col)
    timestamps = data[:, t_idx]
    if np.any(np.diff(timestamps) < 0):
        raise SchemaError(f"{path}: {time_col!r} column must be non-decreasing")
    columns = {
        name: data[:, i] for i, name in enumerate(header) if i != t_idx
    }
    return RawTable(timestamps=timestamps, columns=columns)


def resample_average(raw: RawTable) -> ResampledTable:
    """Average every column within each whole second.

    A sample at t ms belongs to second floor(t / 1000).  Seconds containing
    no samples are dropped and the remaining rows re-indexed contiguously.
    """
    secs = np.floor(raw.timestamps / 1000.0).astype(np.int64)
    _, inverse, counts = np.unique(secs, return_inverse=True, return_counts=True)
    columns = {
        name: np.bincount(inverse, weights=col) / counts
        for name, col in raw.columns.items()
    }
    return ResampledTable(columns=columns)


def describe(table, column: str) -> AttributeStats:
    """Min/max/median/mean and sample standard deviation of one column.

    The median of an even-length column is the mean of the two central
    order statistics; the standard deviation uses the n-1 denominator.
    """
    if column not in table.columns:
        raise DataError(f"unknown column: {column!r}")
    values = table.columns[column]
    if len(values) < 2:
        raise InsufficientDataError(
            f"column {column!r} needs at least 2 values, got {len(values)}"
        )
    return AttributeStats(
        name=column,
        min=float(values.min()),
        max=float(values.max()),
        median=float(np.median(values)),
        mean=float(values.mean()),
        stdev=float(values.std(ddof=1)),
    )


def detect_segments(marker, n_segments: int) -> SegmentMap:
    """Cut the timeline at the highest strict local maxima of ``marker``.

    Peaks are accepted tallest-first (ties to the earlier index) and must be
    at least len(marker) / (2 * n_segments) indices apart; exactly
    n_segments - 1 boundaries are required.
    """
    marker = np.asarray(marker, dtype=float)
    if n_segments < 2:
        raise DataError(f"n_segments must be >= 2, got {n_segments}")
    if len(marker) < n_segments:
        raise DataError(
            f"marker length {len(marker)} is shorter than {n_segments} segments"
        )

    inner = marker[1:-1]
    is_peak = (inner > marker[:-2]) & (inner > marker[2:])
    candidates = np.flatnonzero(is_peak) + 1

    needed = n_segments - 1
    min_sep = len(marker) / (2.0 * n_segments)
    # Tallest first; equal heights fall back to the earlier index.
    order = sorted(candidates, key=lambda i: (-marker[i], i))
    chosen: list[int] = []
    for idx in order:
        if len(chosen) == needed:
            break
        if all(abs(idx - c) >= min_sep for c in chosen):
            chosen.append(int(idx))
    if len(chosen) < needed:
        raise DetectionError(
            f"found {len(chosen)} usable peak(s), need {needed} for "
            f"{n_segments} segments"
        )
    return SegmentMap(boundaries=tuple(sorted(chosen)), n_seconds=len(marker))


def apply_labels(segment_map: SegmentMap, pattern) -> SegmentMap:
    """Attach one label per segment; lengths must match."""
    pattern = tuple(pattern)
    if len(pattern) != segment_map.n_segments:
        raise DataError(
            f"{segment_map.n_segments} segments but {len(pattern)} labels"
        )
    return SegmentMap(
        boundaries=segment_map.boundaries,
        n_seconds=segment_map.n_seconds,
        labels=pattern,
    )
