"""Mapping ranked attributes onto the detector's input channels.

The detector consumes three signal categories plus an antigen stream.  The
top-ranked attribute becomes the antigen source; the rest are dealt across
the categories in order of how strongly each category's weights pull on the
fused signals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_unit_interval
from .errors import ConfigError, DataError
from .preprocessing import NormalisedTable

CATEGORIES = ("PAMP", "Danger", "Safe")

DEFAULT_F_MIN = 15
DEFAULT_F_MAX = 100


@dataclass(frozen=True)
class WeightTable:
    """Per-category weights for the two accumulators.

    ``csm`` drives migration and must be non-negative so the migration
    clock only moves forward; ``k`` sets each category's pull on the
    anomaly verdict (Safe is conventionally negative).  Each row needs at
    least one nonzero weight.
    """

    csm: dict[str, float] = field(
        default_factory=lambda: {"PAMP": 2.0, "Danger": 1.0, "Safe": 2.0}
    )
    k: dict[str, float] = field(
        default_factory=lambda: {"PAMP": 2.0, "Danger": 1.0, "Safe": -3.0}
    )

    def __post_init__(self) -> None:
        for name, row in (("csm", self.csm), ("k", self.k)):
            if set(row) != set(CATEGORIES):
                raise ConfigError(
                    f"{name} weights must cover exactly {CATEGORIES}, "
                    f"got {sorted(row)}"
                )
            if all(w == 0.0 for w in row.values()):
                raise ConfigError(f"{name} weights are all zero")
        for category, w in self.csm.items():
            if w < 0.0:
                raise ConfigError(
                    f"csm weight for {category} must be >= 0, got {w}"
                )

    def csm_vector(self) -> np.ndarray:
        return np.array([self.csm[c] for c in CATEGORIES])

    def k_vector(self) -> np.ndarray:
        return np.array([self.k[c] for c in CATEGORIES])

    def magnitude(self, category: str) -> float:
        return abs(self.csm[category]) + abs(self.k[category])


DEFAULT_WEIGHTS = WeightTable()


@dataclass(frozen=True)
class CategoryRanking:
    """Signal categories ordered by total weight magnitude, strongest first."""

    order: tuple[str, ...]
    magnitudes: tuple[float, ...]


def category_ranking(weights: WeightTable = DEFAULT_WEIGHTS) -> CategoryRanking:
    """Order categories by |csm weight| + |k weight|, descending.

    Ties keep the conventional column order PAMP, Danger, Safe.
    """
    order = sorted(
        CATEGORIES,
        key=lambda c: (-weights.magnitude(c), CATEGORIES.index(c)),
    )
    return CategoryRanking(
        order=tuple(order),
        magnitudes=tuple(weights.magnitude(c) for c in order),
    )


@dataclass(frozen=True)
class SignalAssignment:
    """Which attribute feeds the antigen stream and each signal category.

    ``categories`` maps category name to the attributes fused into it;
    ``inverted`` holds the attributes whose values are complemented (1 - v)
    before fusion — the Safe-mapped ones under automatic assignment.
    """

    antigen: str
    categories: dict[str, tuple[str, ...]]
    inverted: frozenset[str]

    def attributes_for(self, category: str) -> tuple[str, ...]:
        return self.categories[category]


def assign_categories(
    ranking_order,
    weights: WeightTable = DEFAULT_WEIGHTS,
) -> SignalAssignment:
    """Deal ranked attributes onto the antigen stream and signal categories.

    The top attribute becomes the antigen.  The remaining m attributes go,
    in rank order, to the categories in weight-magnitude order as three
    contiguous groups of floor(m/3), with all surplus attributes joining
    the middle group — so m = 4 splits 1/2/1.  Attributes landing in Safe
    are marked for inversion.
    """
    ranking_order = list(ranking_order)
    if len(ranking_order) < 4:
        raise DataError(
            f"need >= 4 ranked attributes (1 antigen + 3 categories), "
            f"got {len(ranking_order)}"
        )
    antigen, rest = ranking_order[0], ranking_order[1:]
    order = category_ranking(weights).order
    base, surplus = divmod(len(rest), len(order))
    sizes = [base, base + surplus, base]
    categories: dict[str, tuple[str, ...]] = {}
    cursor = 0
    for category, size in zip(order, sizes):
        categories[category] = tuple(rest[cursor : cursor + size])
        cursor += size
    return SignalAssignment(
        antigen=antigen,
        categories=categories,
        inverted=frozenset(categories["Safe"]),
    )


def antigen_frequency(
    value: float, f_min: int = DEFAULT_F_MIN, f_max: int = DEFAULT_F_MAX
) -> int:
    """Antigen copies for one second: F_min + (F_max - F_min) * value.

    ``value`` is the normalised antigen-attribute reading; the count is
    rounded half-up, so it spans exactly [F_min, F_max].
    """
    if not 0.0 <= value <= 1.0:
        raise DataError(f"antigen value must be in [0, 1], got {value}")
    if not f_min < f_max:
        raise ConfigError(f"need f_min < f_max, got {f_min}, {f_max}")
    if f_min < 1:
        raise ConfigError(f"f_min must be >= 1, got {f_min}")
    return int(np.floor(f_min + (f_max - f_min) * value + 0.5))


@dataclass(frozen=True)
class SignalStream:
    """Per-second PAMP/Danger/Safe values, inversion already applied."""

    values: np.ndarray  # shape (n_seconds, 3), column order CATEGORIES

    @property
    def n_seconds(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class AntigenStream:
    """Per-second antigen type ids and how many copies of each to inject."""

    type_ids: np.ndarray  # shape (n_seconds,), int; the second index
    multiplicities: np.ndarray  # shape (n_seconds,), int >= 1

    @property
    def n_seconds(self) -> int:
        return len(self.type_ids)


def build_streams(
    table: NormalisedTable,
    assignment: SignalAssignment,
    f_min: int = DEFAULT_F_MIN,
    f_max: int = DEFAULT_F_MAX,
) -> tuple[SignalStream, AntigenStream]:
    """Fuse assigned attributes into per-second signal and antigen streams.

    Each category value is the arithmetic mean over its attribute list,
    complementing inverted attributes (1 - v) first.  Each second t becomes
    antigen type t with multiplicity from its antigen reading.
    """
    missing = [
        name
        for names in assignment.categories.values()
        for name in names
        if name not in table.columns
    ]
    if assignment.antigen not in table.columns:
        missing.append(assignment.antigen)
    if missing:
        raise DataError(f"assigned attribute(s) not in table: {', '.join(missing)}")

    columns: list[np.ndarray] = []
    for cat in CATEGORIES:
        names = assignment.categories[cat]
        if not names:
            raise DataError(f"category {cat} has no attributes assigned")
        members = [
            1.0 - table.columns[n] if n in assignment.inverted else table.columns[n]
            for n in names
        ]
        fused = np.mean(members, axis=0)
        check_unit_interval(fused, f"{cat} signal")
        columns.append(fused)
    values = np.column_stack(columns)

    antigen_values = table.columns[assignment.antigen]
    multiplicities = np.array(
        [antigen_frequency(v, f_min, f_max) for v in antigen_values], dtype=int
    )
    type_ids = np.arange(len(antigen_values), dtype=int)
    return (
        SignalStream(values=values),
        AntigenStream(type_ids=type_ids, multiplicities=multiplicities),
    )
