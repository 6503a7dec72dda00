"""Deterministic dendritic-cell engine.

A fixed population of cells accumulates fused signal values; each cell
carries a migration threshold proportional to its index, so the population
integrates the signal history over a spread of time scales.  Antigen copies
(one type per second) are dealt round-robin across the population, and when
a cell's csm accumulator reaches its threshold the cell presents its stored
antigens tagged with its accumulated context value k.  Per-type K scores
summarise those presentations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError
from .signals import CATEGORIES, DEFAULT_WEIGHTS, AntigenStream, SignalStream, WeightTable

DEFAULT_POPULATION = 100
DELTA_SPREAD = 3.0  # default thresholds span [delta, 3 * max single-step csm]


def transform_signals(weights: WeightTable, pamp: float, danger: float, safe: float) -> tuple[float, float]:
    """Fuse one second's category values into (csm, k) via the weight table."""
    for name, value in zip(CATEGORIES, (pamp, danger, safe)):
        if not 0.0 <= value <= 1.0:
            raise DataError(f"{name} value must be in [0, 1], got {value}")
    csm = weights.csm["PAMP"] * pamp + weights.csm["Danger"] * danger + weights.csm["Safe"] * safe
    k = weights.k["PAMP"] * pamp + weights.k["Danger"] * danger + weights.k["Safe"] * safe
    return csm, k


def default_delta(n_cells: int, weights: WeightTable = DEFAULT_WEIGHTS) -> float:
    """Threshold step so most cells need several seconds of signal to migrate.

    The largest threshold is DELTA_SPREAD times the maximum single-second
    csm, so roughly two thirds of the population cannot migrate on one
    second's evidence alone.
    """
    csm_max = sum(abs(w) for w in weights.csm.values())
    if csm_max <= 0.0:
        raise ConfigError("csm weights sum to zero; no default threshold step exists")
    return DELTA_SPREAD * csm_max / n_cells


@dataclass
class DendriticCell:
    """One cell: a fixed migration threshold plus mutable accumulators."""

    index: int  # 1-based
    migration_threshold: float
    csm_acc: float = 0.0
    k_acc: float = 0.0
    antigen_store: dict[int, int] = field(default_factory=dict)

    def reset(self) -> None:
        self.csm_acc = 0.0
        self.k_acc = 0.0
        self.antigen_store = {}


@dataclass(frozen=True)
class Presentation:
    """One migration event: the cell's context k and the antigens it held."""

    k: float
    counts: dict[int, int]


@dataclass(frozen=True)
class KAlphaSeries:
    """Per-antigen-type anomaly scores, ordered by type id.

    ``counts[i]`` is the total number of presented copies of type
    ``type_ids[i]``; after a flushed run it equals the generated
    multiplicity for that type.
    """

    type_ids: np.ndarray  # int, strictly increasing
    values: np.ndarray  # float, signed
    counts: np.ndarray  # int, all >= 1

    def __len__(self) -> int:
        return len(self.type_ids)

    def slice_types(self, start: int, stop: int) -> np.ndarray:
        """K values for type ids in the half-open range [start, stop)."""
        mask = (self.type_ids >= start) & (self.type_ids < stop)
        return self.values[mask]


class Engine:
    """Mutable single-threaded cell population; step one second at a time."""

    def __init__(
        self,
        n_cells: int = DEFAULT_POPULATION,
        delta: float | None = None,
        weights: WeightTable = DEFAULT_WEIGHTS,
    ) -> None:
        if n_cells < 1:
            raise ConfigError(f"population must be >= 1, got {n_cells}")
        if delta is None:
            delta = default_delta(n_cells, weights)
        if delta <= 0.0:
            raise ConfigError(f"threshold step must be > 0, got {delta}")
        self.weights = weights
        self.delta = delta
        self.cells = [
            DendriticCell(index=i, migration_threshold=i * delta)
            for i in range(1, n_cells + 1)
        ]
        self.cursor = 0  # position of the next cell to receive an antigen
        self.presentations: list[Presentation] = []

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def step(self, signals: tuple[float, float, float], antigen: tuple[int, int]) -> None:
        """Advance one second: distribute antigen, accumulate, migrate.

        ``antigen`` is (type id, multiplicity).  Distribution happens before
        accumulation so a cell can present antigens received in the same
        second it migrates.
        """
        type_id, multiplicity = antigen
        if multiplicity < 1:
            raise DataError(f"antigen multiplicity must be >= 1, got {multiplicity}")
        for _ in range(multiplicity):
            store = self.cells[self.cursor].antigen_store
            store[type_id] = store.get(type_id, 0) + 1
            self.cursor = (self.cursor + 1) % self.n_cells

        csm, k = transform_signals(self.weights, *signals)
        for cell in self.cells:
            cell.csm_acc += csm
            cell.k_acc += k
            if cell.csm_acc >= cell.migration_threshold:
                if cell.antigen_store:
                    self.presentations.append(
                        Presentation(k=cell.k_acc, counts=cell.antigen_store)
                    )
                cell.reset()

    def flush(self) -> None:
        """Present every non-empty store so no generated antigen is lost."""
        for cell in self.cells:
            if cell.antigen_store:
                self.presentations.append(
                    Presentation(k=cell.k_acc, counts=cell.antigen_store)
                )
                cell.reset()


def k_alpha(log: list[Presentation]) -> KAlphaSeries:
    """Count-weighted mean context per antigen type.

    Every presented copy of type α inherits the presenting cell's k; K_α is
    the mean over all copies: (Σ_m k_m · c_mα) / (Σ_m c_mα).
    """
    k_totals: dict[int, float] = {}
    count_totals: dict[int, int] = {}
    for presentation in log:
        for type_id, count in presentation.counts.items():
            k_totals[type_id] = k_totals.get(type_id, 0.0) + presentation.k * count
            count_totals[type_id] = count_totals.get(type_id, 0) + count
    type_ids = np.array(sorted(count_totals), dtype=int)
    values = np.array([k_totals[t] / count_totals[t] for t in type_ids])
    counts = np.array([count_totals[t] for t in type_ids], dtype=int)
    return KAlphaSeries(type_ids=type_ids, values=values, counts=counts)


def run(
    signals: SignalStream,
    antigens: AntigenStream,
    n_cells: int = DEFAULT_POPULATION,
    delta: float | None = None,
    weights: WeightTable = DEFAULT_WEIGHTS,
) -> KAlphaSeries:
    """Feed the streams through a fresh population and score every type.

    Deterministic: identical inputs give identical output, bit for bit.
    """
    if signals.n_seconds != antigens.n_seconds:
        raise DataError(
            f"stream length mismatch: {signals.n_seconds} signal seconds vs "
            f"{antigens.n_seconds} antigen seconds"
        )
    if signals.n_seconds < 1:
        raise DataError("streams must cover at least one second")
    engine = Engine(n_cells=n_cells, delta=delta, weights=weights)
    for t in range(signals.n_seconds):
        pamp, danger, safe = signals.values[t]
        engine.step(
            (float(pamp), float(danger), float(safe)),
            (int(antigens.type_ids[t]), int(antigens.multiplicities[t])),
        )
    engine.flush()
    return k_alpha(engine.presentations)
