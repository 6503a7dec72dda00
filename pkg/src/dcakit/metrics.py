"""Segment classification and ROC analysis over per-second K scores.

A labelled segment is called anomalous when the evidence above the threshold
outweighs the evidence below it (equivalently: when its mean K reaches the
threshold).  Sweeping the threshold yields TP/FP rate pairs and an ROC curve
with trapezoidal AUC.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dca import KAlphaSeries
from .errors import DataError
from .ingest import LABEL_ANOMALOUS, LABEL_NORMAL, SegmentMap

DEFAULT_GRID_SIZE = 41


@dataclass(frozen=True)
class SegmentPrediction:
    """One segment's verdict at a given threshold."""

    segment: int
    start: int
    end: int
    true_label: str
    L: float
    predicted_label: str


@dataclass(frozen=True)
class RocPoint:
    threshold: float
    tp_rate: float
    fp_rate: float


@dataclass(frozen=True)
class ThresholdResult:
    """All segment verdicts and the resulting rates for one threshold."""

    threshold: float
    tp_rate: float
    fp_rate: float
    predictions: tuple[SegmentPrediction, ...]


@dataclass(frozen=True)
class RocCurve:
    """ROC points (anchors included, deduplicated, sorted) plus AUC.

    ``results`` keeps the full per-threshold detail in ascending threshold
    order; ``points`` is the curve itself, sorted by (fp_rate, tp_rate).
    """

    points: tuple[RocPoint, ...]
    auc: float
    results: tuple[ThresholdResult, ...]


def classify_segment(ks, threshold: float) -> tuple[float, str]:
    """Balance of evidence for one segment: L and its label.

    L sums the exceedances of the threshold and subtracts the shortfalls:
    L = sum_{K >= Th}(K - Th) - sum_{K < Th}(Th - K).  The segment is
    anomalous iff L >= 0, which algebraically is mean(ks) >= Th; both
    readings are computed and must agree.
    """
    ks = np.asarray(ks, dtype=float)
    if ks.size == 0:
        raise DataError("cannot classify an empty segment")
    deviations = [float(k) - threshold for k in ks]
    above = math.fsum(d for d in deviations if d >= 0.0)
    below = math.fsum(-d for d in deviations if d < 0.0)
    L = above - below
    label = LABEL_ANOMALOUS if L >= 0.0 else LABEL_NORMAL
    mean_label = (
        LABEL_ANOMALOUS if math.fsum(deviations) >= 0.0 else LABEL_NORMAL
    )
    assert label == mean_label, (
        f"evidence-balance and mean-threshold readings disagree: "
        f"L={L!r} vs sum(K - Th)={math.fsum(deviations)!r}"
    )
    return L, label


def predict_segments(
    series: KAlphaSeries, segment_map: SegmentMap, threshold: float
) -> tuple[SegmentPrediction, ...]:
    """Classify every labelled segment of the series at one threshold."""
    if segment_map.labels is None:
        raise DataError("segment map carries no true labels")
    predictions = []
    for index, (start, end) in enumerate(segment_map.segments()):
        ks = series.slice_types(start, end)
        if ks.size == 0:
            raise DataError(f"segment {index} [{start}, {end}) holds no K values")
        L, predicted = classify_segment(ks, threshold)
        predictions.append(
            SegmentPrediction(
                segment=index,
                start=start,
                end=end,
                true_label=segment_map.labels[index],
                L=L,
                predicted_label=predicted,
            )
        )
    return tuple(predictions)


def confusion_rates(predictions) -> tuple[float, float]:
    """(tp_rate, fp_rate) over segment predictions.

    Requires at least one true-anomalous and one true-normal segment,
    otherwise a rate would be 0/0.
    """
    n_anomalous = sum(1 for p in predictions if p.true_label == LABEL_ANOMALOUS)
    n_normal = sum(1 for p in predictions if p.true_label == LABEL_NORMAL)
    if n_anomalous == 0 or n_normal == 0:
        raise DataError(
            f"rates need both classes present, got {n_anomalous} anomalous "
            f"and {n_normal} normal segments"
        )
    tp = sum(
        1
        for p in predictions
        if p.true_label == LABEL_ANOMALOUS and p.predicted_label == LABEL_ANOMALOUS
    )
    fp = sum(
        1
        for p in predictions
        if p.true_label == LABEL_NORMAL and p.predicted_label == LABEL_ANOMALOUS
    )
    return tp / n_anomalous, fp / n_normal


def default_threshold_grid(series: KAlphaSeries, size: int = DEFAULT_GRID_SIZE) -> list[float]:
    """Evenly spaced thresholds spanning the observed K range."""
    if len(series) == 0:
        raise DataError("cannot build a threshold grid from an empty series")
    if size < 1:
        raise DataError(f"grid size must be >= 1, got {size}")
    low = float(series.values.min())
    high = float(series.values.max())
    return [float(t) for t in np.linspace(low, high, size)]


def roc_curve(series: KAlphaSeries, segment_map: SegmentMap, thresholds) -> RocCurve:
    """Sweep thresholds, collect rate pairs, and integrate the ROC curve.

    The anchor points (0,0) and (1,1) are always part of the curve (carrying
    +inf / -inf thresholds); duplicate (fp, tp) pairs collapse to one point
    before the trapezoidal AUC.
    """
    thresholds = sorted(float(t) for t in thresholds)
    if not thresholds:
        raise DataError("threshold list must be non-empty")

    results = []
    for th in thresholds:
        predictions = predict_segments(series, segment_map, th)
        tp_rate, fp_rate = confusion_rates(predictions)
        results.append(
            ThresholdResult(
                threshold=th,
                tp_rate=tp_rate,
                fp_rate=fp_rate,
                predictions=predictions,
            )
        )

    candidates = [
        RocPoint(threshold=math.inf, tp_rate=0.0, fp_rate=0.0),
        RocPoint(threshold=-math.inf, tp_rate=1.0, fp_rate=1.0),
    ] + [RocPoint(r.threshold, r.tp_rate, r.fp_rate) for r in results]
    candidates.sort(key=lambda p: (p.fp_rate, p.tp_rate, -p.threshold))
    points = tuple(
        next(group)
        for _, group in itertools.groupby(
            candidates, key=lambda p: (p.fp_rate, p.tp_rate)
        )
    )

    auc = math.fsum(
        (b.fp_rate - a.fp_rate) * (a.tp_rate + b.tp_rate) / 2.0
        for a, b in zip(points, points[1:])
    )
    return RocCurve(points=points, auc=auc, results=tuple(results))
