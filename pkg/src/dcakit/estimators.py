"""Scikit-learn style estimators wrapping the detection pipeline.

Three composable transformers cover the array-based API:

- MinMaxNormaliser: scale features onto [0,1];
- SignalCategoriser: learn the attribute-to-channel mapping from the
  training data's principal components and emit per-second
  (PAMP, Danger, Safe, multiplicity) columns;
- DendriticCellScorer: turn those columns into one anomaly score per second.

They chain naturally in a sklearn Pipeline; each also works standalone.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import dca, pca, signals
from ._validation import feature_names_of
from .errors import DegenerateColumnError
from .pipeline import apply_merges
from .preprocessing import NormalisedTable

OUTPUT_CHANNELS = ("PAMP", "Danger", "Safe", "antigen_multiplicity")


def _require_unit_interval(X: np.ndarray, what: str) -> None:
    if X.size and (X.min() < 0.0 or X.max() > 1.0):
        raise ValueError(
            f"{what} must lie in [0, 1]; normalise first "
            f"(observed range [{X.min():g}, {X.max():g}])"
        )


class MinMaxNormaliser(TransformerMixin, BaseEstimator):
    """Scale every feature onto [0,1] using its training minimum and maximum.

    With ``clip=True`` (the default) transformed values of unseen data are
    clipped into [0,1], which downstream detector stages require.  A feature
    that is constant during fit raises, since it carries no information to
    scale.
    """

    def __init__(self, clip: bool = True):
        self.clip = clip

    def fit(self, X, y=None):
        X = check_array(X, dtype=float, ensure_min_samples=2)
        data_min = X.min(axis=0)
        data_max = X.max(axis=0)
        flat = np.flatnonzero(data_max <= data_min)
        if flat.size:
            raise DegenerateColumnError(
                f"constant feature(s) at index {', '.join(map(str, flat))} "
                f"cannot be normalised"
            )
        self.data_min_ = data_min
        self.data_max_ = data_max
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "data_min_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        scaled = (X - self.data_min_) / (self.data_max_ - self.data_min_)
        if self.clip:
            scaled = np.clip(scaled, 0.0, 1.0)
        return scaled

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "data_min_")
        if input_features is not None:
            return np.asarray(input_features, dtype=object)
        return np.asarray(
            [f"x{i}" for i in range(self.n_features_in_)], dtype=object
        )


class SignalCategoriser(TransformerMixin, BaseEstimator):
    """Learn which feature feeds which detector channel, then fuse them.

    fit() ranks the [0,1] features by the variance they carry in the
    leading principal subspace, merges near-duplicate features (parallel
    biplot arrows), and maps the top feature to the antigen stream and the
    rest onto PAMP/Danger/Safe.  transform() emits one row per sample:
    (PAMP, Danger, Safe, antigen multiplicity).
    """

    def __init__(
        self,
        merge_threshold: float = 0.95,
        score_mode: str = "subspace",
        weights: signals.WeightTable | None = None,
        f_min: int = signals.DEFAULT_F_MIN,
        f_max: int = signals.DEFAULT_F_MAX,
        merge_p_mode: str = "off",
        merge_p_level: float = 0.05,
    ):
        self.merge_threshold = merge_threshold
        self.score_mode = score_mode
        self.weights = weights
        self.f_min = f_min
        self.f_max = f_max
        self.merge_p_mode = merge_p_mode
        self.merge_p_level = merge_p_level

    def _effective_weights(self) -> signals.WeightTable:
        return self.weights if self.weights is not None else signals.DEFAULT_WEIGHTS

    def fit(self, X, y=None):
        original = X
        X = check_array(X, dtype=float, ensure_min_samples=2)
        if X.shape[1] < 4:
            raise ValueError(
                f"need >= 4 features (1 antigen + 3 channels), got {X.shape[1]}"
            )
        names = feature_names_of(original, X.shape[1])
        _require_unit_interval(X, "features")

        table = NormalisedTable(
            columns={name: X[:, i].copy() for i, name in enumerate(names)},
            ranges={name: (0.0, 1.0) for name in names},
        )
        initial = pca.jacobi_eigen(pca.covariance(table, names), names)
        candidates = pca.find_merge_candidates(initial, table, self.merge_threshold)
        table, decisions = apply_merges(
            table, candidates, self.merge_p_mode, self.merge_p_level
        )
        attributes = table.names
        if any(d.applied for d in decisions):
            final = pca.jacobi_eigen(pca.covariance(table, attributes), attributes)
        else:
            final = initial
        ranking = pca.variability_scores(final, mode=self.score_mode)
        assignment = signals.assign_categories(
            ranking.attributes, self._effective_weights()
        )

        self.n_features_in_ = X.shape[1]
        self.attribute_names_ = tuple(names)
        self.eigenvalues_ = final.eigenvalues.copy()
        self.loadings_ = final.loadings.copy()
        self.merge_decisions_ = decisions
        self.merge_plan_ = tuple(
            (d.pair[0], d.pair[1], d.merged_name, *table.ranges[d.merged_name])
            for d in decisions
            if d.applied
        )
        self.ranking_ = ranking
        self.assignment_ = assignment
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "assignment_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, expected {self.n_features_in_}"
            )
        _require_unit_interval(X, "features")

        columns = {
            name: X[:, i].copy() for i, name in enumerate(self.attribute_names_)
        }
        for a, b, merged_name, lo, hi in self.merge_plan_:
            mean = (columns.pop(a) + columns.pop(b)) / 2.0
            columns[merged_name] = np.clip((mean - lo) / (hi - lo), 0.0, 1.0)

        assignment = self.assignment_
        outputs = []
        for category in signals.CATEGORIES:
            members = [
                1.0 - columns[n] if n in assignment.inverted else columns[n]
                for n in assignment.categories[category]
            ]
            outputs.append(np.mean(members, axis=0))
        multiplicity = np.array(
            [
                float(signals.antigen_frequency(v, self.f_min, self.f_max))
                for v in columns[assignment.antigen]
            ]
        )
        outputs.append(multiplicity)
        return np.column_stack(outputs)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "assignment_")
        return np.asarray(OUTPUT_CHANNELS, dtype=object)


class DendriticCellScorer(TransformerMixin, BaseEstimator):
    """Per-second anomaly scores from (PAMP, Danger, Safe, multiplicity) rows.

    Each row t becomes antigen type t; transform returns the per-type K
    score as a single column, and score_samples the same values as a 1-D
    array.  The detector is deterministic, so repeated calls agree exactly.
    """

    def __init__(
        self,
        n_cells: int = dca.DEFAULT_POPULATION,
        delta: float | None = None,
        weights: signals.WeightTable | None = None,
    ):
        self.n_cells = n_cells
        self.delta = delta
        self.weights = weights

    def fit(self, X, y=None):
        X = self._validate(X)
        weights = self.weights if self.weights is not None else signals.DEFAULT_WEIGHTS
        self.weights_ = weights
        self.delta_ = (
            self.delta
            if self.delta is not None
            else dca.default_delta(self.n_cells, weights)
        )
        self.n_features_in_ = X.shape[1]
        return self

    def _validate(self, X) -> np.ndarray:
        X = check_array(X, dtype=float)
        if X.shape[1] != 4:
            raise ValueError(
                f"expected 4 columns (PAMP, Danger, Safe, multiplicity), "
                f"got {X.shape[1]}"
            )
        _require_unit_interval(X[:, :3], "signal columns")
        if X.shape[0] and X[:, 3].min() < 1.0:
            raise ValueError("multiplicity column must be >= 1")
        return X

    def _score(self, X: np.ndarray) -> np.ndarray:
        signal_stream = signals.SignalStream(values=X[:, :3])
        antigen_stream = signals.AntigenStream(
            type_ids=np.arange(X.shape[0], dtype=int),
            multiplicities=np.floor(X[:, 3] + 0.5).astype(int),
        )
        series = dca.run(
            signal_stream,
            antigen_stream,
            n_cells=self.n_cells,
            delta=self.delta_,
            weights=self.weights_,
        )
        return series.values

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "delta_")
        return self._score(self._validate(X)).reshape(-1, 1)

    def score_samples(self, X) -> np.ndarray:
        check_is_fitted(self, "delta_")
        return self._score(self._validate(X))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "delta_")
        return np.asarray(["k_score"], dtype=object)
