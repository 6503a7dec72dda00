"""Anomaly detection for multivariate time series.

The pipeline normalises a per-second table, ranks attributes by principal
component variability, maps them onto a dendritic-cell detector's input
channels (antigen, PAMP, Danger, Safe), scores every second, and evaluates
labelled segments with TP/FP rates and ROC curves.

Array-based access goes through the scikit-learn style estimators
(:class:`MinMaxNormaliser`, :class:`SignalCategoriser`,
:class:`DendriticCellScorer`); file-based runs go through
:mod:`dcakit.pipeline` or the ``dcakit`` command-line tool.
"""

from . import config, dca, ingest, metrics, pca, pipeline, preprocessing, reporting, signals
from .config import RunConfig
from .dca import Engine, KAlphaSeries, Presentation, k_alpha, transform_signals
from .errors import (
    ConfigError,
    DataError,
    DcaKitError,
    DegenerateColumnError,
    DetectionError,
    InsufficientDataError,
    NumericalError,
    ParseError,
    SchemaError,
)
from .estimators import DendriticCellScorer, MinMaxNormaliser, SignalCategoriser
from .ingest import (
    LABEL_ANOMALOUS,
    LABEL_NORMAL,
    AttributeStats,
    RawTable,
    ResampledTable,
    SegmentMap,
    describe,
    detect_segments,
    load_csv,
    resample_average,
)
from .metrics import (
    RocCurve,
    RocPoint,
    SegmentPrediction,
    ThresholdResult,
    classify_segment,
    confusion_rates,
    default_threshold_grid,
    roc_curve,
)
from .pca import (
    MergeCandidate,
    PcaResult,
    VariabilityRanking,
    covariance,
    find_merge_candidates,
    jacobi_eigen,
    variability_scores,
    wilcoxon_rank_sum,
)
from .preprocessing import (
    NormalisedTable,
    invert,
    merge_columns,
    merge_normalised,
    min_max_normalise,
    normalise_table,
)
from .signals import (
    CATEGORIES,
    DEFAULT_WEIGHTS,
    AntigenStream,
    CategoryRanking,
    SignalAssignment,
    SignalStream,
    WeightTable,
    antigen_frequency,
    assign_categories,
    build_streams,
    category_ranking,
)

__version__ = "0.1.0"

__all__ = [
    "AntigenStream",
    "AttributeStats",
    "CATEGORIES",
    "CategoryRanking",
    "ConfigError",
    "DEFAULT_WEIGHTS",
    "DataError",
    "DcaKitError",
    "DegenerateColumnError",
    "DendriticCellScorer",
    "DetectionError",
    "Engine",
    "InsufficientDataError",
    "KAlphaSeries",
    "LABEL_ANOMALOUS",
    "LABEL_NORMAL",
    "MergeCandidate",
    "MinMaxNormaliser",
    "NormalisedTable",
    "NumericalError",
    "ParseError",
    "PcaResult",
    "Presentation",
    "RawTable",
    "ResampledTable",
    "RocCurve",
    "RocPoint",
    "RunConfig",
    "SchemaError",
    "SegmentMap",
    "SegmentPrediction",
    "SignalAssignment",
    "SignalCategoriser",
    "SignalStream",
    "ThresholdResult",
    "VariabilityRanking",
    "WeightTable",
    "antigen_frequency",
    "assign_categories",
    "build_streams",
    "category_ranking",
    "classify_segment",
    "config",
    "confusion_rates",
    "covariance",
    "dca",
    "default_threshold_grid",
    "describe",
    "detect_segments",
    "find_merge_candidates",
    "ingest",
    "invert",
    "jacobi_eigen",
    "k_alpha",
    "load_csv",
    "merge_columns",
    "merge_normalised",
    "metrics",
    "min_max_normalise",
    "normalise_table",
    "pca",
    "pipeline",
    "preprocessing",
    "reporting",
    "resample_average",
    "roc_curve",
    "signals",
    "transform_signals",
    "variability_scores",
    "wilcoxon_rank_sum",
]
