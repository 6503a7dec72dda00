"""End-to-end orchestration: ingest, normalise, categorise, score, evaluate.

Each stage runs inside a tag so errors surface as "<stage>: <message>", and
every artifact write is atomic.  The pipeline is deterministic end to end:
identical config and input produce byte-identical artifacts.
"""

from __future__ import annotations

import re
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from . import dca, ingest, metrics, pca, preprocessing, reporting, signals
from .config import RunConfig
from .errors import ConfigError, DataError, DcaKitError


@contextmanager
def _stage(name: str):
    """Prefix any pipeline error with the stage it came from."""
    try:
        yield
    except DcaKitError as exc:
        raise type(exc)(f"{name}: {exc}") from exc


@dataclass(frozen=True)
class MergeDecision:
    """One merge-candidate verdict: merged, or why not."""

    pair: tuple[str, str]
    similarity: float
    p_value: float
    applied: bool
    merged_name: str
    note: str


@dataclass(frozen=True)
class AnalysisResult:
    """Everything the categorisation stages produce."""

    raw: ingest.RawTable
    resampled: ingest.ResampledTable
    normalised: preprocessing.NormalisedTable  # after any merges
    attributes: tuple[str, ...]  # PCA inputs after merges (marker excluded)
    pca_initial: pca.PcaResult
    pca_final: pca.PcaResult
    merge_decisions: tuple[MergeDecision, ...]
    ranking: pca.VariabilityRanking
    assignment: signals.SignalAssignment


@dataclass(frozen=True)
class RunResult:
    """A full detection run: analysis, scores, segmentation, ROC."""

    analysis: AnalysisResult
    signal_stream: signals.SignalStream
    antigen_stream: signals.AntigenStream
    series: dca.KAlphaSeries
    segment_map: ingest.SegmentMap
    curve: metrics.RocCurve
    delta: float
    thresholds: tuple[float, ...]


def _merge_name(a: str, b: str, existing: set[str]) -> str:
    """Name for the merged column: the shared trailing token if any.

    "foot_gsr" + "hand_gsr" becomes "gsr"; unrelated names join as "a+b".
    Collisions with surviving columns fall back to numbered variants.
    """
    tokens_a = [t for t in re.split(r"[\s_\-]+", a) if t]
    tokens_b = [t for t in re.split(r"[\s_\-]+", b) if t]
    common: list[str] = []
    for x, y in zip(reversed(tokens_a), reversed(tokens_b)):
        if x.lower() != y.lower():
            break
        common.append(x)
    candidates = ["_".join(reversed(common))] if common else []
    candidates.append(f"{a}+{b}")
    for name in candidates:
        if name not in existing:
            return name
    n = 2
    while f"{a}+{b}_{n}" in existing:
        n += 1
    return f"{a}+{b}_{n}"


def apply_merges(
    table: preprocessing.NormalisedTable,
    candidates: list[pca.MergeCandidate],
    p_mode: str,
    p_level: float,
) -> tuple[preprocessing.NormalisedTable, tuple[MergeDecision, ...]]:
    """Fold merge candidates into the table, strongest similarity first.

    A candidate is skipped when either member was already merged away, or
    when the optional rank-sum gate rejects it.
    """
    decisions: list[MergeDecision] = []
    consumed: set[str] = set()
    for cand in candidates:
        a, b = cand.pair
        skip_note = ""
        if a in consumed or b in consumed:
            skip_note = "member already merged"
        elif p_mode == "above" and cand.p_value < p_level:
            skip_note = f"rank-sum p below gate {p_level:g}"
        elif p_mode == "below" and cand.p_value >= p_level:
            skip_note = f"rank-sum p not below gate {p_level:g}"
        if skip_note:
            decisions.append(
                MergeDecision(
                    pair=cand.pair,
                    similarity=cand.similarity,
                    p_value=cand.p_value,
                    applied=False,
                    merged_name="",
                    note=skip_note,
                )
            )
            continue
        name = _merge_name(a, b, set(table.columns) - {a, b})
        table = preprocessing.merge_normalised(table, a, b, name)
        consumed |= {a, b}
        decisions.append(
            MergeDecision(
                pair=cand.pair,
                similarity=cand.similarity,
                p_value=cand.p_value,
                applied=True,
                merged_name=name,
                note="merged",
            )
        )
    return table, tuple(decisions)


def _manual_assignment(config: RunConfig) -> signals.SignalAssignment:
    manual = config.manual_map
    assert manual is not None
    return signals.SignalAssignment(
        antigen=manual["antigen"][0],
        categories={cat: tuple(manual[cat]) for cat in signals.CATEGORIES},
        inverted=frozenset(manual["Safe"]),
    )


def load_tables(config: RunConfig) -> tuple[ingest.RawTable, ingest.ResampledTable]:
    """Ingest stage: parse the CSV, drop exclusions, resample to seconds."""
    with _stage("ingest"):
        raw = ingest.load_csv(config.input, time_col=config.time_col)
        if config.marker_col is not None:
            if config.marker_col in config.exclude:
                raise ConfigError(
                    f"marker column {config.marker_col!r} is also excluded"
                )
            if config.marker_col not in raw.columns:
                raise DataError(
                    f"marker column {config.marker_col!r} not in input"
                )
        if config.exclude:
            raw = raw.drop(config.exclude)
        resampled = ingest.resample_average(raw)
    return raw, resampled


def analyse(config: RunConfig) -> AnalysisResult:
    """Run ingest, normalisation, PCA ranking, merging and assignment."""
    raw, resampled = load_tables(config)

    with _stage("normalise"):
        normalised = preprocessing.normalise_table(resampled)

    attributes = tuple(
        name for name in normalised.names if name != config.marker_col
    )
    with _stage("pca"):
        if len(attributes) < 2:
            raise DataError(
                f"need >= 2 attributes for the covariance step, got "
                f"{len(attributes)}"
            )
        pca_initial = pca.jacobi_eigen(
            pca.covariance(normalised, attributes), attributes
        )
        if config.manual_map is None:
            candidates = pca.find_merge_candidates(
                pca_initial, normalised, config.merge_threshold
            )
            normalised, decisions = apply_merges(
                normalised, candidates, config.merge_p_mode, config.merge_p_level
            )
        else:
            # A manual mapping names raw attributes; merging could consume
            # them, so candidates are only reported, never applied.
            candidates = pca.find_merge_candidates(
                pca_initial, normalised, config.merge_threshold
            )
            decisions = tuple(
                MergeDecision(
                    pair=c.pair,
                    similarity=c.similarity,
                    p_value=c.p_value,
                    applied=False,
                    merged_name="",
                    note="manual mapping active",
                )
                for c in candidates
            )
        attributes = tuple(
            name for name in normalised.names if name != config.marker_col
        )
        if any(d.applied for d in decisions):
            pca_final = pca.jacobi_eigen(
                pca.covariance(normalised, attributes), attributes
            )
        else:
            pca_final = pca_initial
        ranking = pca.variability_scores(pca_final, mode=config.score_mode)

    with _stage("assign"):
        if config.manual_map is not None:
            assignment = _manual_assignment(config)
            missing = [
                name
                for names in assignment.categories.values()
                for name in names
                if name not in normalised.columns
            ]
            if assignment.antigen not in normalised.columns:
                missing.append(assignment.antigen)
            if missing:
                raise ConfigError(
                    f"manual mapping names unknown attribute(s): "
                    f"{', '.join(missing)}"
                )
        else:
            assignment = signals.assign_categories(
                ranking.attributes, config.weights
            )

    return AnalysisResult(
        raw=raw,
        resampled=resampled,
        normalised=normalised,
        attributes=attributes,
        pca_initial=pca_initial,
        pca_final=pca_final,
        merge_decisions=decisions,
        ranking=ranking,
        assignment=assignment,
    )


def _segment_map(config: RunConfig, analysis: AnalysisResult) -> ingest.SegmentMap:
    n_seconds = analysis.normalised.n_seconds
    if config.boundaries is not None:
        segment_map = ingest.SegmentMap(
            boundaries=config.boundaries, n_seconds=n_seconds
        )
    elif config.marker_col is not None and config.segments is not None:
        marker = analysis.resampled.columns[config.marker_col]
        segment_map = ingest.detect_segments(marker, config.segments)
    else:
        raise ConfigError(
            "segmentation needs either explicit boundaries or both a "
            "marker column and a segment count"
        )
    if config.labels is None:
        raise ConfigError("segment labels are required (key 'labels' or --labels)")
    return ingest.apply_labels(segment_map, config.labels)


def run(config: RunConfig) -> RunResult:
    """The full detection pipeline, from CSV to ROC curve."""
    analysis = analyse(config)

    with _stage("streams"):
        signal_stream, antigen_stream = signals.build_streams(
            analysis.normalised,
            analysis.assignment,
            f_min=config.f_min,
            f_max=config.f_max,
        )

    with _stage("detector"):
        delta = (
            config.delta
            if config.delta is not None
            else dca.default_delta(config.population, config.weights)
        )
        series = dca.run(
            signal_stream,
            antigen_stream,
            n_cells=config.population,
            delta=delta,
            weights=config.weights,
        )

    with _stage("segment"):
        segment_map = _segment_map(config, analysis)

    with _stage("evaluate"):
        if config.thresholds is not None:
            thresholds = tuple(sorted(set(config.thresholds)))
        else:
            thresholds = tuple(metrics.default_threshold_grid(series, config.grid))
        curve = metrics.roc_curve(series, segment_map, thresholds)

    return RunResult(
        analysis=analysis,
        signal_stream=signal_stream,
        antigen_stream=antigen_stream,
        series=series,
        segment_map=segment_map,
        curve=curve,
        delta=delta,
        thresholds=thresholds,
    )


def write_analysis_artifacts(
    analysis: AnalysisResult, config: RunConfig
) -> list[Path]:
    """Write loadings, merge decisions, assignment (and optional dump)."""
    out = Path(config.out_dir)
    written: list[Path] = []

    loadings = out / "loadings.csv"
    reporting.write_atomic(
        loadings, reporting.render_loadings(analysis.pca_final, analysis.ranking)
    )
    written.append(loadings)

    merges = out / "merges.csv"
    reporting.write_atomic(
        merges, reporting.render_merges(analysis.merge_decisions)
    )
    written.append(merges)

    assignment = out / "assignment.csv"
    reporting.write_atomic(
        assignment,
        reporting.render_assignment(analysis.assignment, analysis.ranking),
    )
    written.append(assignment)

    if config.dump_normalised:
        stats = [
            ingest.describe(analysis.normalised, name)
            for name in analysis.normalised.names
        ]
        dump = out / "stats_normalised.csv"
        reporting.write_atomic(dump, reporting.render_stats(stats))
        written.append(dump)
    return written


def write_run_artifacts(result: RunResult, config: RunConfig) -> list[Path]:
    """Write K scores, the ROC curve and one segment report per threshold."""
    out = Path(config.out_dir)
    written = write_analysis_artifacts(result.analysis, config)

    k_path = out / "k_alpha.csv"
    reporting.write_atomic(k_path, reporting.render_k_alpha(result.series))
    written.append(k_path)

    roc_path = out / "roc.csv"
    reporting.write_atomic(roc_path, reporting.render_roc(result.curve))
    written.append(roc_path)

    for index, threshold_result in enumerate(result.curve.results):
        name = reporting.segment_report_name(index, threshold_result.threshold)
        path = out / name
        reporting.write_atomic(
            path, reporting.render_segment_report(threshold_result)
        )
        written.append(path)
    return written


def summarise_run(result: RunResult, config: RunConfig) -> str:
    """Human-readable run summary; rate pairs match roc.csv exactly."""
    analysis = result.analysis
    lines = [
        f"input: {config.input} — {analysis.normalised.n_seconds} seconds, "
        f"{len(analysis.attributes)} attributes",
        "ranking: " + " > ".join(analysis.ranking.attributes),
    ]
    applied = [d for d in analysis.merge_decisions if d.applied]
    if applied:
        for d in applied:
            lines.append(
                f"merged: {d.pair[0]} + {d.pair[1]} -> {d.merged_name} "
                f"(similarity {reporting.fmt6(d.similarity)}, "
                f"rank-sum p {reporting.fmt6(d.p_value)})"
            )
    else:
        lines.append("merged: none")
    lines.append(f"antigen: {analysis.assignment.antigen}")
    for category in signals.CATEGORIES:
        names = ", ".join(analysis.assignment.categories[category])
        suffix = " (inverted)" if category == "Safe" else ""
        lines.append(f"{category}{suffix}: {names}")
    lines.append(
        f"population={config.population} delta={reporting.fmt6(result.delta)} "
        f"fmin={config.f_min} fmax={config.f_max}"
    )
    boundary_text = ", ".join(str(b) for b in result.segment_map.boundaries)
    lines.append(
        f"segments: {result.segment_map.n_segments} (boundaries {boundary_text})"
    )
    lines.append("threshold,tp_rate,fp_rate")
    lines.extend(reporting.roc_row(r) for r in result.curve.results)
    lines.append(f"auc={reporting.fmt_full(result.curve.auc)}")
    return "\n".join(lines) + "\n"
