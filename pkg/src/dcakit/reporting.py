"""CSV artifact rendering and atomic file output.

All artifacts are plain CSV with fixed headers.  Files are written to a
temporary sibling and renamed into place, so a crashed run never leaves a
truncated artifact.  Formatting is deterministic: identical values render
to identical bytes.
"""

from __future__ import annotations

import os
from pathlib import Path

from .dca import KAlphaSeries
from .ingest import AttributeStats
from .metrics import RocCurve, ThresholdResult
from .pca import PcaResult, VariabilityRanking
from .signals import SignalAssignment


def fmt6(value: float) -> str:
    """Render at 6 significant digits; -0 collapses to 0."""
    value = float(value)
    if value == 0.0:
        value = 0.0
    return format(value, ".6g")


def fmt_full(value: float) -> str:
    """Shortest exact rendering (full precision); -0 collapses to 0."""
    value = float(value)
    if value == 0.0:
        value = 0.0
    return repr(value)


def write_atomic(path: Path, text: str) -> None:
    """Write text to path via a temporary sibling and an atomic rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".part")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def render_stats(rows: list[AttributeStats]) -> str:
    lines = ["name,min,max,median,mean,stdev"]
    for s in rows:
        lines.append(
            f"{s.name},{fmt6(s.min)},{fmt6(s.max)},{fmt6(s.median)},"
            f"{fmt6(s.mean)},{fmt6(s.stdev)}"
        )
    return "\n".join(lines) + "\n"


def render_loadings(pca: PcaResult, ranking: VariabilityRanking) -> str:
    """One row per attribute in rank order: loadings, score and rank."""
    header = (
        "attribute,"
        + ",".join(f"pc{j + 1}" for j in range(pca.n_attributes))
        + ",score,rank"
    )
    lines = [header]
    index_of = {name: i for i, name in enumerate(pca.attributes)}
    for rank, (name, score) in enumerate(
        zip(ranking.attributes, ranking.scores), start=1
    ):
        row = pca.loadings[index_of[name]]
        cells = ",".join(fmt6(value) for value in row)
        lines.append(f"{name},{cells},{fmt6(score)},{rank}")
    return "\n".join(lines) + "\n"


def render_merges(decisions) -> str:
    lines = ["first,second,similarity,p_value,applied,merged_as,note"]
    for d in decisions:
        merged_as = d.merged_name if d.applied else ""
        lines.append(
            f"{d.pair[0]},{d.pair[1]},{fmt6(d.similarity)},{fmt6(d.p_value)},"
            f"{'true' if d.applied else 'false'},{merged_as},{d.note}"
        )
    return "\n".join(lines) + "\n"


def render_assignment(
    assignment: SignalAssignment, ranking: VariabilityRanking
) -> str:
    """Audit trail: every ranked attribute with its role and inversion flag."""
    role_of: dict[str, str] = {assignment.antigen: "antigen"}
    for category, names in assignment.categories.items():
        for name in names:
            role_of[name] = category
    score_of = dict(zip(ranking.attributes, ranking.scores))
    rank_of = {name: i + 1 for i, name in enumerate(ranking.attributes)}

    names = list(ranking.attributes)
    names += [n for n in role_of if n not in rank_of]  # manual-map extras
    lines = ["attribute,rank,score,role,inverted"]
    for name in names:
        rank = rank_of.get(name, "")
        score = fmt6(score_of[name]) if name in score_of else ""
        role = role_of.get(name, "unused")
        inverted = "true" if name in assignment.inverted else "false"
        lines.append(f"{name},{rank},{score},{role},{inverted}")
    return "\n".join(lines) + "\n"


def render_k_alpha(series: KAlphaSeries) -> str:
    lines = ["type,seconds,k_alpha,presented_count"]
    for type_id, value, count in zip(series.type_ids, series.values, series.counts):
        lines.append(f"{type_id},{type_id},{fmt6(value)},{count}")
    return "\n".join(lines) + "\n"


def roc_row(result: ThresholdResult) -> str:
    return f"{fmt_full(result.threshold)},{fmt_full(result.tp_rate)},{fmt_full(result.fp_rate)}"


def render_roc(curve: RocCurve) -> str:
    lines = ["threshold,tp_rate,fp_rate"]
    lines.extend(roc_row(result) for result in curve.results)
    lines.append(f"# auc={fmt_full(curve.auc)}")
    return "\n".join(lines) + "\n"


def render_segment_report(result: ThresholdResult) -> str:
    lines = ["segment,start,end,true_label,L,predicted_label"]
    for p in result.predictions:
        lines.append(
            f"{p.segment},{p.start},{p.end},{p.true_label},"
            f"{fmt_full(p.L)},{p.predicted_label}"
        )
    return "\n".join(lines) + "\n"


def segment_report_name(index: int, threshold: float) -> str:
    return f"segments_{index:03d}_th{fmt6(threshold)}.csv"
