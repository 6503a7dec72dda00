"""Generate the bundled synthetic driving fixture and verify its properties.

The fixture is a 700-second recording sampled at 2 Hz with five attributes
and a segment-marker channel.  Seven 100-second segments alternate
normal/anomalous (segments 2, 4, 6 are anomalous).  Attributes follow a
two-factor model,

    a_i = L_i * (cos(theta_i) * anomaly(t) + sign_i * sin(theta_i) * drift(t)) + noise,

where anomaly(t) is the 0/1 segment indicator and drift(t) a slow sinusoid
in [0,1].  Min-Max normalisation cancels the scales L_i, so the variability
ranking is governed by each column's variance-to-squared-range ratio; the
mixing angles theta_i are chosen on the descending branch of that ratio to
give a strictly decreasing ladder (a1 > a2 > a3 > a4 > a5).  Alternating
drift signs spread the attributes' PC1-PC2 directions far enough apart that
no pair looks mergeable, while every anomaly coefficient stays positive, so
anomalous segments push PAMP/Danger-mapped values up and the inverted Safe
value down — exactly the geometry the detector separates best.

Before freezing the CSV the script runs the full pipeline and asserts:
ranking order a1..a5, no merge candidates (with margin from the 0.95
cosine threshold), detected boundaries at 100..600, AUC >= 0.9, and some
threshold reaching TP = 1 with FP <= 0.25.

Usage: python tools/make_fixture.py [--out data/synthetic_drive.csv]
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

import numpy as np

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from dcakit import config as config_mod  # noqa: E402
from dcakit import pca, pipeline  # noqa: E402

N_SECONDS = 700
SAMPLES_PER_SECOND = 2
SEGMENT_LENGTH = 100
BOUNDARIES = tuple(range(SEGMENT_LENGTH, N_SECONDS, SEGMENT_LENGTH))  # 100..600
LABELS = ("normal", "anomalous", "normal", "anomalous", "normal", "anomalous", "normal")

LENGTHS = (2.0, 1.4, 1.0, 0.8, 0.6)
THETAS_DEG = (8.4, 24.5, 38.9, 51.6, 62.6)
DRIFT_SIGNS = (1.0, -1.0, 1.0, -1.0, 1.0)
DRIFT_PERIOD = 337.0
NOISE_SCALE = 0.01
MARKER_BASE = 14.0
MARKER_PEAK = 60.0
SEED = 20260819

COSINE_MARGIN = 0.02  # required clearance below the 0.95 merge threshold


def is_anomalous_second(t: int) -> bool:
    segment = t // SEGMENT_LENGTH
    return LABELS[segment] == "anomalous"


def build_rows() -> list[list[float]]:
    rng = np.random.default_rng(SEED)
    rows: list[list[float]] = []
    n_samples = N_SECONDS * SAMPLES_PER_SECOND
    for i in range(n_samples):
        t_ms = i * (1000 // SAMPLES_PER_SECOND)
        second = t_ms // 1000
        t = second + (i % SAMPLES_PER_SECOND) / SAMPLES_PER_SECOND

        anomaly = 1.0 if is_anomalous_second(second) else 0.0
        drift = 0.5 * (1.0 + math.sin(2.0 * math.pi * t / DRIFT_PERIOD))

        row = [float(t_ms)]
        for length, theta_deg, sign in zip(LENGTHS, THETAS_DEG, DRIFT_SIGNS):
            theta = math.radians(theta_deg)
            value = math.cos(theta) * anomaly + sign * math.sin(theta) * drift
            value = length * value + NOISE_SCALE * length * rng.standard_normal()
            row.append(value)

        marker = MARKER_BASE + 0.5 * rng.standard_normal()
        if second in BOUNDARIES:
            marker = MARKER_PEAK + 0.1 * rng.standard_normal()
        row.append(marker)
        rows.append(row)
    return rows


def write_csv(rows: list[list[float]], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["time,a1,a2,a3,a4,a5,marker"]
    for row in rows:
        t_ms = int(row[0])
        cells = ",".join(f"{v:.6f}" for v in row[1:])
        lines.append(f"{t_ms},{cells}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def verify(path: Path) -> None:
    cfg = config_mod.RunConfig(
        input=str(path),
        marker_col="marker",
        segments=len(LABELS),
        labels=LABELS,
    )
    start = time.perf_counter()
    result = pipeline.run(cfg)
    elapsed = time.perf_counter() - start

    ranking = result.analysis.ranking.attributes
    scores = result.analysis.ranking.scores
    assert ranking == ("a1", "a2", "a3", "a4", "a5"), f"ranking {ranking}"
    gaps = [a / b for a, b in zip(scores, scores[1:])]
    assert min(gaps) > 1.02, f"ranking score gaps too thin: {scores}"

    assert not result.analysis.merge_decisions, (
        f"unexpected merge candidates: {result.analysis.merge_decisions}"
    )
    # also check the clearance below the merge threshold directly
    arrows = pca.biplot_coordinates(result.analysis.pca_initial)
    norms = np.sqrt((arrows**2).sum(axis=1))
    worst = max(
        float(arrows[i] @ arrows[j] / (norms[i] * norms[j]))
        for i in range(len(norms))
        for j in range(i + 1, len(norms))
    )
    assert worst <= 0.95 - COSINE_MARGIN, f"tightest biplot cosine {worst:.4f}"

    assert result.segment_map.boundaries == BOUNDARIES, result.segment_map.boundaries
    assert result.analysis.assignment.antigen == "a1"

    auc = result.curve.auc
    assert auc >= 0.9, f"AUC {auc} below 0.9"
    best = [
        r for r in result.curve.results if r.tp_rate == 1.0 and r.fp_rate <= 0.25
    ]
    assert best, "no threshold reaches TP=1 with FP<=0.25"
    print(
        f"verified: ranking {' > '.join(ranking)} "
        f"(scores {', '.join(f'{s:.4f}' for s in scores)}); "
        f"tightest biplot cosine {worst:.3f}; AUC {auc:.4f}; "
        f"{len(best)} threshold(s) at TP=1 FP<=0.25; pipeline {elapsed * 1000:.0f} ms"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--out",
        type=Path,
        default=REPO / "data" / "synthetic_drive.csv",
        help="output CSV path",
    )
    args = parser.parse_args()
    rows = build_rows()
    write_csv(rows, args.out)
    verify(args.out)
    print(f"wrote {args.out} ({args.out.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
