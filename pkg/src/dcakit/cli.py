"""Command-line entry point: dcakit stats | analyse | run.

Settings come from an optional flat key=value config file, overridable by
same-named flags (flags win).  Exit codes: 0 success, 2 configuration or
usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import ingest, pipeline, reporting
from .config import (
    RunConfig,
    build_config,
    merge_flag_overrides,
    read_config_file,
)
from .errors import ConfigError, DataError, NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

# argparse destination -> config key; every flag value stays a string so
# config.build_config is the single place values get parsed and validated
_FLAG_KEYS = (
    "input",
    "out_dir",
    "time_col",
    "marker_col",
    "exclude",
    "population",
    "delta",
    "fmin",
    "fmax",
    "thresholds",
    "grid",
    "segments",
    "boundaries",
    "labels",
    "score_mode",
    "merge_threshold",
)


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="input CSV file")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--out-dir", dest="out_dir", help="artifact directory (default .)")
    parser.add_argument("--time-col", dest="time_col", help="timestamp column name (default time)")
    parser.add_argument("--marker-col", dest="marker_col", help="segment-marker column name")
    parser.add_argument("--exclude", help="comma-separated columns to drop")
    parser.add_argument("--population", help="cell population size (default 100)")
    parser.add_argument("--delta", help="migration threshold step (default derived)")
    parser.add_argument("--fmin", help="antigen multiplier lower bound (default 15)")
    parser.add_argument("--fmax", help="antigen multiplier upper bound (default 100)")
    parser.add_argument("--thresholds", help="comma-separated classification thresholds")
    parser.add_argument("--grid", help="threshold grid size when no explicit list (default 41)")
    parser.add_argument("--segments", help="segment count for marker-based detection")
    parser.add_argument("--boundaries", help="comma-separated segment boundaries (seconds)")
    parser.add_argument("--labels", help="comma-separated true labels, one per segment")
    parser.add_argument("--score-mode", dest="score_mode", help="variability score: subspace or pc1")
    parser.add_argument("--merge-threshold", dest="merge_threshold", help="cosine similarity needed to merge (default 0.95)")
    parser.add_argument(
        "--dump-normalised",
        dest="dump_normalised",
        action="store_true",
        default=None,
        help="also write statistics of the normalised table",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dcakit",
        description=(
            "Anomaly detection for multivariate time series: PCA-driven "
            "signal categorisation feeding a deterministic dendritic-cell "
            "detector."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("stats", "describe every attribute of the raw and per-second tables"),
        ("analyse", "rank attributes, decide merges and map signal categories"),
        ("run", "full pipeline: per-second scores, segment reports, ROC curve"),
    ):
        _add_common_flags(subparsers.add_parser(name, help=text))
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Layer CLI flags over the config file and validate the result."""
    file_values = read_config_file(args.config) if args.config else {}
    flag_values: dict[str, str | None] = {
        key: getattr(args, key) for key in _FLAG_KEYS
    }
    if args.dump_normalised:
        flag_values["dump_normalised"] = "true"
    return build_config(merge_flag_overrides(file_values, flag_values))


def cmd_stats(config: RunConfig) -> None:
    raw, resampled = pipeline.load_tables(config)
    raw_stats = [ingest.describe(raw, name) for name in raw.names]
    resampled_stats = [ingest.describe(resampled, name) for name in resampled.names]

    out = Path(config.out_dir)
    raw_path = out / "stats_raw.csv"
    resampled_path = out / "stats_resampled.csv"
    reporting.write_atomic(raw_path, reporting.render_stats(raw_stats))
    reporting.write_atomic(resampled_path, reporting.render_stats(resampled_stats))

    print("raw attributes:")
    print(reporting.render_stats(raw_stats), end="")
    print("per-second attributes:")
    print(reporting.render_stats(resampled_stats), end="")
    print(f"wrote {raw_path} and {resampled_path}")


def cmd_analyse(config: RunConfig) -> None:
    analysis = pipeline.analyse(config)
    written = pipeline.write_analysis_artifacts(analysis, config)

    print("ranking: " + " > ".join(analysis.ranking.attributes))
    for decision in analysis.merge_decisions:
        verdict = (
            f"merged as {decision.merged_name}" if decision.applied else decision.note
        )
        print(
            f"merge candidate: {decision.pair[0]} ~ {decision.pair[1]} "
            f"(similarity {reporting.fmt6(decision.similarity)}, "
            f"rank-sum p {reporting.fmt6(decision.p_value)}) -> {verdict}"
        )
    print(f"antigen: {analysis.assignment.antigen}")
    for category, names in analysis.assignment.categories.items():
        suffix = " (inverted)" if category == "Safe" else ""
        print(f"{category}{suffix}: {', '.join(names)}")
    print("wrote " + ", ".join(str(p) for p in written))


def cmd_run(config: RunConfig) -> None:
    result = pipeline.run(config)
    written = pipeline.write_run_artifacts(result, config)
    print(pipeline.summarise_run(result, config), end="")
    print(f"wrote {len(written)} file(s) under {config.out_dir}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        if args.command == "stats":
            cmd_stats(config)
        elif args.command == "analyse":
            cmd_analyse(config)
        else:
            cmd_run(config)
    except ConfigError as exc:
        return _fail(exc, EXIT_CONFIG)
    except NumericalError as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except (DataError, OSError) as exc:
        return _fail(exc, EXIT_DATA)
    return EXIT_OK


def _fail(exc: Exception, code: int) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
