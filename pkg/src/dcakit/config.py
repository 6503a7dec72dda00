"""Run configuration: a flat key=value file, overridable by CLI flags.

Every key can appear in the config file or as a same-named flag; flags win.
Validation happens once, after merging, and raises ConfigError so the CLI
can exit with the usage-error code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .ingest import VALID_LABELS
from .signals import CATEGORIES, DEFAULT_F_MAX, DEFAULT_F_MIN, WeightTable

SCORE_MODES = ("subspace", "pc1")
MERGE_P_MODES = ("off", "above", "below")

DEFAULT_POPULATION = 100
DEFAULT_GRID = 41
DEFAULT_MERGE_THRESHOLD = 0.95
DEFAULT_MERGE_P_LEVEL = 0.05

_WEIGHT_KEYS = tuple(
    f"weight_{row}_{cat.lower()}" for row in ("csm", "k") for cat in CATEGORIES
)

_LIST_KEYS = {"exclude", "boundaries", "labels", "thresholds", "pamp", "danger", "safe"}

KNOWN_KEYS = frozenset(
    {
        "input",
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
        "merge_p_mode",
        "merge_p_level",
        "out_dir",
        "dump_normalised",
        "antigen",
        "pamp",
        "danger",
        "safe",
    }
    | set(_WEIGHT_KEYS)
)


@dataclass(frozen=True)
class RunConfig:
    """Fully validated settings for one pipeline invocation."""

    input: str
    time_col: str = "time"
    marker_col: str | None = None
    exclude: tuple[str, ...] = ()
    population: int = DEFAULT_POPULATION
    delta: float | None = None  # None = derive from weights and population
    f_min: int = DEFAULT_F_MIN
    f_max: int = DEFAULT_F_MAX
    weights: WeightTable = field(default_factory=WeightTable)
    segments: int | None = None
    boundaries: tuple[int, ...] | None = None
    labels: tuple[str, ...] | None = None
    thresholds: tuple[float, ...] | None = None
    grid: int = DEFAULT_GRID
    merge_threshold: float = DEFAULT_MERGE_THRESHOLD
    merge_p_mode: str = "off"
    merge_p_level: float = DEFAULT_MERGE_P_LEVEL
    score_mode: str = "subspace"
    out_dir: str = "."
    dump_normalised: bool = False
    manual_map: dict[str, tuple[str, ...]] | None = None  # antigen/PAMP/Danger/Safe

    def __post_init__(self) -> None:
        if not self.input:
            raise ConfigError("an input file is required (key 'input' or --input)")
        if self.population < 1:
            raise ConfigError(f"population must be >= 1, got {self.population}")
        if self.delta is not None and self.delta <= 0.0:
            raise ConfigError(f"delta must be > 0, got {self.delta}")
        # the antigen multiplier may not exceed the population: more copies
        # than cells would stack duplicates within one second
        object.__setattr__(self, "f_max", min(self.f_max, self.population))
        if self.f_min < 1:
            raise ConfigError(f"fmin must be >= 1, got {self.f_min}")
        if self.f_min >= self.f_max:
            raise ConfigError(
                f"need fmin < fmax (after capping fmax at the population), "
                f"got {self.f_min} >= {self.f_max}"
            )
        if self.segments is not None and self.segments < 2:
            raise ConfigError(f"segments must be >= 2, got {self.segments}")
        if self.boundaries is not None:
            if any(b <= a for a, b in zip(self.boundaries, self.boundaries[1:])):
                raise ConfigError(
                    f"boundaries must be strictly increasing, got {self.boundaries}"
                )
            if self.segments is not None and self.segments != len(self.boundaries) + 1:
                raise ConfigError(
                    f"segments={self.segments} contradicts "
                    f"{len(self.boundaries)} boundaries"
                )
        if self.labels is not None:
            bad = [l for l in self.labels if l not in VALID_LABELS]
            if bad:
                raise ConfigError(
                    f"labels must be one of {VALID_LABELS}, got {bad}"
                )
        if self.thresholds is not None and not self.thresholds:
            raise ConfigError("thresholds list must be non-empty when given")
        if self.grid < 1:
            raise ConfigError(f"grid must be >= 1, got {self.grid}")
        if not 0.0 < self.merge_threshold <= 1.0:
            raise ConfigError(
                f"merge_threshold must be in (0, 1], got {self.merge_threshold}"
            )
        if self.merge_p_mode not in MERGE_P_MODES:
            raise ConfigError(
                f"merge_p_mode must be one of {MERGE_P_MODES}, got {self.merge_p_mode!r}"
            )
        if not 0.0 < self.merge_p_level < 1.0:
            raise ConfigError(
                f"merge_p_level must be in (0, 1), got {self.merge_p_level}"
            )
        if self.score_mode not in SCORE_MODES:
            raise ConfigError(
                f"score_mode must be one of {SCORE_MODES}, got {self.score_mode!r}"
            )
        if self.manual_map is not None:
            expected = {"antigen", *CATEGORIES}
            if set(self.manual_map) != expected:
                raise ConfigError(
                    "manual mapping needs antigen, pamp, danger and safe together"
                )


def read_config_file(path: str) -> dict[str, str]:
    """Parse a flat key=value file; '#' starts a comment, blanks are skipped."""
    values: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                text = line.split("#", 1)[0].strip()
                if not text:
                    continue
                if "=" not in text:
                    raise ConfigError(f"{path}:{lineno}: expected key=value, got {text!r}")
                key, _, value = text.partition("=")
                key, value = key.strip(), value.strip()
                if key in values:
                    raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
                values[key] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return values


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {raw!r}") from exc


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from exc


def _parse_bool(key: str, raw: str) -> bool:
    lowered = raw.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key} must be a boolean, got {raw!r}")


def _split_list(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def build_config(values: dict[str, str]) -> RunConfig:
    """Turn merged key=value strings into a validated RunConfig."""
    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")

    kwargs: dict[str, object] = {}
    if "input" in values:
        kwargs["input"] = values["input"]
    else:
        raise ConfigError("an input file is required (key 'input' or --input)")
    if "time_col" in values:
        kwargs["time_col"] = values["time_col"]
    if "marker_col" in values:
        kwargs["marker_col"] = values["marker_col"] or None
    if "exclude" in values:
        kwargs["exclude"] = _split_list(values["exclude"])
    if "population" in values:
        kwargs["population"] = _parse_int("population", values["population"])
    if "delta" in values:
        kwargs["delta"] = _parse_float("delta", values["delta"])
    if "fmin" in values:
        kwargs["f_min"] = _parse_int("fmin", values["fmin"])
    if "fmax" in values:
        kwargs["f_max"] = _parse_int("fmax", values["fmax"])
    if "segments" in values:
        kwargs["segments"] = _parse_int("segments", values["segments"])
    if "boundaries" in values:
        kwargs["boundaries"] = tuple(
            _parse_int("boundaries", part) for part in _split_list(values["boundaries"])
        )
    if "labels" in values:
        kwargs["labels"] = _split_list(values["labels"])
    if "thresholds" in values:
        kwargs["thresholds"] = tuple(
            _parse_float("thresholds", part)
            for part in _split_list(values["thresholds"])
        )
    if "grid" in values:
        kwargs["grid"] = _parse_int("grid", values["grid"])
    if "merge_threshold" in values:
        kwargs["merge_threshold"] = _parse_float(
            "merge_threshold", values["merge_threshold"]
        )
    if "merge_p_mode" in values:
        kwargs["merge_p_mode"] = values["merge_p_mode"]
    if "merge_p_level" in values:
        kwargs["merge_p_level"] = _parse_float("merge_p_level", values["merge_p_level"])
    if "score_mode" in values:
        kwargs["score_mode"] = values["score_mode"]
    if "out_dir" in values:
        kwargs["out_dir"] = values["out_dir"]
    if "dump_normalised" in values:
        kwargs["dump_normalised"] = _parse_bool(
            "dump_normalised", values["dump_normalised"]
        )

    if any(key in values for key in _WEIGHT_KEYS):
        weights = WeightTable()
        csm = dict(weights.csm)
        k = dict(weights.k)
        for cat in CATEGORIES:
            low = cat.lower()
            if f"weight_csm_{low}" in values:
                csm[cat] = _parse_float(f"weight_csm_{low}", values[f"weight_csm_{low}"])
            if f"weight_k_{low}" in values:
                k[cat] = _parse_float(f"weight_k_{low}", values[f"weight_k_{low}"])
        kwargs["weights"] = WeightTable(csm=csm, k=k)

    map_keys = [key for key in ("antigen", "pamp", "danger", "safe") if key in values]
    if map_keys:
        if len(map_keys) != 4:
            raise ConfigError(
                "manual mapping needs all of antigen, pamp, danger, safe; "
                f"got only {', '.join(map_keys)}"
            )
        kwargs["manual_map"] = {
            "antigen": (values["antigen"],),
            "PAMP": _split_list(values["pamp"]),
            "Danger": _split_list(values["danger"]),
            "Safe": _split_list(values["safe"]),
        }
        for role, names in kwargs["manual_map"].items():
            if not names or not all(names):
                raise ConfigError(f"manual mapping for {role} names no attribute")

    return RunConfig(**kwargs)


def merge_flag_overrides(
    file_values: dict[str, str], flag_values: dict[str, str | None]
) -> dict[str, str]:
    """Config-file values overlaid with the flags the user actually passed."""
    merged = dict(file_values)
    for key, value in flag_values.items():
        if value is not None:
            merged[key] = value
    return merged

