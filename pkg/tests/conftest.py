"""Shared fixtures: repo paths, table builders and crafted merge inputs."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from dcakit.config import RunConfig
from dcakit.ingest import RawTable, ResampledTable
from dcakit.preprocessing import normalise_table

REPO = Path(__file__).resolve().parent.parent
FIXTURE_CSV = REPO / "data" / "synthetic_drive.csv"
FIXTURE_CONF = REPO / "data" / "synthetic_drive.conf"
FIXTURE_LABELS = (
    "normal", "anomalous", "normal", "anomalous", "normal", "anomalous", "normal",
)


def make_raw(timestamps, **columns) -> RawTable:
    return RawTable(
        np.asarray(timestamps, dtype=float),
        {k: np.asarray(v, dtype=float) for k, v in columns.items()},
    )


def make_resampled(**columns) -> ResampledTable:
    return ResampledTable({k: np.asarray(v, dtype=float) for k, v in columns.items()})


def make_normalised(**columns):
    return normalise_table(make_resampled(**columns))


@pytest.fixture(scope="session")
def fixture_config() -> RunConfig:
    return RunConfig(
        input=str(FIXTURE_CSV),
        marker_col="marker",
        segments=7,
        labels=FIXTURE_LABELS,
    )


@pytest.fixture()
def write_csv(tmp_path):
    """Write CSV text to a temp file and return its path as str."""

    def _write(text: str, name: str = "input.csv") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return _write


def two_factor(theta_deg: float, offset: float = 5.0, scale: float = 1.0):
    """A column mixing two orthogonal equal-variance base shapes.

    For rank-2 data the biplot-arrow cosine between two such columns is
    exactly cos of their angle difference, so candidate margins are known
    by construction.
    """
    theta = math.radians(theta_deg)

    def value(i: int) -> float:
        f1 = math.sin(2 * math.pi * i / 40)
        f2 = math.sqrt(2) * ((i // 4) % 2)
        return offset + scale * (math.cos(theta) * f1 + math.sin(theta) * f2)

    return value


def render_csv(columns: dict, n_seconds: int = 40) -> str:
    names = list(columns)
    lines = ["time," + ",".join(names)]
    for i in range(n_seconds):
        cells = ",".join(f"{columns[name](i):.6f}" for name in names)
        lines.append(f"{i * 1000},{cells}")
    return "\n".join(lines) + "\n"


@pytest.fixture()
def duplicated_pair_csv(write_csv):
    """foot_gsr == hand_gsr; the other angles stay far from any candidate."""
    return write_csv(
        render_csv(
            {
                "foot_gsr": two_factor(0),
                "hand_gsr": two_factor(0),
                "hr": two_factor(50, offset=70, scale=10),
                "resp": two_factor(100, offset=20, scale=4),
                "emg": two_factor(150, offset=8, scale=2),
            }
        )
    )


@pytest.fixture()
def triple_csv(write_csv):
    """Three identical columns plus two independents."""
    return write_csv(
        render_csv(
            {
                "a": two_factor(0),
                "b": two_factor(0),
                "c": two_factor(0),
                "d": two_factor(60, offset=20, scale=4),
                "e": two_factor(120, offset=8, scale=2),
            }
        )
    )
