"""Deterministic CSV and JSON artifact formatting.

Floats are rendered with 17 significant digits so identical configs produce
byte-identical CSV files on any platform; JSON reports use sorted keys and a
fixed indent for the same reason.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .sweep import SweepResult


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def csv_text(header: list[str], columns: list[np.ndarray]) -> str:
    if len(header) != len(columns):
        raise ValueError("header and column count mismatch")
    rows = [",".join(header)]
    n = len(columns[0])
    for col in columns:
        if len(col) != n:
            raise ValueError("ragged columns")
    for i in range(n):
        rows.append(",".join(format_float(col[i]) for col in columns))
    return "\n".join(rows) + "\n"


def trajectory_csv(traj: Trajectory) -> str:
    labels = sorted(traj.series)
    header = ["t"] + labels
    columns = [np.asarray(traj.times)] + [np.asarray(traj.series[k]) for k in labels]
    return csv_text(header, columns)


def sweep_csv(result: SweepResult) -> str:
    header = ["g"]
    columns: list[np.ndarray] = [result.g_grid]
    for j, tag in enumerate(result.tags):
        header.append(f"freq_pert_{tag}")
        columns.append(result.freq_pert[:, j])
        header.append(f"freq_exact_{tag}")
        columns.append(result.freq_exact[:, j])
    header += ["spread", "xi"]
    columns += [result.spread, result.xi]
    return csv_text(header, columns)


def modes_csv(rows: list[dict]) -> str:
    header = ["mode", "tag", "k_corrected", "freq_perturbative", "freq_exact"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(
                [
                    str(row["mode"]),
                    row["tag"],
                    format_float(row["k_corrected"]),
                    format_float(row["freq_perturbative"]),
                    format_float(row["freq_exact"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def json_text(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"


def write_artifacts(directory: str | Path, artifacts: dict[str, str]) -> list[Path]:
    out_dir = Path(directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in artifacts.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
