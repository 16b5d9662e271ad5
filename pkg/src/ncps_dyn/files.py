"""CSV and text artifacts, written atomically."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .dynamics import Trajectory

TRAJECTORY_COLUMNS = ("t", "x1", "x2", "x3", "v1", "v2", "v3", "energy", "L1", "L2", "L3")


def atomic_write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def columns_to_csv(columns: Mapping[str, Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns.keys())
    for row in zip(*columns.values()):
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trajectory_columns(traj: Trajectory) -> dict[str, np.ndarray]:
    data = np.column_stack([traj.t, traj.x, traj.v, traj.energy, traj.angular_momentum])
    return {name: data[:, k] for k, name in enumerate(TRAJECTORY_COLUMNS)}


def write_trajectory_csv(path: str | Path, traj: Trajectory) -> Path:
    return atomic_write_text(path, columns_to_csv(trajectory_columns(traj)))


def read_csv_columns(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return {name: data[:, k] for k, name in enumerate(header)}


def read_trajectory_csv(path: str | Path) -> Trajectory:
    cols = read_csv_columns(path)
    missing = [c for c in TRAJECTORY_COLUMNS if c not in cols]
    if missing:
        raise ValueError(f"{path}: missing trajectory columns {missing}")
    stack = lambda *names: np.column_stack([cols[n] for n in names])
    return Trajectory(cols["t"], stack("x1", "x2", "x3"), stack("v1", "v2", "v3"),
                      cols["energy"], stack("L1", "L2", "L3"))
