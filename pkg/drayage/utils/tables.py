from __future__ import annotations

from bisect import bisect_right
from pathlib import Path

import numpy as np
import pandas as pd


def read_metadata(path: str | Path) -> dict[str, str]:
    """`# key=value` lines at the top of a calibration CSV."""
    meta: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if "=" in body:
                key, value = body.split("=", 1)
                meta[key.strip()] = value.strip()
    return meta


def read_grid(path: str | Path) -> tuple[dict[str, str], np.ndarray, np.ndarray, np.ndarray]:
    """Rectangular grid: first column is the row axis, remaining headers are the column axis."""
    meta = read_metadata(path)
    df = pd.read_csv(path, comment="#")
    rows = df.iloc[:, 0].to_numpy(dtype=float)
    cols = np.array([float(c) for c in df.columns[1:]])
    values = df.iloc[:, 1:].to_numpy(dtype=float)
    if np.any(np.diff(rows) <= 0) or np.any(np.diff(cols) <= 0):
        raise ValueError(f"{path}: grid axes must be strictly increasing")
    if np.isnan(values).any():
        raise ValueError(f"{path}: grid has empty cells")
    return meta, rows, cols, values


def read_table(path: str | Path, required: list[str]) -> pd.DataFrame:
    df = pd.read_csv(path, comment="#")
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    return df


def bilinear(xs: list[float], ys: list[float], grid: list[list[float]], x: float, y: float) -> float:
    """Scalar lookup on a rectangular grid; `x` and `y` must already lie inside the axes."""
    i = min(max(bisect_right(xs, x) - 1, 0), len(xs) - 2)
    j = min(max(bisect_right(ys, y) - 1, 0), len(ys) - 2)
    fx = (x - xs[i]) / (xs[i + 1] - xs[i])
    fy = (y - ys[j]) / (ys[j + 1] - ys[j])
    lo = grid[i][j] + fy * (grid[i][j + 1] - grid[i][j])
    hi = grid[i + 1][j] + fy * (grid[i + 1][j + 1] - grid[i + 1][j])
    return lo + fx * (hi - lo)
