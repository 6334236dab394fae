"""Result tables and grouped statistics (per group, month, day type, season, distance band)."""
from __future__ import annotations

from collections.abc import Iterable, Sequence

import pandas as pd

from ..scenarios.labels import distance_band, season_of
from ..simulator import SimResult

DEFAULT_GROUPING = ("group", "month", "day_type")
STAT_COLUMNS = ["count", "mean", "std", "median", "min", "max"]


def results_frame(results: Iterable[SimResult]) -> pd.DataFrame:
    """One row per result: scenario metadata, totals, per-aux energy as `aux_<name>_kwh`."""
    rows = []
    for r in results:
        t = r.totals
        row = {"scenario_id": r.scenario_id, "vehicle": r.vehicle, **r.metadata}
        row.update(t.model_dump(exclude={"aux_kwh"}))
        for name, kwh in t.aux_kwh.items():
            row[f"aux_{name}_kwh"] = kwh
        row["aux_total_kwh"] = sum(t.aux_kwh.values())
        rows.append(row)
    df = pd.DataFrame(rows)
    if df.empty:
        return df
    df = df.sort_values("scenario_id", kind="stable").reset_index(drop=True)
    if "month" in df.columns:
        df["season"] = [season_of(m) if pd.notna(m) else None for m in df["month"]]
    if "route_km" in df.columns:
        df["distance_band"] = [distance_band(km) for km in df["route_km"]]
    aux_cols = sorted(c for c in df.columns if c.startswith("aux_") and c.endswith("_kwh"))
    if aux_cols:
        df[aux_cols] = df[aux_cols].fillna(0.0)
    return df


def default_metric(df: pd.DataFrame) -> str:
    if "kwh_per_100km" in df.columns and df["kwh_per_100km"].notna().any():
        return "kwh_per_100km"
    return "l_per_100km"


def seasonal_aggregate(
    df: pd.DataFrame,
    by: Sequence[str] = DEFAULT_GROUPING,
    metric: str | None = None,
    only_ok: bool = True,
) -> pd.DataFrame:
    """count/mean/std/median/min/max of `metric` per cell, plus each aux component's energy share.

    Empty cells are omitted; a single-run cell reports std 0.
    """
    if df.empty:
        return pd.DataFrame(columns=[*by, *STAT_COLUMNS])
    metric = metric or default_metric(df)
    missing = [c for c in (*by, metric) if c not in df.columns]
    if missing:
        raise KeyError(f"results lack columns {missing}")
    if only_ok and "status" in df.columns:
        df = df[df["status"] == "ok"]
    df = df.dropna(subset=[metric])
    grouped = df.groupby(list(by), sort=True, dropna=False)
    stats = grouped[metric].agg(["count", "mean", "std", "median", "min", "max"])
    stats["std"] = stats["std"].fillna(0.0)

    aux_cols = [c for c in df.columns if c.startswith("aux_") and c.endswith("_kwh") and c != "aux_total_kwh"]
    if aux_cols:
        sums = grouped[[*aux_cols, "aux_total_kwh"]].sum()
        total = sums["aux_total_kwh"].where(sums["aux_total_kwh"] > 0)
        for c in aux_cols:
            stats[f"share_{c[4:-4]}"] = (sums[c] / total).fillna(0.0)
    stats.insert(0, "metric", metric)
    return stats.reset_index()


def long_format(stats: pd.DataFrame, value: str = "mean") -> pd.DataFrame:
    """Plot-ready rows: every grouping key plus one value column."""
    keys = [c for c in stats.columns if c not in STAT_COLUMNS and c != "metric" and not c.startswith("share_")]
    return stats[[*keys, "metric", value]].rename(columns={value: "value"})
