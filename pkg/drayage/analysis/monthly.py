"""Per-truck monthly fuel and electricity totals from itinerary runs."""
from __future__ import annotations

from collections.abc import Iterable

import pandas as pd

from ..simulator import SimResult
from ..utils.units import DIESEL_DENSITY_KG_PER_L

MONTHLY_COLUMNS = ["truck", "month", "trips", "distance_km", "fuel_l", "battery_kwh", "failed_trips"]


def monthly_consumption(results: Iterable[SimResult], months: Iterable[int] | None = None) -> pd.DataFrame:
    """Sum per (truck, month). Months listed in `months` but never driven show as zero rows."""
    rows = []
    for r in results:
        t = r.totals
        rows.append(
            {
                "truck": r.metadata.get("truck") or "fleet",
                "month": int(r.metadata.get("month") or 0),
                "trips": 1,
                "distance_km": t.distance_km,
                "fuel_l": t.fuel_kg / DIESEL_DENSITY_KG_PER_L,
                "battery_kwh": t.battery_kwh,
                "failed_trips": int(t.status != "ok"),
            }
        )
    df = pd.DataFrame(rows, columns=MONTHLY_COLUMNS)
    out = df.groupby(["truck", "month"], sort=True).sum().reset_index()
    if months is not None:
        trucks = sorted(out["truck"].unique()) or ["fleet"]
        full = pd.MultiIndex.from_product([trucks, sorted(set(months))], names=["truck", "month"])
        out = out.set_index(["truck", "month"]).reindex(full, fill_value=0).reset_index()
    return out[MONTHLY_COLUMNS]


def fleet_distribution(monthly: pd.DataFrame, column: str) -> pd.DataFrame:
    """Spread of a monthly total across trucks, per month."""
    stats = monthly.groupby("month")[column].agg(["count", "mean", "std", "min", "median", "max"])
    stats["std"] = stats["std"].fillna(0.0)
    return stats.reset_index()
