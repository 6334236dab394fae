"""Representative route temperature and the cold / nominal / hot day of a month."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..models.weather import CityTemperatureTable


def representative_route_temperature(temps: Sequence[float]) -> float:
    """Root-mean-square of the city temperatures (K)."""
    arr = np.asarray(temps, dtype=float)
    if arr.size == 0:
        raise ValueError("no city temperatures")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite city temperature")
    return float(np.sqrt(np.mean(arr * arr)))


def daily_representatives(table: CityTemperatureTable) -> np.ndarray:
    arr = table.array
    return np.sqrt(np.mean(arr * arr, axis=1))


def select_day_types(table: CityTemperatureTable) -> dict[str, int]:
    """1-based day indices; ties go to the earliest day."""
    reps = daily_representatives(table)
    median = float(np.median(reps))
    return {
        "cold": int(np.argmin(reps)) + 1,
        "nominal": int(np.argmin((reps - median) ** 2)) + 1,
        "hot": int(np.argmax(reps)) + 1,
    }


def day_type_dates(table: CityTemperatureTable) -> dict[str, str]:
    """Same selection, reported as the table's day labels."""
    return {kind: table.days[i - 1] for kind, i in select_day_types(table).items()}
