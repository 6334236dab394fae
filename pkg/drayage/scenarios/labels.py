from __future__ import annotations

SEASONS = {
    12: "winter", 1: "winter", 2: "winter",
    3: "spring", 4: "spring", 5: "spring",
    6: "summer", 7: "summer", 8: "summer",
    9: "fall", 10: "fall", 11: "fall",
}

# (label, upper bound km); the last band is open
DISTANCE_BANDS = (("<80", 80.0), ("80-240", 240.0), ("240-400", 400.0), (">=400", float("inf")))


def season_of(month: int) -> str:
    try:
        return SEASONS[int(month)]
    except KeyError:
        raise ValueError(f"month {month} outside 1..12") from None


def distance_band(km: float) -> str:
    if km < 0:
        raise ValueError("negative distance")
    for label, upper in DISTANCE_BANDS:
        if km < upper:
            return label
    return DISTANCE_BANDS[-1][0]
