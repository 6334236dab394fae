"""Route files (CSV or JSON) to validated RouteProfile, plus synthetic and transformed routes."""
from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..exceptions import ScenarioValidationError
from ..models.route import MAX_ABS_GRADE, RoutePoint, RouteProfile
from ..utils.geo import bearing_deg, offset_point
from ..utils.tables import read_metadata

log = logging.getLogger(__name__)

REQUIRED = ["lat", "lon", "s_m", "v_lim_mps", "z_m"]


def segment_grades(s: np.ndarray, z: np.ndarray, route_id: str = "?") -> np.ndarray:
    """Grade of the segment leaving each point; the last point repeats the one before it."""
    g = np.diff(z) / np.diff(s)
    g = np.append(g, g[-1])
    bad = np.abs(g) > MAX_ABS_GRADE
    if bad.any():
        log.warning(
            "route %s: %d segment(s) steeper than %.2f clamped (first at row %d)",
            route_id, int(bad.sum()), MAX_ABS_GRADE, int(np.argmax(bad)) + 1,
        )
        g = np.clip(g, -MAX_ABS_GRADE, MAX_ABS_GRADE)
    return g


def segment_headings(lat: np.ndarray, lon: np.ndarray) -> np.ndarray:
    h = bearing_deg(lat[:-1], lon[:-1], lat[1:], lon[1:])
    return np.append(h, h[-1]) % 360.0


def route_from_frame(
    df: pd.DataFrame,
    route_id: str,
    direction: str = "outbound",
    month: int = 1,
) -> RouteProfile:
    """Validate a point table row by row; errors name the 1-based data row."""
    missing = [c for c in REQUIRED if c not in df.columns]
    if missing:
        raise ScenarioValidationError(f"route {route_id}: missing columns {missing}")
    if len(df) < 2:
        raise ScenarioValidationError(f"route {route_id}: at least 2 points required")
    df = df.reset_index(drop=True)
    for col in REQUIRED:
        bad = df[col].isna() | ~np.isfinite(pd.to_numeric(df[col], errors="coerce"))
        if bad.any():
            raise ScenarioValidationError(
                f"route {route_id}: bad {col}", record=int(np.argmax(bad.to_numpy())) + 1
            )
    s = df["s_m"].to_numpy(dtype=float)
    step = np.diff(s)
    if np.any(step <= 0):
        row = int(np.argmax(step <= 0)) + 2
        raise ScenarioValidationError(f"route {route_id}: distance not increasing", record=row)
    v_lim = df["v_lim_mps"].to_numpy(dtype=float)
    if np.any(v_lim <= 0):
        raise ScenarioValidationError(
            f"route {route_id}: speed limit must be positive", record=int(np.argmax(v_lim <= 0)) + 1
        )
    lat = df["lat"].to_numpy(dtype=float)
    lon = df["lon"].to_numpy(dtype=float)
    z = df["z_m"].to_numpy(dtype=float)
    if "heading_deg" in df.columns and df["heading_deg"].notna().all():
        heading = df["heading_deg"].to_numpy(dtype=float) % 360.0
    else:
        heading = segment_headings(lat, lon)
    grade = segment_grades(s, z, route_id)
    points = [
        RoutePoint(lat=lat[i], lon=lon[i], s=s[i], v_lim=v_lim[i], z=z[i], heading=heading[i], grade=grade[i])
        for i in range(len(s))
    ]
    try:
        return RouteProfile(id=route_id, direction=direction, month=month, points=points)
    except ValidationError as e:
        raise ScenarioValidationError(f"route {route_id}: {e.errors()[0]['msg']}") from e


def load_route(
    path: str | Path,
    *,
    route_id: str | None = None,
    direction: str | None = None,
    month: int | None = None,
) -> RouteProfile:
    """CSV with optional `# id=`, `# direction=`, `# month=` header lines, or JSON (array or object)."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".json":
            raw = json.loads(path.read_text())
            meta = {} if isinstance(raw, list) else {k: v for k, v in raw.items() if k != "points"}
            df = pd.DataFrame(raw if isinstance(raw, list) else raw.get("points", []))
        else:
            meta = read_metadata(path)
            df = pd.read_csv(path, comment="#")
    except (OSError, ValueError) as e:
        raise ScenarioValidationError(f"cannot parse route file {path}: {e}") from e
    return route_from_frame(
        df,
        route_id=route_id or str(meta.get("id", path.stem)),
        direction=direction or str(meta.get("direction", "outbound")),
        month=month or int(meta.get("month", 1)),
    )


def route_frame(route: RouteProfile) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "lat": [p.lat for p in route.points],
            "lon": [p.lon for p in route.points],
            "s_m": route.distances,
            "v_lim_mps": route.speed_limits,
            "z_m": route.elevations,
            "heading_deg": route.headings,
        }
    )


def save_route(route: RouteProfile, path: str | Path) -> None:
    path = Path(path)
    header = f"# id={route.id}\n# direction={route.direction}\n# month={route.month}\n"
    path.write_text(header + route_frame(route).to_csv(index=False))


def straight_route(
    route_id: str,
    length_m: float,
    v_lim: float,
    *,
    grade: float = 0.0,
    spacing_m: float = 1000.0,
    lat: float = 33.75,
    lon: float = -118.25,
    heading: float = 90.0,
    direction: str = "outbound",
    month: int = 1,
) -> RouteProfile:
    """Constant-grade, constant-limit road on a fixed heading (track tests, sweeps)."""
    n = max(int(np.ceil(length_m / spacing_m)), 1)
    s = np.linspace(0.0, length_m, n + 1)
    pts = [offset_point(lat, lon, heading, d) for d in s]
    df = pd.DataFrame(
        {
            "lat": [p[0] for p in pts],
            "lon": [p[1] for p in pts],
            "s_m": s,
            "v_lim_mps": v_lim,
            "z_m": grade * s,
            "heading_deg": heading,
        }
    )
    return route_from_frame(df, route_id, direction, month)


def reverse_route(route: RouteProfile, route_id: str | None = None) -> RouteProfile:
    """The same road driven the other way (inbound <-> outbound)."""
    df = route_frame(route).iloc[::-1].reset_index(drop=True)
    df["s_m"] = route.points[-1].s - df["s_m"]
    df = df.drop(columns="heading_deg")
    other = "inbound" if route.direction == "outbound" else "outbound"
    return route_from_frame(df, route_id or f"{route.id}-rev", other, route.month)


def scale_route(route: RouteProfile, *, speed_limit: float = 1.0, grade: float = 1.0) -> RouteProfile:
    """Speed limits and elevation deltas scaled about the route start."""
    if speed_limit == 1.0 and grade == 1.0:
        return route
    df = route_frame(route)
    df["v_lim_mps"] = df["v_lim_mps"] * speed_limit
    df["z_m"] = df["z_m"].iloc[0] + (df["z_m"] - df["z_m"].iloc[0]) * grade
    return route_from_frame(df, route.id, route.direction, route.month)
