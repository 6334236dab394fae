from __future__ import annotations

import json
from datetime import date as Date
from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from ..exceptions import ScenarioValidationError
from ..models.route import RouteProfile
from ..models.weather import CityTemperatureTable, WeatherSample, WeatherTrace
from ..utils.units import KELVIN, air_density

__all__ = [
    "air_density",
    "attach_weather",
    "constant_weather",
    "load_city_temperatures",
    "load_weather",
    "save_weather",
    "scale_weather",
]


def _sample(raw: dict, i: int) -> WeatherSample:
    try:
        return WeatherSample(
            T_amb=raw["T_amb_K"],
            rho_a=raw.get("rho_a"),
            v_w=raw.get("v_w_mps", 0.0),
            theta_w=raw.get("theta_w_deg", 0.0),
        )
    except (KeyError, ValidationError) as e:
        raise ScenarioValidationError(f"bad weather sample: {e}", record=i + 1) from e


def load_weather(path: str | Path) -> WeatherTrace:
    """JSON `{day_type, date, samples: [{T_amb_K, rho_a?, v_w_mps, theta_w_deg}]}`."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise ScenarioValidationError(f"cannot parse weather file {path}: {e}") from e
    samples = [_sample(s, i) for i, s in enumerate(raw.get("samples", []))]
    try:
        return WeatherTrace(
            day_type=raw.get("day_type", "nominal"),
            date=raw.get("date"),
            samples=samples,
        )
    except ValidationError as e:
        raise ScenarioValidationError(f"weather file {path}: {e.errors()[0]['msg']}") from e


def weather_dict(trace: WeatherTrace) -> dict:
    return {
        "day_type": trace.day_type,
        "date": trace.date.isoformat() if trace.date else None,
        "samples": [
            {"T_amb_K": w.T_amb, "rho_a": w.rho_a, "v_w_mps": w.v_w, "theta_w_deg": w.theta_w}
            for w in trace.samples
        ],
    }


def save_weather(trace: WeatherTrace, path: str | Path) -> None:
    Path(path).write_text(json.dumps(weather_dict(trace), indent=2))


def constant_weather(
    route: RouteProfile,
    T_amb: float,
    *,
    rho_a: float | None = None,
    v_w: float = 0.0,
    theta_w: float = 0.0,
    day_type: str = "nominal",
    date: Date | None = None,
) -> WeatherTrace:
    """Same conditions at every route point."""
    sample = WeatherSample(T_amb=T_amb, rho_a=rho_a, v_w=v_w, theta_w=theta_w)
    return WeatherTrace(day_type=day_type, date=date, samples=[sample] * len(route.points))


def attach_weather(route: RouteProfile, trace: WeatherTrace) -> WeatherTrace:
    """Check the one-sample-per-point rule; a single sample is broadcast along the route."""
    n = len(route.points)
    if len(trace.samples) == n:
        return trace
    if len(trace.samples) == 1:
        return WeatherTrace(day_type=trace.day_type, date=trace.date, samples=trace.samples * n)
    raise ScenarioValidationError(
        f"{len(trace.samples)} weather samples for {n} points", record=route.id
    )


def scale_weather(trace: WeatherTrace, *, temperature: float = 1.0, density: float = 1.0) -> WeatherTrace:
    """Temperature scaled on the Celsius value; density scaled on its effective value."""
    if temperature == 1.0 and density == 1.0:
        return trace
    out = []
    for w in trace.samples:
        t_k = (w.T_amb - KELVIN) * temperature + KELVIN
        out.append(WeatherSample(T_amb=t_k, rho_a=w.density * density, v_w=w.v_w, theta_w=w.theta_w))
    return WeatherTrace(day_type=trace.day_type, date=trace.date, samples=out)


def load_city_temperatures(path: str | Path) -> dict[str, CityTemperatureTable]:
    """CSV rows `(route_id, day, city, T_K)` into one day-by-city table per route."""
    df = pd.read_csv(path, comment="#")
    missing = [c for c in ("route_id", "day", "city", "T_K") if c not in df.columns]
    if missing:
        raise ScenarioValidationError(f"{path}: missing columns {missing}")
    df["route_id"] = df["route_id"].astype(str)
    df["day"] = df["day"].astype(str)
    out: dict[str, CityTemperatureTable] = {}
    for route_id, part in df.groupby("route_id", sort=True):
        cities = list(dict.fromkeys(part["city"]))
        days = _day_order(list(dict.fromkeys(part["day"])))
        grid = part.pivot_table(index="day", columns="city", values="T_K", aggfunc="mean")
        grid = grid.reindex(index=days, columns=cities)
        if grid.isna().any().any():
            raise ScenarioValidationError("city temperature grid has gaps", record=route_id)
        try:
            out[route_id] = CityTemperatureTable(
                route_id=route_id,
                days=list(grid.index),
                cities=cities,
                temps=grid.to_numpy(dtype=float).tolist(),
            )
        except ValidationError as e:
            raise ScenarioValidationError(str(e.errors()[0]["msg"]), record=route_id) from e
    return out


def _day_order(labels: list[str]) -> list[str]:
    """Chronological when every label is a day number or an ISO date, file order otherwise."""
    series = pd.Series(labels)
    key = pd.to_numeric(series, errors="coerce")
    if key.isna().any():
        key = pd.to_datetime(series, errors="coerce", format="ISO8601")
    if key.isna().any():
        return labels
    return [labels[i] for i in key.to_numpy().argsort(kind="stable")]
