"""Synthetic port-centred dataset with the same schema as the real inputs.

Routes fan out inland from one port, climb toward their destinations and carry
urban/highway speed limits. Daily city temperatures follow a seasonal cycle with
day-to-day noise; the cold, nominal and hot day of each month are picked from
them and turned into per-point weather traces.
"""
from __future__ import annotations

import calendar
import json
import math
from dataclasses import dataclass, field
from datetime import date as Date
from pathlib import Path

import numpy as np
import pandas as pd

from .. import config
from ..models.route import RouteProfile
from ..models.scenario import Scenario
from ..models.weather import CityTemperatureTable, WeatherSample, WeatherTrace
from ..utils.geo import offset_point
from ..utils.units import KELVIN, P_ATM, R_DRY_AIR
from .daytypes import select_day_types
from .routes import load_route, reverse_route, route_from_frame, save_route
from .weather import load_weather, save_weather

PORT = (33.754, -118.216)
LAPSE_K_PER_M = 0.0065
SCALE_HEIGHT_M = 8_400.0
URBAN_MPS = 15.6
ARTERIAL_MPS = 24.6
HIGHWAY_MPS = 29.1
DEMO_YEAR = 2023


@dataclass
class DemoDataset:
    routes: list[RouteProfile]
    weather_by_month: dict[int, dict[str, list[WeatherTrace]]]
    city_temperatures: pd.DataFrame
    port: tuple[float, float] = PORT
    weights: list[float] = field(default_factory=list)

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        (out / "routes").mkdir(parents=True, exist_ok=True)
        (out / "weather").mkdir(parents=True, exist_ok=True)
        for r in self.routes:
            save_route(r, out / "routes" / f"{r.id}.csv")
        for month, by_route in sorted(self.weather_by_month.items()):
            for route_id, traces in sorted(by_route.items()):
                for tr in traces:
                    save_weather(tr, out / "weather" / f"{route_id}_m{month:02d}_{tr.day_type}.json")
        self.city_temperatures.to_csv(out / "city_temperatures.csv", index=False)
        manifest = {
            "port": list(self.port),
            "routes": [r.id for r in self.routes],
            "weights": self.weights,
            "months": sorted(self.weather_by_month),
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
        return out

    def scenarios(
        self,
        mass: float,
        *,
        months: list[int] | None = None,
        day_types: tuple[str, ...] = ("cold", "nominal", "hot"),
        configuration: str = "tractor_trailer",
        groups: dict[str, int] | None = None,
    ) -> list[Scenario]:
        """Every route x month x day type at one gross mass."""
        out = []
        for month in months or sorted(self.weather_by_month):
            for r in self.routes:
                for trace in self.weather_by_month[month][r.id]:
                    if trace.day_type not in day_types:
                        continue
                    out.append(
                        Scenario(
                            id=f"{r.id}-m{month:02d}-{trace.day_type}",
                            route=r,
                            weather=trace,
                            mass=mass,
                            configuration=configuration,
                            group=(groups or {}).get(r.id),
                        )
                    )
        return out


def _seasonal_c(month: int) -> float:
    """Coastal daily-mean temperature, coldest in January."""
    return 12.0 - 11.0 * math.cos(2.0 * math.pi * (month - 1) / 12.0)


def _outbound_route(idx: int, rng: np.random.Generator, spacing: float) -> RouteProfile:
    length = float(rng.uniform(15_000.0, 380_000.0))
    bearing = float(rng.uniform(0.0, 150.0))
    climb = float(rng.uniform(0.0, 0.0035)) * length
    n = max(int(math.ceil(length / spacing)), 2)
    s = np.linspace(0.0, length, n + 1)
    # hills on top of a steady climb, grades stay mild
    waves = rng.uniform(5.0, 25.0) * np.sin(2.0 * math.pi * s / rng.uniform(4_000.0, 12_000.0))
    z = 5.0 + climb * s / length + waves - waves[0]
    z = np.maximum(z, 0.0)
    v_lim = np.full(s.shape, HIGHWAY_MPS)
    v_lim[s < 4_000.0] = URBAN_MPS
    v_lim[(s >= 4_000.0) & (s < 12_000.0)] = ARTERIAL_MPS
    v_lim[s > length - 3_000.0] = URBAN_MPS
    # bearing drifts a little so headings vary
    heading = (bearing + 10.0 * np.sin(s / 25_000.0)) % 360.0
    lat, lon = [PORT[0]], [PORT[1]]
    for i in range(1, len(s)):
        la, lo = offset_point(lat[-1], lon[-1], heading[i - 1], s[i] - s[i - 1])
        lat.append(la)
        lon.append(lo)
    df = pd.DataFrame({"lat": lat, "lon": lon, "s_m": s, "v_lim_mps": v_lim, "z_m": z})
    return route_from_frame(df, f"R{idx:03d}-out", "outbound", 1)


def _city_rows(route: RouteProfile, month: int, rng: np.random.Generator) -> list[dict]:
    """Port city, a midpoint town and the destination, every day of the month."""
    days = calendar.monthrange(DEMO_YEAR, month)[1]
    stops = {"port": 0.0, "midway": 0.5, "destination": 1.0}
    base = _seasonal_c(month)
    inland = 6.0 * (route.length_km / 400.0) * (1.0 if month in (6, 7, 8, 9) else -1.0)
    rows = []
    for d in range(1, days + 1):
        swing = float(rng.normal(0.0, 4.5))
        for city, frac in stops.items():
            s = route.start + frac * route.length_m
            z = float(np.interp(s, route.distances, route.elevations))
            t_c = base + swing + frac * inland - LAPSE_K_PER_M * z + float(rng.normal(0.0, 0.8))
            rows.append(
                {
                    "route_id": route.id.rsplit("-", 1)[0],
                    "day": f"{DEMO_YEAR}-{month:02d}-{d:02d}",
                    "city": city,
                    "T_K": round(t_c + KELVIN, 3),
                    "frac": frac,
                }
            )
    return rows


def _trace_for(route: RouteProfile, frac_temps: dict[float, float], day: str, kind: str,
               rng: np.random.Generator) -> WeatherTrace:
    """Temperatures interpolated along the trip from the city values; wind fixed for the day."""
    fracs = sorted(frac_temps)
    temps = [frac_temps[f] for f in fracs]
    out_frac = (route.distances - route.start) / route.length_m
    if route.direction == "inbound":
        out_frac = 1.0 - out_frac
    v_w = float(rng.uniform(0.0, 6.0))
    theta_w = float(rng.uniform(0.0, 360.0))
    samples = []
    for f, z in zip(out_frac, route.elevations):
        t_k = float(np.interp(f, fracs, temps))
        rho = P_ATM * math.exp(-z / SCALE_HEIGHT_M) / (R_DRY_AIR * t_k)
        samples.append(WeatherSample(T_amb=t_k, rho_a=min(max(rho, 0.9), 1.5), v_w=v_w, theta_w=theta_w))
    return WeatherTrace(day_type=kind, date=Date.fromisoformat(day), samples=samples)


def make_demo_dataset(
    n_destinations: int = 20,
    seed: int = config.SEED,
    months: list[int] | None = None,
    spacing_m: float = 500.0,
) -> DemoDataset:
    """Inbound/outbound pairs to `n_destinations` places, with weather for each month."""
    if n_destinations < 1:
        raise ValueError("need at least one destination")
    months = months or list(range(1, 13))
    rng = np.random.default_rng(seed)
    routes: list[RouteProfile] = []
    for i in range(1, n_destinations + 1):
        out = _outbound_route(i, rng, spacing_m)
        routes.append(out)
        routes.append(reverse_route(out, f"R{i:03d}-in"))

    rows: list[dict] = []
    weather_by_month: dict[int, dict[str, list[WeatherTrace]]] = {}
    for month in months:
        by_route: dict[str, list[WeatherTrace]] = {}
        for out in routes[::2]:
            month_rows = _city_rows(out, month, rng)
            rows.extend(month_rows)
            frame = pd.DataFrame(month_rows)
            grid = frame.pivot_table(index="day", columns="frac", values="T_K").sort_index()
            pair = [out, next(r for r in routes if r.id == out.id.replace("-out", "-in"))]
            for r in pair:
                by_route[r.id] = []
            for kind, day_idx in _day_types(frame).items():
                day = grid.index[day_idx - 1]
                frac_temps = {float(f): float(t) for f, t in grid.loc[day].items()}
                for r in pair:
                    by_route[r.id].append(_trace_for(r, frac_temps, day, kind, rng))
        weather_by_month[month] = by_route

    city = pd.DataFrame(rows).drop(columns="frac")
    # nearer destinations are visited more often
    weights = [1.0 / (1.0 + r.length_km / 100.0) for r in routes]
    return DemoDataset(routes=routes, weather_by_month=weather_by_month, city_temperatures=city, weights=weights)


def _day_types(frame: pd.DataFrame) -> dict[str, int]:
    grid = frame.pivot_table(index="day", columns="city", values="T_K").sort_index()
    table = CityTemperatureTable(
        route_id=str(frame["route_id"].iloc[0]),
        days=[str(d) for d in grid.index],
        cities=[str(c) for c in grid.columns],
        temps=grid.to_numpy(dtype=float).tolist(),
    )
    return select_day_types(table)


def load_demo_dataset(path: str | Path) -> DemoDataset:
    """Read back what `DemoDataset.write` produced."""
    root = Path(path)
    manifest = json.loads((root / "manifest.json").read_text())
    routes = [load_route(root / "routes" / f"{rid}.csv") for rid in manifest["routes"]]
    weather_by_month: dict[int, dict[str, list[WeatherTrace]]] = {}
    for month in manifest["months"]:
        weather_by_month[month] = {
            r.id: [
                load_weather(root / "weather" / f"{r.id}_m{month:02d}_{kind}.json")
                for kind in ("cold", "nominal", "hot")
            ]
            for r in routes
        }
    city = pd.read_csv(root / "city_temperatures.csv")
    return DemoDataset(
        routes=routes,
        weather_by_month=weather_by_month,
        city_temperatures=city,
        port=tuple(manifest["port"]),
        weights=manifest["weights"],
    )

