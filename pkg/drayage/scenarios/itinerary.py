"""Monthly itineraries: routes, weather and cargo sampled until the mileage target is met."""
from __future__ import annotations

import logging
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .. import config
from ..models.route import RouteProfile
from ..models.scenario import Scenario
from ..models.vehicle import VehicleConfig
from ..models.weather import WeatherTrace

log = logging.getLogger(__name__)

MAX_MASS_DRAWS = 50


def _feasible(masses: np.ndarray, vehicle: VehicleConfig | None) -> np.ndarray:
    if vehicle is None:
        return masses
    ok = (masses >= vehicle.body.curb_mass) & (masses <= vehicle.body.max_gross_mass)
    return masses[ok]


def build_itinerary(
    routes: Sequence[RouteProfile],
    weights: Sequence[float] | None,
    weather_pool: Mapping[str, Sequence[WeatherTrace]],
    monthly_vmt_target: float,
    seed: int | Sequence[int],
    *,
    masses: Sequence[float],
    vehicle: VehicleConfig | None = None,
    month: int = 1,
    truck: str = "truck-01",
    configuration: str = "tractor_trailer",
    groups: Mapping[str, int] | None = None,
) -> list[Scenario]:
    """Scenarios in driving order; total distance first reaches `monthly_vmt_target` km."""
    if monthly_vmt_target <= 0:
        raise ValueError("monthly distance target must be positive")
    if not routes:
        raise ValueError("empty route pool")
    pool = _feasible(np.asarray(masses, dtype=float), vehicle)
    if pool.size == 0:
        raise ValueError("no cargo mass in the pool is feasible for this vehicle")
    rejected = len(masses) - pool.size
    if rejected:
        log.warning("%s month %d: %d of %d masses infeasible for %s", truck, month, rejected,
                    len(masses), vehicle.name if vehicle else "vehicle")
    for r in routes:
        if not weather_pool.get(r.id):
            raise ValueError(f"no weather for route {r.id}")

    p = None
    if weights is not None:
        w = np.asarray(weights, dtype=float)
        if w.shape != (len(routes),) or np.any(w < 0) or w.sum() <= 0:
            raise ValueError("route weights must be non-negative, one per route, not all zero")
        p = w / w.sum()

    rng = np.random.default_rng(seed)
    out: list[Scenario] = []
    total_km = 0.0
    while total_km < monthly_vmt_target:
        route = routes[int(rng.choice(len(routes), p=p))]
        traces = weather_pool[route.id]
        weather = traces[int(rng.integers(len(traces)))]
        mass = float(pool[int(rng.integers(pool.size))])
        out.append(
            Scenario(
                id=f"{truck}-m{month:02d}-{len(out) + 1:03d}-{route.id}-{weather.day_type}",
                route=route,
                weather=weather,
                mass=mass,
                configuration=configuration,
                group=(groups or {}).get(route.id),
                truck=truck,
            )
        )
        total_km += route.length_km
    return out


def build_fleet_itineraries(
    routes: Sequence[RouteProfile],
    weights: Sequence[float] | None,
    weather_by_month: Mapping[int, Mapping[str, Sequence[WeatherTrace]]],
    *,
    masses: Sequence[float],
    vehicle: VehicleConfig | None = None,
    trucks: int = config.FLEET_SIZE,
    months: Iterable[int] = range(1, 13),
    monthly_vmt_target: float = config.MONTHLY_VMT_KM,
    seed: int = config.SEED,
    groups: Mapping[str, int] | None = None,
) -> dict[tuple[str, int], list[Scenario]]:
    """One itinerary per truck-month, each seeded by (seed, truck, month)."""
    out: dict[tuple[str, int], list[Scenario]] = {}
    for n in range(1, trucks + 1):
        truck = f"truck-{n:02d}"
        for month in months:
            out[(truck, month)] = build_itinerary(
                routes,
                weights,
                weather_by_month[month],
                monthly_vmt_target,
                [seed, n, month],
                masses=masses,
                vehicle=vehicle,
                month=month,
                truck=truck,
                groups=groups,
            )
    return out
