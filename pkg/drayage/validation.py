"""Constant-speed track tests used to check the diesel calibration against measured fuel use."""
from __future__ import annotations

from dataclasses import dataclass

from .models.scenario import Scenario, SimConfig
from .models.vehicle import VehicleConfig
from .scenarios.routes import straight_route
from .scenarios.weather import constant_weather
from .simulator import run
from .utils.units import c_to_k, kmh_to_mps


@dataclass(frozen=True)
class TrackCase:
    name: str
    mass_kg: float
    speed_kmh: float
    distance_km: float
    t_amb_c: float
    rho_a: float
    measured_l_per_100km: float


def validation_cases() -> list[TrackCase]:
    return [
        TrackCase("fall", 24_880.0, 105.0, 100.0, 15.4, 1.245, 35.51),
        TrackCase("winter", 24_880.0, 90.0, 90.0, -6.3, 1.337, 35.90),
    ]


def track_scenario(case: TrackCase, vehicle: VehicleConfig) -> Scenario:
    """Flat, windless track; the posted limit is set so the driver holds the test speed."""
    v_lim = kmh_to_mps(case.speed_kmh) / vehicle.driver.margin
    route = straight_route(f"track-{case.name}", case.distance_km * 1000.0, v_lim)
    weather = constant_weather(route, c_to_k(case.t_amb_c), rho_a=case.rho_a)
    return Scenario(
        id=f"track-{case.name}",
        route=route,
        weather=weather,
        mass=case.mass_kg,
        configuration="tractor_trailer",
    )


def run_validation(vehicle: VehicleConfig, simcfg: SimConfig | None = None) -> dict:
    """Simulated vs measured L/100 km per case, plus the fall-to-winter increase."""
    simcfg = simcfg or SimConfig(record_trace=False)
    out: dict[str, dict] = {}
    for case in validation_cases():
        result = run(track_scenario(case, vehicle), vehicle, simcfg)
        sim = result.totals.l_per_100km
        out[case.name] = {
            "status": result.totals.status,
            "simulated_l_per_100km": sim,
            "measured_l_per_100km": case.measured_l_per_100km,
            "error_pct": None if sim is None else 100.0 * (sim / case.measured_l_per_100km - 1.0),
        }
    fall, winter = out["fall"]["simulated_l_per_100km"], out["winter"]["simulated_l_per_100km"]
    out["winter_increase_pct"] = None if not fall or winter is None else 100.0 * (winter / fall - 1.0)
    return out
