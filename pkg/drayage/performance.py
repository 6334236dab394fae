"""Spec-sheet characterization: top speed, acceleration times, gradeability, startability."""
from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel
from scipy.optimize import brentq

from .calibration import VehicleMaps, maps_for
from .models.vehicle import VehicleConfig
from .models.weather import WeatherSample
from .physics import auxiliaries, diesel, electric
from .physics.gearbox import shift_schedule, total_ratio
from .physics.roadload import road_load, stabilized_tire_temperature
from .utils.units import c_to_k, kmh_to_mps, mps_to_kmh, rad_s_to_rpm, rpm_to_rad_s

STARTABILITY_SPEED = kmh_to_mps(8.0)
ACCEL_BANDS_KMH = ((0.0, 48.0), (48.0, 80.0), (80.0, 96.0))
GRADES = (0.01, 0.02, 0.06)


class PerformanceReport(BaseModel):
    vehicle: str
    mass_kg: float
    max_speed_kmh: float
    accel_s: dict[str, float | None]
    gradeability_kmh: dict[str, float | None]
    startability_pct: float
    startability_peak_pct: float | None = None


class _Traction:
    """Full-throttle axle torque per gear, for one vehicle."""

    def __init__(self, vehicle: VehicleConfig, maps: VehicleMaps, t_amb: float) -> None:
        self.vehicle = vehicle
        self.maps = maps
        self.t_amb = t_amb
        if vehicle.is_electric:
            self.gearbox = vehicle.eaxle.gearbox
            self.extra = vehicle.eaxle.wheel_end_ratio
            self.omega_max = rpm_to_rad_s(vehicle.eaxle.max_speed_rpm)
        else:
            self.gearbox = vehicle.diesel.gearbox
            self.extra = 1.0
            self.omega_max = maps.engine.max_speed

    def v_cap(self) -> float:
        """Highest road speed any gear can turn without leaving the map."""
        top = total_ratio(self.gearbox, self.gearbox.n_gears, self.extra)
        return self.omega_max / top * self.vehicle.body.wheel_radius

    def axle_torque(self, v: float, gear: int, peak: bool) -> float | None:
        omega_w = v / self.vehicle.body.wheel_radius
        ratio = total_ratio(self.gearbox, gear, self.extra)
        if omega_w * ratio > self.omega_max:
            return None
        if self.vehicle.is_electric:
            spec = self.vehicle.eaxle
            t = electric.machine_torque_limit(omega_w * ratio, spec, self.maps.motor, peak)
            return spec.n_axles * t * ratio * electric.eaxle_efficiency(spec, gear)
        omega_run = max(omega_w * ratio, self.maps.engine.idle_speed)
        p_aux = auxiliaries.average_aux_power(self.vehicle, self.t_amb, rad_s_to_rpm(omega_run))["total"]
        t_aux = auxiliaries.diesel_aux_torque(p_aux, omega_run)
        return diesel.max_axle_torque(omega_w, gear, t_aux, self.vehicle.diesel, self.maps.engine)


def _resistive(vehicle: VehicleConfig, v: float, grade: float, mass: float, env: WeatherSample,
               configuration: str) -> float:
    t_tire = stabilized_tire_temperature(v, env.T_amb, vehicle.tire)
    rl = road_load(v, 0.0, grade, t_tire, env, vehicle.body, mass, vehicle.aero, vehicle.rolling, configuration)
    return rl.resistive


def _excess_force(tr: _Traction, v, grade, mass, env, configuration, peak=False) -> float:
    """Best-gear traction surplus; -inf when every gear is over speed."""
    best = -math.inf
    for gear in range(1, tr.gearbox.n_gears + 1):
        t = tr.axle_torque(v, gear, peak)
        if t is not None:
            best = max(best, t / tr.vehicle.body.wheel_radius)
    if best == -math.inf:
        return best
    return best - _resistive(tr.vehicle, v, grade, mass, env, configuration)


def _equilibrium_speed(tr: _Traction, grade, mass, env, configuration) -> float | None:
    """Highest speed where traction still balances the road load at `grade`."""
    v_cap = tr.v_cap() * (1.0 - 1e-9)

    def f(v: float) -> float:
        return _excess_force(tr, v, grade, mass, env, configuration)

    if f(v_cap) >= 0:
        return v_cap
    grid = np.arange(v_cap, 0.5, -0.5)
    for hi, lo in zip(grid, grid[1:]):
        if f(lo) >= 0:
            return brentq(f, lo, hi, xtol=1e-4)
    return None


def _startability(tr: _Traction, mass, env, configuration, peak: bool) -> float:
    """Steepest grade (%) on which the truck still holds 8 km/h in first."""
    v = STARTABILITY_SPEED
    force = tr.axle_torque(v, 1, peak) / tr.vehicle.body.wheel_radius

    def f(grade: float) -> float:
        return force - _resistive(tr.vehicle, v, grade, mass, env, configuration)

    if f(0.0) <= 0:
        return 0.0
    hi = 1.0
    while f(hi) > 0 and hi < 100.0:
        hi *= 2.0
    return 100.0 * brentq(f, 0.0, hi, xtol=1e-6)


def _acceleration_times(tr: _Traction, mass, env, configuration, dt=0.1, t_max=300.0) -> dict[str, float | None]:
    """Full-throttle launch on the flat with the normal shift schedule."""
    vehicle = tr.vehicle
    m_eq = vehicle.body.equivalent_mass(mass)
    r_w = vehicle.body.wheel_radius
    peak_limit = vehicle.eaxle.peak_duration if vehicle.is_electric else math.inf
    marks = sorted({kmh_to_mps(x) for band in ACCEL_BANDS_KMH for x in band if x > 0})
    crossed: dict[float, float] = {0.0: 0.0}
    t, v, gear, since, peak_timer = 0.0, 0.0, 1, math.inf, 0.0
    while t < t_max and len(crossed) <= len(marks):
        new = shift_schedule(v / r_w, gear, tr.gearbox, since, tr.extra, tr.omega_max)
        if new != gear:
            gear, since = new, 0.0
        torque = tr.axle_torque(v, gear, peak_timer < peak_limit)
        if torque is None:
            break
        if vehicle.is_electric and torque > (tr.axle_torque(v, gear, False) or 0.0):
            peak_timer += dt
        a = (torque / r_w - _resistive(vehicle, v, 0.0, mass, env, configuration)) / m_eq
        if a <= 0:
            break
        v_next = v + a * dt
        for m in marks:
            if m not in crossed and v < m <= v_next:
                crossed[m] = t + dt * (m - v) / (v_next - v)
        v, t, since = v_next, t + dt, since + dt
    out: dict[str, float | None] = {}
    for lo, hi in ACCEL_BANDS_KMH:
        a_t = crossed.get(kmh_to_mps(lo) if lo > 0 else 0.0)
        b_t = crossed.get(kmh_to_mps(hi))
        out[f"{lo:.0f}-{hi:.0f}"] = None if a_t is None or b_t is None else b_t - a_t
    return out


def performance_characterize(
    vehicle: VehicleConfig,
    mass: float = 27_200.0,
    t_amb: float = c_to_k(25.0),
    configuration: str = "tractor_trailer",
) -> PerformanceReport:
    """Table-style performance figures at a fixed gross mass and ambient."""
    maps = maps_for(vehicle)
    env = WeatherSample(T_amb=t_amb)
    tr = _Traction(vehicle, maps, t_amb)
    v_max = _equilibrium_speed(tr, 0.0, mass, env, configuration)
    grades = {}
    for g in GRADES:
        v = _equilibrium_speed(tr, g, mass, env, configuration)
        grades[f"{g * 100:.0f}%"] = None if v is None else mps_to_kmh(v)
    return PerformanceReport(
        vehicle=vehicle.name,
        mass_kg=mass,
        max_speed_kmh=mps_to_kmh(v_max or 0.0),
        accel_s=_acceleration_times(tr, mass, env, configuration),
        gradeability_kmh=grades,
        startability_pct=_startability(tr, mass, env, configuration, peak=False),
        startability_peak_pct=(
            _startability(tr, mass, env, configuration, peak=True) if vehicle.is_electric else None
        ),
    )
