"""Resistive forces at the wheels, wind yaw, drag table and tire-temperature-dependent rolling."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..models.vehicle import AeroParams, BodyParams, RollingParams, TireThermalParams
from ..models.weather import WeatherSample
from ..utils.units import G, KELVIN


@dataclass(frozen=True, slots=True)
class RoadLoad:
    f_aero: float
    f_roll: float
    f_grade: float
    f_inertial: float
    wheel_torque: float
    wheel_speed: float

    @property
    def total(self) -> float:
        return self.f_aero + self.f_roll + self.f_grade + self.f_inertial

    @property
    def resistive(self) -> float:
        return self.f_aero + self.f_roll + self.f_grade


def yaw_angle(v: float, v_w: float, theta_w: float, theta_h: float) -> float:
    """Apparent-wind yaw in degrees, [0, 180]. Zero for no motion and no wind."""
    if v_w == 0.0:
        return 0.0
    rel = math.radians(theta_w - theta_h)
    return abs(math.degrees(math.atan2(v_w * math.sin(rel), v + v_w * math.cos(rel))))


def drag_coefficient(aero: AeroParams, configuration: str, psi: float) -> float:
    """Linear in yaw, clamped at the table edges."""
    try:
        table = aero.cd[configuration]
    except KeyError:
        raise ValueError(f"unknown truck configuration {configuration!r}") from None
    return float(np.interp(psi, aero.yaw_deg, table))


def yaw_averaged_drag(aero: AeroParams, configuration: str, yaw_max: float = 6.0) -> float:
    """Mean of C_d at zero and `yaw_max` degrees."""
    return 0.5 * (drag_coefficient(aero, configuration, 0.0) + drag_coefficient(aero, configuration, yaw_max))


def temperature_shift(v: float, p: RollingParams) -> float:
    # as printed: evaluates to 2*shift_high - shift_zero at v = 0
    logistic = 2.0 - 2.0 / (1.0 + math.exp(-v / p.shift_speed))
    return p.shift_high - (p.shift_zero - p.shift_high) * logistic


def rolling_coefficient(t_tire: float, v: float, p: RollingParams) -> float:
    """Master rolling-resistance curve. `t_tire` in K, converted to the calibration unit."""
    t_cal = t_tire - KELVIN if p.temperature_unit == "C" else t_tire
    effective = t_cal + temperature_shift(v, p)
    return p.scale * (p.crr_h + (p.crr_0 - p.crr_h) * math.exp(-effective / p.decay_temp))


def tire_time_constant(v: float, p: TireThermalParams) -> float:
    return p.tau_h + (p.tau_0 - p.tau_h) * math.exp(-v / p.tau_speed)


def stabilized_tire_temperature(v: float, t_amb: float, p: TireThermalParams) -> float:
    return p.k * v + p.n - (p.n - p.t_ref) * math.exp(-v / p.speed_scale) - (p.t_ref - t_amb)


def tire_temperature_derivative(t_tire: float, v: float, t_amb: float, p: TireThermalParams) -> float:
    return -(t_tire - stabilized_tire_temperature(v, t_amb, p)) / tire_time_constant(v, p)


def road_load(
    v: float,
    dv_dt: float,
    grade: float,
    t_tire: float,
    env: WeatherSample,
    body: BodyParams,
    mass: float,
    aero: AeroParams,
    rolling: RollingParams,
    configuration: str,
    *,
    heading: float = 0.0,
    traction_requested: bool = True,
) -> RoadLoad:
    """Resistive force breakdown; `grade` is rise over run."""
    alpha = math.atan(grade)
    psi = yaw_angle(v, env.v_w, env.theta_w, heading)
    cd = drag_coefficient(aero, configuration, psi)
    f_aero = 0.5 * env.density * cd * aero.frontal_area * v * v
    if v <= 0.0 and not traction_requested:
        # static friction holds a parked truck
        f_roll = 0.0
        f_grade = 0.0
    else:
        f_roll = mass * G * rolling_coefficient(t_tire, v, rolling) * math.cos(alpha)
        f_grade = mass * G * math.sin(alpha)
    f_inertial = body.equivalent_mass(mass) * dv_dt
    total = f_aero + f_roll + f_grade + f_inertial
    return RoadLoad(
        f_aero=f_aero,
        f_roll=f_roll,
        f_grade=f_grade,
        f_inertial=f_inertial,
        wheel_torque=total * body.wheel_radius,
        wheel_speed=v / body.wheel_radius,
    )
