"""Duty-cycle auxiliary loads; ambient-dependent duty for HVAC and air-brake compressors."""
from __future__ import annotations

import math

import numpy as np

from ..models.vehicle import AmbientLoadCurve, AuxComponentSpec, VehicleConfig
from ..utils.units import KELVIN, rad_s_to_rpm


def duty_from_ambient(load_target: float, p_on: float) -> float:
    """Duty whose time-average equals the target load."""
    if p_on <= 0:
        raise ValueError("on-power must be positive")
    return min(max(load_target / p_on, 0.0), 1.0)


def ambient_load(curve: AmbientLoadCurve, t_amb: float) -> float:
    """Target average load (W) at ambient `t_amb` (K)."""
    return float(np.interp(t_amb - KELVIN, curve.temps_c, curve.loads_w))


def on_power(comp: AuxComponentSpec, speed_knots: list[float], rpm: float | None) -> float:
    if comp.power is not None:
        return comp.power
    if rpm is None:
        raise ValueError(f"{comp.name} needs engine speed")
    # clamped at the table ends
    return float(np.interp(rpm, speed_knots, comp.power_by_speed))


def component_duty(comp: AuxComponentSpec, vehicle: VehicleConfig, t_amb: float) -> float:
    if comp.duty_source == "continuous":
        return 1.0
    if comp.duty_source == "fixed":
        return float(comp.duty)
    target = ambient_load(vehicle.ambient_curves[comp.ambient_curve], t_amb)
    p_ref = on_power(comp, vehicle.aux_speed_rpm, comp.reference_rpm)
    return duty_from_ambient(target, p_ref)


def is_on(t: float, period: float | None, duty: float) -> bool:
    """On for the first duty*period seconds of every period, phase zero at t = 0."""
    if period is None or duty >= 1.0:
        return True
    if duty <= 0.0:
        return False
    return math.fmod(t, period) < duty * period


def aux_power_at(
    t: float,
    vehicle: VehicleConfig,
    t_amb: float,
    omega_eng: float | None = None,
    extra: dict[str, float] | None = None,
) -> dict[str, float]:
    """Instantaneous power per component (W) plus `"total"`.

    `extra` carries loads owned elsewhere (the BTMS heater/chiller) so the ledger lives in one place.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    rpm = rad_s_to_rpm(omega_eng) if omega_eng is not None else None
    out: dict[str, float] = {}
    total = 0.0
    for comp in vehicle.aux:
        duty = component_duty(comp, vehicle, t_amb)
        if is_on(t, comp.period, duty):
            p = on_power(comp, vehicle.aux_speed_rpm, rpm) * vehicle.aux_scale
        else:
            p = 0.0
        out[comp.name] = p
        total += p
    for name, p in (extra or {}).items():
        out[name] = p
        total += p
    out["total"] = total
    return out


def average_aux_power(vehicle: VehicleConfig, t_amb: float, rpm: float | None = None) -> dict[str, float]:
    """Time-averaged power per component over whole periods."""
    out: dict[str, float] = {}
    for comp in vehicle.aux:
        p = on_power(comp, vehicle.aux_speed_rpm, rpm if rpm is not None else comp.reference_rpm)
        out[comp.name] = component_duty(comp, vehicle, t_amb) * p * vehicle.aux_scale
    out["total"] = sum(out.values())
    return out


def diesel_aux_torque(p_total: float, omega_eng: float) -> float:
    """Extra crank torque that drives the mechanical accessories."""
    if omega_eng <= 0:
        if p_total > 0:
            raise ValueError("accessory load with the engine stopped; the engine must idle")
        return 0.0
    return p_total / omega_eng
