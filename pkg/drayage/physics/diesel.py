"""Quasi-static diesel driveline: AMT gear choice, engine operating point, fuel map."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..exceptions import OverSpeedError
from ..models.vehicle import DieselDriveline, GearboxSpec
from ..utils.tables import bilinear, read_grid, read_table
from ..utils.units import rpm_to_rad_s
from .gearbox import gear_loss, shift_schedule, total_efficiency, total_ratio

log = logging.getLogger(__name__)


class EngineMap:
    """Fuel-rate grid (kg/s) over engine speed and torque, plus the full-load torque curve."""

    def __init__(
        self,
        speeds: np.ndarray,
        torques: np.ndarray,
        fuel: np.ndarray,
        curve_speeds: np.ndarray,
        curve_torques: np.ndarray,
        idle_speed: float,
    ) -> None:
        if np.any(fuel < 0):
            raise ValueError("fuel map has negative cells")
        if np.any(np.diff(fuel, axis=1) < 0):
            raise ValueError("fuel rate must not decrease with torque at fixed speed")
        if np.any(curve_torques < 0):
            raise ValueError("negative full-load torque")
        self.speeds = speeds
        self.torques = torques
        self.fuel_grid = fuel
        self.curve_speeds = curve_speeds
        self.curve_torques = curve_torques
        self.idle_speed = idle_speed
        self._lookup = (speeds.tolist(), torques.tolist(), fuel.tolist())
        self._clamp_warned = False

    @classmethod
    def from_files(cls, fuel_map: str | Path, torque_curve: str | Path, idle_rpm: float) -> "EngineMap":
        _, rpm, torque, fuel = read_grid(fuel_map)
        curve = read_table(torque_curve, ["speed_rpm", "max_torque_nm"])
        return cls(
            speeds=rpm_to_rad_s(rpm),
            torques=torque,
            fuel=fuel,
            curve_speeds=rpm_to_rad_s(curve["speed_rpm"].to_numpy(dtype=float)),
            curve_torques=curve["max_torque_nm"].to_numpy(dtype=float),
            idle_speed=rpm_to_rad_s(idle_rpm),
        )

    @property
    def max_speed(self) -> float:
        return float(self.speeds[-1])

    def max_torque(self, omega: float) -> float:
        return float(np.interp(omega, self.curve_speeds, self.curve_torques))

    def fuel(self, omega: float, torque: float) -> float:
        w = min(max(omega, self.speeds[0]), self.speeds[-1])
        t = min(max(torque, self.torques[0]), self.torques[-1])
        if (w != omega or t != torque) and not self._clamp_warned and torque > 0:
            log.debug("fuel map clamped at (%.1f rad/s, %.1f N m)", omega, torque)
            self._clamp_warned = True
        return bilinear(*self._lookup, w, t)


@dataclass(frozen=True, slots=True)
class EngineOperatingPoint:
    t_eng: float
    t_contribution: float  # axle request seen at the crank, before aux and clamping
    omega_eng: float  # kinematic, through the gear
    omega_run: float  # what the crank actually turns at (idle floor with a slipping clutch)
    t_axle: float  # axle torque actually delivered by the engine side
    t_brake: float  # friction brake torque at the wheels, >= 0
    saturated: bool


def select_gear(
    omega_w: float,
    gear: int,
    spec: GearboxSpec,
    since_shift: float = math.inf,
    omega_max: float | None = None,
) -> int:
    """Gear from engine-speed thresholds; see `shift_schedule`."""
    return shift_schedule(omega_w, gear, spec, since_shift, omega_max=omega_max)


def engine_operating_point(
    t_ax_request: float,
    omega_w: float,
    gear: int,
    t_aux: float,
    driveline: DieselDriveline,
    engine: EngineMap,
) -> EngineOperatingPoint:
    spec = driveline.gearbox
    ratio = total_ratio(spec, gear)
    eta = total_efficiency(spec, gear)
    omega_eng = omega_w * ratio
    if omega_eng > engine.max_speed:
        raise OverSpeedError(f"engine at {omega_eng:.1f} rad/s in gear {gear} exceeds map range")
    omega_run = max(omega_eng, engine.idle_speed)
    gamma = 1.0 if t_ax_request < 0 else -1.0
    contribution = t_ax_request / ratio * eta**gamma
    raw = contribution + t_aux
    t_max = engine.max_torque(omega_run)
    t_eng = min(max(raw, 0.0), t_max)
    saturated = raw > t_max
    absorbed = t_eng - t_aux
    if absorbed < 0 and omega_eng < engine.idle_speed:
        # clutch open: the idling engine carries only its accessories
        t_eng, absorbed = t_aux, 0.0
    # efficiency direction follows the power crossing the gears
    t_axle = absorbed * ratio * eta if absorbed >= 0 else absorbed * ratio / eta
    if t_ax_request < 0:
        t_axle = min(t_axle, 0.0)
        t_brake = max(t_axle - t_ax_request, 0.0)
    else:
        t_brake = 0.0
    return EngineOperatingPoint(
        t_eng=t_eng,
        t_contribution=contribution,
        omega_eng=omega_eng,
        omega_run=omega_run,
        t_axle=t_axle,
        t_brake=t_brake,
        saturated=saturated,
    )


def max_axle_torque(omega_w: float, gear: int, t_aux: float, driveline: DieselDriveline, engine: EngineMap) -> float:
    """Full-throttle traction torque at the axle in `gear`, after feeding the auxiliaries."""
    spec = driveline.gearbox
    ratio = total_ratio(spec, gear)
    omega_run = max(omega_w * ratio, engine.idle_speed)
    if omega_w * ratio > engine.max_speed:
        return 0.0
    return max(engine.max_torque(omega_run) - t_aux, 0.0) * ratio * total_efficiency(spec, gear)


def fuel_rate(omega_eng: float, t_eng: float, engine: EngineMap) -> float:
    """kg/s. Motoring points read the zero-torque (closed-throttle) row."""
    return max(engine.fuel(omega_eng, max(t_eng, 0.0)), 0.0)


def driveline_loss(op: EngineOperatingPoint, omega_w: float, gear: int, t_aux: float, spec: GearboxSpec) -> float:
    """W lost between crank and axle: clutch slip below idle plus the gear train."""
    slip = (op.t_eng - t_aux) * (op.omega_run - op.omega_eng)
    return slip + gear_loss(op.t_axle, omega_w, total_efficiency(spec, gear))
