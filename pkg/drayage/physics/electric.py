"""Tandem e-axle driveline: gear choice, machine operating point, regen / friction split."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..exceptions import OverSpeedError, PackFaultError
from ..models.vehicle import EAxleSpec
from ..utils.tables import bilinear, read_grid, read_table
from ..utils.units import rpm_to_rad_s
from .gearbox import gear_loss, shift_schedule, total_efficiency, total_ratio


class MotorMap:
    """Efficiency over (speed, |torque|) plus continuous and peak torque limits, per machine."""

    def __init__(
        self,
        speeds: np.ndarray,
        torques: np.ndarray,
        efficiency: np.ndarray,
        limit_speeds: np.ndarray,
        t_cont: np.ndarray,
        t_peak: np.ndarray,
    ) -> None:
        if np.any(efficiency <= 0) or np.any(efficiency > 1):
            raise ValueError("machine efficiency must lie in (0, 1]")
        if np.any(t_peak < t_cont):
            raise ValueError("peak torque below continuous torque")
        self.speeds = speeds
        self.torques = torques
        self.efficiency_grid = efficiency
        self.limit_speeds = limit_speeds
        self.t_cont = t_cont
        self.t_peak = t_peak
        self._lookup = (speeds.tolist(), torques.tolist(), efficiency.tolist())

    @classmethod
    def from_files(cls, efficiency_map: str | Path, torque_limits: str | Path) -> "MotorMap":
        _, rpm, torque, eff = read_grid(efficiency_map)
        lim = read_table(torque_limits, ["speed_rpm", "t_cont_nm", "t_peak_nm"])
        return cls(
            speeds=rpm_to_rad_s(rpm),
            torques=torque,
            efficiency=eff,
            limit_speeds=rpm_to_rad_s(lim["speed_rpm"].to_numpy(dtype=float)),
            t_cont=lim["t_cont_nm"].to_numpy(dtype=float),
            t_peak=lim["t_peak_nm"].to_numpy(dtype=float),
        )

    @classmethod
    def constant(cls, eta: float, t_cont: float, t_peak: float, max_speed: float) -> "MotorMap":
        """Flat-efficiency machine; handy for hand-checkable cases."""
        speeds = np.array([0.0, max_speed])
        torques = np.array([0.0, t_peak])
        return cls(
            speeds=speeds,
            torques=torques,
            efficiency=np.full((2, 2), eta),
            limit_speeds=speeds,
            t_cont=np.array([t_cont, t_cont]),
            t_peak=np.array([t_peak, t_peak]),
        )

    def efficiency(self, omega: float, torque: float) -> float:
        w = min(max(abs(omega), self.speeds[0]), self.speeds[-1])
        t = min(max(abs(torque), self.torques[0]), self.torques[-1])
        return bilinear(*self._lookup, w, t)

    def torque_limit(self, omega: float, peak: bool) -> float:
        curve = self.t_peak if peak else self.t_cont
        return float(np.interp(abs(omega), self.limit_speeds, curve))


@dataclass(frozen=True, slots=True)
class EMOperatingPoint:
    t_em: float  # per axle
    omega_em: float
    t_axle: float  # delivered by the machines, at the axle
    t_brake: float  # friction torque at the wheels, >= 0
    saturated: bool


def eaxle_ratio(spec: EAxleSpec, gear: int) -> float:
    return total_ratio(spec.gearbox, gear, spec.wheel_end_ratio)


def eaxle_efficiency(spec: EAxleSpec, gear: int) -> float:
    return total_efficiency(spec.gearbox, gear, spec.wheel_end_efficiency)


def machine_torque_limit(omega_em: float, spec: EAxleSpec, motor: MotorMap, peak: bool) -> float:
    """Per-axle traction limit: torque curve and power cap."""
    t = motor.torque_limit(omega_em, peak)
    power = spec.max_power if peak else spec.continuous_power
    if omega_em > 0:
        t = min(t, power / omega_em)
    return t


def select_gear(
    omega_w: float,
    gear: int,
    spec: EAxleSpec,
    since_shift: float = math.inf,
    omega_max: float | None = None,
) -> int:
    return shift_schedule(omega_w, gear, spec.gearbox, since_shift, spec.wheel_end_ratio, omega_max)


def em_operating_point(
    t_ax_request: float,
    omega_w: float,
    gear: int,
    spec: EAxleSpec,
    motor: MotorMap,
    *,
    peak: bool = True,
    regen_limit: float | None = None,
) -> EMOperatingPoint:
    """`regen_limit` is the per-axle generating torque magnitude allowed this step."""
    ratio = eaxle_ratio(spec, gear)
    eta = eaxle_efficiency(spec, gear)
    omega_em = omega_w * ratio
    if omega_em > rpm_to_rad_s(spec.max_speed_rpm) + 1e-9:
        raise OverSpeedError(f"machine at {omega_em:.1f} rad/s in gear {gear} exceeds its range")
    gamma = 1.0 if t_ax_request < 0 else -1.0
    t_em = t_ax_request / (spec.n_axles * ratio) * eta**gamma
    saturated = False
    if t_em > 0:
        limit = machine_torque_limit(omega_em, spec, motor, peak)
        if t_em > limit:
            t_em, saturated = limit, True
    elif t_em < 0:
        if regen_limit is None:
            regen_limit = machine_torque_limit(omega_em, spec, motor, peak=False)
        if -t_em > regen_limit:
            t_em, saturated = -max(regen_limit, 0.0), True
    t_axle = spec.n_axles * t_em * ratio / eta**gamma
    t_brake = max(t_axle - t_ax_request, 0.0) if t_ax_request < 0 else 0.0
    return EMOperatingPoint(t_em=t_em, omega_em=omega_em, t_axle=t_axle, t_brake=t_brake, saturated=saturated)


def em_electrical_power(t_em: float, omega_em: float, motor: MotorMap) -> float:
    """W per machine; motoring draws more than it delivers, generating returns less."""
    mech = t_em * omega_em
    if mech == 0.0:
        return 0.0
    eta = motor.efficiency(omega_em, t_em)
    return mech / eta if t_em >= 0 else mech * eta


def em_loss(t_em: float, omega_em: float, motor: MotorMap) -> float:
    """W dissipated in one machine."""
    mech = abs(t_em * omega_em)
    if mech == 0.0:
        return 0.0
    eta = motor.efficiency(omega_em, t_em)
    return mech * (1.0 / eta - 1.0) if t_em >= 0 else mech * (1.0 - eta)


def eaxle_loss(op: EMOperatingPoint, omega_w: float, gear: int, spec: EAxleSpec, motor: MotorMap) -> float:
    """W lost between the bus and the axle: every machine plus the gear train."""
    return spec.n_axles * em_loss(op.t_em, op.omega_em, motor) + gear_loss(
        op.t_axle, omega_w, eaxle_efficiency(spec, gear)
    )


def battery_current_demand(p_em_total: float, p_aux: float, v_batt: float) -> float:
    """Pack current, discharge positive."""
    if v_batt <= 0:
        raise PackFaultError(f"pack voltage {v_batt:.2f} V")
    return (p_em_total + p_aux) / v_batt
