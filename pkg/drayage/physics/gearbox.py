from __future__ import annotations

import math

from ..models.vehicle import GearboxSpec
from ..utils.units import rpm_to_rad_s


def total_ratio(spec: GearboxSpec, gear: int, extra: float = 1.0) -> float:
    return spec.ratios[gear - 1] * spec.final_drive_ratio * extra


def total_efficiency(spec: GearboxSpec, gear: int, extra: float = 1.0) -> float:
    return spec.efficiencies[gear - 1] * spec.final_drive_efficiency * extra


def shift_schedule(
    omega_w: float,
    gear: int,
    spec: GearboxSpec,
    since_shift: float = math.inf,
    extra_ratio: float = 1.0,
    omega_max: float | None = None,
) -> int:
    """Up/down thresholds on machine speed with hysteresis and a post-shift lock-out.

    Gears are 1-based. A stopped vehicle is always in first. With `omega_max` set, a gear that
    would spin the machine past it is left for the lowest gear that does not, lock-out or not.
    """
    if omega_w <= 0.0:
        return 1
    if omega_max is not None and omega_w * total_ratio(spec, gear, extra_ratio) > omega_max:
        g = gear
        while g < spec.n_gears and omega_w * total_ratio(spec, g, extra_ratio) > omega_max:
            g += 1
        return g
    if since_shift < spec.shift_lockout:
        return gear
    up = rpm_to_rad_s(spec.upshift_rpm)
    down = rpm_to_rad_s(spec.downshift_rpm)
    g = gear
    while g < spec.n_gears and omega_w * total_ratio(spec, g, extra_ratio) > up:
        if omega_w * total_ratio(spec, g + 1, extra_ratio) < down:
            break
        g += 1
    if g == gear:
        while g > 1 and omega_w * total_ratio(spec, g, extra_ratio) < down:
            if omega_w * total_ratio(spec, g - 1, extra_ratio) > up:
                break
            g -= 1
    return g


def gear_loss(t_axle: float, omega_w: float, eta: float) -> float:
    """W dissipated in the gear train for axle torque `t_axle` at wheel speed `omega_w`."""
    p = t_axle * omega_w
    return p * (1.0 / eta - 1.0) if p >= 0 else -p * (1.0 - eta)
