from __future__ import annotations

from collections.abc import Iterable

import pandas as pd

from ..models.vehicle import PackSpec, VehicleConfig
from ..physics.auxiliaries import average_aux_power
from ..utils.units import KELVIN


def steady_btms_power(pack: PackSpec, t_amb: float) -> tuple[float, float]:
    """Mean (heater, chiller) electrical power holding the housing inside the hysteresis band.

    The heater cycles the cell between setpoint-deadband and setpoint, the chiller between
    setpoint and setpoint+deadband; cell heat generation is ignored.
    """
    setpoint = pack.setpoint_c + KELVIN
    low = setpoint - 0.5 * pack.deadband_c
    high = setpoint + 0.5 * pack.deadband_c
    heater = chiller = 0.0
    if t_amb < low:
        duty = min((low - t_amb) / pack.r_housing_ambient / pack.q_heat, 1.0)
        heater = duty * pack.q_heat / pack.cop_heater
    elif t_amb > high:
        duty = min((t_amb - high) / pack.r_housing_ambient / abs(pack.q_cool), 1.0)
        chiller = duty * abs(pack.q_cool) / pack.cop_chiller
    return heater, chiller


def ambient_aux_sweep(vehicle: VehicleConfig, temperatures: Iterable[float], rpm: float | None = None) -> pd.DataFrame:
    """Time-averaged auxiliary power (W) per component at each constant ambient (K)."""
    rows = []
    for t_amb in temperatures:
        p = average_aux_power(vehicle, t_amb, rpm)
        row = {"T_amb_K": t_amb, "T_amb_C": t_amb - KELVIN}
        row.update({k: v for k, v in p.items() if k != "total"})
        total = p["total"]
        if vehicle.pack is not None:
            heater, chiller = steady_btms_power(vehicle.pack, t_amb)
            row.update(btms_heater=heater, btms_chiller=chiller)
            total += heater + chiller
        row["total"] = total
        rows.append(row)
    return pd.DataFrame(rows)
