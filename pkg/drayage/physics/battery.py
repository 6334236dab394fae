"""First-order cell ECM with Coulomb counting, lumped cell/housing thermal model, BTMS, pack scaling.

Current is discharge-positive throughout. Temperatures are K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ..exceptions import EnergyInfeasibleError
from ..models.vehicle import CellParams, PackSpec, VehicleConfig
from ..utils.tables import read_table
from ..utils.units import KELVIN, S_PER_H


class CellTable:
    """SoC-indexed V_oc, R_0, R_1, C_1; linear in SoC, clamped to [0, 1]."""

    COLUMNS = ["soc", "ocv_v", "r0_ohm", "r1_ohm", "c1_f"]

    def __init__(self, soc, ocv, r0, r1, c1) -> None:
        soc = np.asarray(soc, dtype=float)
        ocv = np.asarray(ocv, dtype=float)
        r0, r1, c1 = (np.asarray(x, dtype=float) for x in (r0, r1, c1))
        if soc[0] > 0.0 or soc[-1] < 1.0 or np.any(np.diff(soc) <= 0):
            raise ValueError("cell table must cover SoC 0..1 in increasing order")
        if np.any(np.diff(ocv) <= 0):
            raise ValueError("open-circuit voltage must increase with SoC")
        if np.any(r0 <= 0) or np.any(r1 <= 0) or np.any(c1 <= 0):
            raise ValueError("resistances and capacitance must be positive")
        self.soc, self.ocv, self.r0, self.r1, self.c1 = soc, ocv, r0, r1, c1

    @classmethod
    def from_csv(cls, path: str | Path) -> "CellTable":
        df = read_table(path, cls.COLUMNS)
        return cls(df["soc"], df["ocv_v"], df["r0_ohm"], df["r1_ohm"], df["c1_f"])

    @classmethod
    def constant(cls, ocv_lo: float, ocv_hi: float, r0: float, r1: float, c1: float) -> "CellTable":
        return cls([0.0, 1.0], [ocv_lo, ocv_hi], [r0, r0], [r1, r1], [c1, c1])

    def _at(self, values: np.ndarray, soc: float) -> float:
        return float(np.interp(soc, self.soc, values))

    def v_oc(self, soc: float) -> float:
        return self._at(self.ocv, soc)

    def params(self, soc: float) -> tuple[float, float, float, float]:
        """(V_oc, R_0, R_1, C_1) at `soc`."""
        return (
            self._at(self.ocv, soc),
            self._at(self.r0, soc),
            self._at(self.r1, soc),
            self._at(self.c1, soc),
        )


@dataclass(frozen=True, slots=True)
class BatteryState:
    soc: float
    t_cell: float
    t_house: float
    v_rc: float = 0.0
    u_c: bool = False
    u_h: bool = False
    v_cell: float = 0.0
    v_batt: float = 0.0
    i_cell: float = 0.0
    i_batt: float = 0.0
    q_gen: float = 0.0  # cell heat generation, W

    def __post_init__(self) -> None:
        if self.u_c and self.u_h:
            raise ValueError("heater and chiller cannot both be on")


def initial_state(spec: PackSpec, table: CellTable, soc: float, t_cell: float, t_house: float) -> BatteryState:
    v_cell = table.v_oc(soc)
    return BatteryState(
        soc=soc, t_cell=t_cell, t_house=t_house, v_cell=v_cell, v_batt=spec.n_series * v_cell
    )


# ---------- electrical ----------

def cell_step(
    state: BatteryState,
    i_cell: float,
    dt: float,
    cell: CellParams,
    table: CellTable,
    substeps: int = 10,
) -> BatteryState:
    """Forward Euler on the RC branch, exact Coulomb counting for the step's constant current."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    v_oc0, r0, r1, c1 = table.params(state.soc)
    tau = r1 * c1
    n = substeps if tau < 10.0 * dt else 1
    h = dt / n
    v_rc = state.v_rc
    for _ in range(n):
        v_rc += h * (-v_rc / tau + i_cell / c1)
    soc = state.soc - dt * i_cell / (S_PER_H * cell.q_nom)
    if not 0.0 <= soc <= 1.0:
        raise EnergyInfeasibleError(f"SoC {soc:.4f} left [0, 1]")
    v_oc = table.v_oc(soc)
    r0 = float(np.interp(soc, table.soc, table.r0))
    v_cell = v_oc - r0 * i_cell - v_rc
    return replace(
        state,
        soc=soc,
        v_rc=v_rc,
        v_cell=v_cell,
        i_cell=i_cell,
        q_gen=i_cell * (v_oc - v_cell),
    )


def pack_scale(state: BatteryState, i_batt: float, spec: PackSpec) -> BatteryState:
    """Homogeneous pack: series cells add voltage, parallel strings split current."""
    return replace(state, v_batt=spec.n_series * state.v_cell, i_batt=i_batt)


def cell_current(i_batt: float, spec: PackSpec) -> float:
    return i_batt / spec.n_parallel


def chemical_power(state: BatteryState, spec: PackSpec, table: CellTable) -> float:
    """W released by the cell reactions across the pack, discharge positive."""
    return spec.n_cells * table.v_oc(state.soc) * state.i_cell


def cell_loss(state: BatteryState, table: CellTable) -> float:
    """W dissipated in one cell across R_0 and the RC branch."""
    r0 = float(np.interp(state.soc, table.soc, table.r0))
    return state.i_cell * (r0 * state.i_cell + state.v_rc)


# ---------- thermal ----------

def cell_thermal_step(state: BatteryState, dt: float, cell: CellParams) -> BatteryState:
    """Cell exchanges heat with its housing."""
    dT = (state.q_gen + (state.t_house - state.t_cell) / cell.r_th) / cell.heat_capacity
    return replace(state, t_cell=state.t_cell + dt * dT)


def cell_ambient_thermal_step(state: BatteryState, t_amb: float, dt: float, cell: CellParams) -> BatteryState:
    """Cell exchanges heat directly with ambient (housing loop disabled)."""
    dT = (state.q_gen + (t_amb - state.t_cell) / cell.r_th_ambient) / cell.heat_capacity
    return replace(state, t_cell=state.t_cell + dt * dT, t_house=t_amb)


def housing_step(state: BatteryState, t_amb: float, dt: float, spec: PackSpec) -> BatteryState:
    q = (
        spec.n_cells * (state.t_cell - state.t_house) / spec.r_cell_housing
        + (t_amb - state.t_house) / spec.r_housing_ambient
        + spec.q_cool * state.u_c
        + spec.q_heat * state.u_h
    )
    return replace(state, t_house=state.t_house + dt * q / spec.housing_heat_capacity)


def btms_control(t_cell: float, u_c: bool, u_h: bool, spec: PackSpec) -> tuple[bool, bool]:
    """Heater on below setpoint-deadband, off at setpoint; chiller on above setpoint+deadband, off at setpoint."""
    setpoint = spec.setpoint_c + KELVIN
    if u_h:
        u_h = t_cell < setpoint
    else:
        u_h = t_cell < setpoint - spec.deadband_c
    if u_c:
        u_c = t_cell > setpoint
    else:
        u_c = t_cell > setpoint + spec.deadband_c
    return u_c, u_h


def btms_power(u_c: bool, u_h: bool, spec: PackSpec) -> tuple[float, float]:
    """Electrical (heater, chiller) power, W."""
    p_heater = spec.q_heat / spec.cop_heater if u_h else 0.0
    p_chiller = abs(spec.q_cool) / spec.cop_chiller if u_c else 0.0
    return p_heater, p_chiller


# ---------- sizing ----------

def size_pack(target_kwh: float, target_voltage: float, cell: CellParams) -> tuple[int, int]:
    """(N_series, N_parallel) reaching at least the target voltage and energy."""
    n_series = math.ceil(target_voltage / cell.nominal_voltage)
    string_kwh = n_series * cell.nominal_energy_wh / 1000.0
    n_parallel = math.ceil(target_kwh / string_kwh)
    return n_series, n_parallel


def battery_size_variant(vehicle: VehicleConfig, pack_kwh: float, kg_per_kwh: float = 6.0) -> VehicleConfig:
    """Same truck with a resized pack; curb mass moves with the added or removed energy."""
    if vehicle.pack is None:
        raise ValueError(f"{vehicle.name} has no battery pack")
    pack = vehicle.pack
    n_parallel = math.ceil(pack_kwh / (pack.n_series * pack.cell.nominal_energy_wh / 1000.0))
    scale = n_parallel / pack.n_parallel
    new_pack = pack.model_copy(
        update={
            "n_parallel": n_parallel,
            "max_charge_current": pack.max_charge_current * scale,
            "max_discharge_current": pack.max_discharge_current * scale,
            "housing_heat_capacity": pack.housing_heat_capacity * scale,
        }
    )
    delta_kg = (new_pack.nominal_energy_kwh - pack.nominal_energy_kwh) * kg_per_kwh
    body = vehicle.body.model_copy(
        update={
            "curb_mass": vehicle.body.curb_mass + delta_kg,
            "max_gross_mass": vehicle.body.max_gross_mass + max(delta_kg, 0.0),
        }
    )
    return vehicle.model_copy(
        update={"name": f"{vehicle.name}-{pack_kwh:.0f}kWh", "pack": new_pack, "body": body}
    )


def voltage_rmse(
    time_s: np.ndarray,
    current: np.ndarray,
    voltage: np.ndarray,
    cell: CellParams,
    table: CellTable,
    soc0: float,
    substeps: int = 10,
) -> float:
    """Replay a recorded cell current (zero-order hold) and compare terminal voltage."""
    state = BatteryState(soc=soc0, t_cell=298.15, t_house=298.15)
    predicted = np.empty(len(time_s))
    predicted[0] = table.v_oc(soc0) - float(np.interp(soc0, table.soc, table.r0)) * current[0]
    for k in range(1, len(time_s)):
        state = cell_step(state, float(current[k - 1]), float(time_s[k] - time_s[k - 1]), cell, table, substeps)
        # terminal voltage at sample k sees the current applied from k onwards
        v_oc, r0, _, _ = table.params(state.soc)
        predicted[k] = v_oc - r0 * current[k] - state.v_rc
    return float(np.sqrt(np.mean((predicted - voltage) ** 2)))
