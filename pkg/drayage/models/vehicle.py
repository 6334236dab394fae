from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Configuration = Literal["bobtail", "tractor_trailer", "tractor_flatbed"]
CONFIGURATIONS: tuple[str, ...] = ("bobtail", "tractor_trailer", "tractor_flatbed")


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


# ---------- body / road ----------

class AeroParams(_Frozen):
    frontal_area: float = Field(gt=0, description="A_f, m^2")
    yaw_deg: list[float]
    cd: dict[str, list[float]] = Field(description="drag coefficient per configuration, sampled on yaw_deg")

    @model_validator(mode="after")
    def _check(self) -> "AeroParams":
        yaw = np.asarray(self.yaw_deg)
        if yaw[0] != 0 or yaw[-1] < 10 or np.any(np.diff(yaw) <= 0):
            raise ValueError("yaw knots must start at 0, increase, and reach at least 10 deg")
        for phi, values in self.cd.items():
            if len(values) != len(yaw):
                raise ValueError(f"C_d table for {phi} has {len(values)} values for {len(yaw)} knots")
            if not all(0 < c < 2 for c in values):
                raise ValueError(f"C_d table for {phi} outside (0, 2)")
        return self


class RollingParams(_Frozen):
    crr_0: float
    crr_h: float
    decay_temp: float = Field(gt=0, description="lambda_rr")
    shift_zero: float = Field(description="temperature shift at zero speed")
    shift_high: float = Field(description="temperature shift at high speed")
    shift_speed: float = Field(gt=0, description="alpha_v, m/s")
    temperature_unit: Literal["C", "K"] = "C"
    scale: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "RollingParams":
        if not self.crr_0 > self.crr_h > 0:
            raise ValueError("need C_rr,0 > C_rr,h > 0")
        return self


class TireThermalParams(_Frozen):
    tau_0: float = Field(description="time constant at standstill, s")
    tau_h: float = Field(gt=0, description="time constant at high speed, s")
    tau_speed: float = Field(gt=0, description="delta_tau, m/s")
    k: float = Field(description="K per m/s")
    n: float = Field(description="K")
    speed_scale: float = Field(gt=0, description="gamma_tire, m/s")
    t_ref: float = Field(description="reference ambient, K")

    @model_validator(mode="after")
    def _check(self) -> "TireThermalParams":
        if not self.tau_0 > self.tau_h:
            raise ValueError("need tau_0 > tau_h")
        return self


class BodyParams(_Frozen):
    curb_mass: float = Field(gt=0, description="kg")
    max_gross_mass: float = Field(gt=0, description="kg")
    wheel_radius: float = Field(gt=0, description="m")
    rot_inertia_factor: float = Field(default=0.05, ge=0)

    @model_validator(mode="after")
    def _check(self) -> "BodyParams":
        if self.max_gross_mass < self.curb_mass:
            raise ValueError("max gross mass below curb mass")
        return self

    def equivalent_mass(self, mass: float) -> float:
        return mass * (1.0 + self.rot_inertia_factor)


class DriverParams(_Frozen):
    a_acc_max: float = Field(default=0.7, gt=0)
    a_dec_max: float = Field(default=0.8, gt=0)
    k_p: float = Field(default=0.25, ge=0)
    k_i: float = Field(default=0.05, ge=0)
    lookahead: float = Field(default=20.0, ge=0, description="m")
    margin: float = Field(default=0.98, gt=0, le=1)
    creep_speed: float = Field(default=0.5, ge=0, description="m/s, floor while short of the route end")
    resolution: float = Field(default=10.0, gt=0, description="reference grid spacing, m")


# ---------- drivelines ----------

class GearboxSpec(_Frozen):
    ratios: list[float]
    efficiencies: list[float]
    final_drive_ratio: float = Field(gt=0)
    final_drive_efficiency: float = Field(gt=0, le=1)
    upshift_rpm: float = Field(gt=0)
    downshift_rpm: float = Field(gt=0)
    shift_lockout: float = Field(default=1.5, ge=0, description="s")

    @model_validator(mode="after")
    def _check(self) -> "GearboxSpec":
        if len(self.ratios) != len(self.efficiencies) or not self.ratios:
            raise ValueError("one efficiency per gear ratio required")
        if any(b >= a for a, b in zip(self.ratios, self.ratios[1:])):
            raise ValueError("gear ratios must strictly decrease with gear index")
        if not all(0 < e <= 1 for e in self.efficiencies):
            raise ValueError("gear efficiencies must lie in (0, 1]")
        if self.upshift_rpm <= self.downshift_rpm:
            raise ValueError("upshift threshold must exceed downshift threshold")
        return self

    @property
    def n_gears(self) -> int:
        return len(self.ratios)


class EngineSpec(_Frozen):
    fuel_map_file: str
    torque_curve_file: str
    idle_rpm: float = Field(gt=0)
    rated_rpm: float = Field(gt=0)


class DieselDriveline(_Frozen):
    engine: EngineSpec
    gearbox: GearboxSpec


class EAxleSpec(_Frozen):
    n_axles: int = Field(default=2, ge=1)
    gearbox: GearboxSpec
    wheel_end_ratio: float = Field(gt=0)
    wheel_end_efficiency: float = Field(gt=0, le=1)
    efficiency_map_file: str
    torque_limits_file: str
    max_power: float = Field(gt=0, description="peak electrical machine power per axle, W")
    continuous_power: float = Field(gt=0, description="W per axle")
    max_speed_rpm: float = Field(gt=0)
    peak_duration: float = Field(default=30.0, ge=0, description="s of peak torque before falling back")
    regen_min_speed: float = Field(default=1.0, ge=0, description="m/s")


# ---------- battery ----------

class CellParams(_Frozen):
    table_file: str
    q_nom: float = Field(gt=0, description="A h")
    nominal_voltage: float = Field(gt=0, description="V")
    heat_capacity: float = Field(gt=0, description="C_cell, J/K")
    r_th: float = Field(gt=0, description="cell to housing, K/W")
    r_th_ambient: float = Field(default=8.0, gt=0, description="cell to ambient, housing loop disabled, K/W")

    @property
    def nominal_energy_wh(self) -> float:
        return self.q_nom * self.nominal_voltage


class PackSpec(_Frozen):
    cell: CellParams
    n_series: int = Field(ge=1)
    n_parallel: int = Field(ge=1)
    housing_heat_capacity: float = Field(gt=0, description="C_h, J/K")
    r_cell_housing: float = Field(gt=0, description="per cell path, K/W")
    r_housing_ambient: float = Field(gt=0, description="K/W")
    q_heat: float = Field(default=8_000.0, gt=0, description="W, heater heat into housing")
    q_cool: float = Field(default=-9_000.0, lt=0, description="W, chiller heat (negative)")
    cop_heater: float = Field(default=4.0, gt=0)
    cop_chiller: float = Field(default=3.0, gt=0)
    setpoint_c: float = 25.0
    deadband_c: float = Field(default=5.0, gt=0)
    soc_floor: float = Field(default=0.05, ge=0, le=1)
    soc_ceiling: float = Field(default=0.95, ge=0, le=1)
    max_charge_current: float = Field(gt=0, description="pack A")
    max_discharge_current: float = Field(gt=0, description="pack A")

    @model_validator(mode="after")
    def _check(self) -> "PackSpec":
        if self.soc_floor >= self.soc_ceiling:
            raise ValueError("SoC floor must be below ceiling")
        return self

    @property
    def n_cells(self) -> int:
        return self.n_series * self.n_parallel

    @property
    def capacity_ah(self) -> float:
        return self.n_parallel * self.cell.q_nom

    @property
    def nominal_energy_kwh(self) -> float:
        return self.n_cells * self.cell.nominal_energy_wh / 1000.0


# ---------- auxiliaries ----------

class AmbientLoadCurve(_Frozen):
    """Target time-averaged load vs ambient temperature (piecewise linear)."""

    temps_c: list[float]
    loads_w: list[float]

    @model_validator(mode="after")
    def _check(self) -> "AmbientLoadCurve":
        if len(self.temps_c) != len(self.loads_w) or len(self.temps_c) < 2:
            raise ValueError("ambient curve needs matching knot lists of length >= 2")
        if any(b <= a for a, b in zip(self.temps_c, self.temps_c[1:])):
            raise ValueError("ambient curve knots must increase")
        if any(w < 0 for w in self.loads_w):
            raise ValueError("ambient loads must be >= 0")
        return self


class AuxComponentSpec(_Frozen):
    name: str
    duty_source: Literal["fixed", "ambient", "continuous"]
    period: float | None = Field(default=None, gt=0, description="s")
    duty: float | None = Field(default=None, ge=0, le=1)
    power: float | None = Field(default=None, ge=0, description="constant on-power, W")
    power_by_speed: list[float] | None = Field(default=None, description="on-power, W, on aux_speed_rpm knots")
    ambient_curve: str | None = None
    reference_rpm: float = 1500.0

    @model_validator(mode="after")
    def _check(self) -> "AuxComponentSpec":
        if (self.power is None) == (self.power_by_speed is None):
            raise ValueError(f"{self.name}: give exactly one of power / power_by_speed")
        if self.power_by_speed is not None and any(p < 0 for p in self.power_by_speed):
            raise ValueError(f"{self.name}: negative power")
        if self.duty_source != "continuous" and self.period is None:
            raise ValueError(f"{self.name}: cycled component needs a period")
        if self.duty_source == "fixed" and self.duty is None:
            raise ValueError(f"{self.name}: fixed duty missing")
        if self.duty_source == "ambient" and not self.ambient_curve:
            raise ValueError(f"{self.name}: ambient duty needs a curve name")
        return self

    @property
    def speed_dependent(self) -> bool:
        return self.power_by_speed is not None


# ---------- vehicle ----------

class VehicleConfig(_Frozen):
    name: str
    kind: Literal["diesel", "electric"]
    body: BodyParams
    aero: AeroParams
    rolling: RollingParams
    tire: TireThermalParams
    driver: DriverParams = DriverParams()
    service_brake_torque: float = Field(default=60_000.0, gt=0, description="max at the wheels, N m")
    diesel: DieselDriveline | None = None
    eaxle: EAxleSpec | None = None
    pack: PackSpec | None = None
    aux: list[AuxComponentSpec] = []
    aux_speed_rpm: list[float] = [500.0, 1000.0, 1500.0, 2000.0, 2500.0]
    ambient_curves: dict[str, AmbientLoadCurve] = {}
    aux_scale: float = Field(default=1.0, ge=0)
    source_dir: str | None = None

    @model_validator(mode="after")
    def _check(self) -> "VehicleConfig":
        if self.kind == "diesel" and self.diesel is None:
            raise ValueError(f"{self.name}: diesel vehicle without diesel driveline")
        if self.kind == "electric" and (self.eaxle is None or self.pack is None):
            raise ValueError(f"{self.name}: electric vehicle needs eaxle and pack")
        for comp in self.aux:
            if comp.ambient_curve and comp.ambient_curve not in self.ambient_curves:
                raise ValueError(f"{self.name}: unknown ambient curve {comp.ambient_curve!r}")
            if comp.power_by_speed is not None and len(comp.power_by_speed) != len(self.aux_speed_rpm):
                raise ValueError(f"{comp.name}: power table does not match aux_speed_rpm")
        for phi in self.aero.cd:
            if phi not in CONFIGURATIONS:
                raise ValueError(f"{self.name}: unknown configuration {phi!r}")
        return self

    @property
    def is_electric(self) -> bool:
        return self.kind == "electric"

    def resolve(self, filename: str) -> Path:
        p = Path(filename)
        if p.is_absolute() or self.source_dir is None:
            return p
        return Path(self.source_dir) / p


def load_vehicle(path: str | Path) -> VehicleConfig:
    """Read a vehicle JSON file; map files are resolved relative to it."""
    path = Path(path)
    raw = json.loads(path.read_text())
    raw.setdefault("source_dir", str(path.resolve().parent))
    return VehicleConfig.model_validate(raw)
