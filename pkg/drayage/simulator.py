"""Fixed-step closed-loop simulation: driver -> powertrain -> road load -> fuel/battery -> state update."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from .calibration import VehicleMaps, maps_for
from .exceptions import EnergyInfeasibleError, OverSpeedError, PackFaultError, ScenarioValidationError
from .models.scenario import Scenario, SimConfig
from .models.vehicle import DriverParams, VehicleConfig
from .physics import auxiliaries, battery, diesel, electric
from .physics.driver import PIState, pedal_command, reference_speed, target_speed, traction_cap
from .physics.gearbox import shift_schedule, total_ratio
from .physics.roadload import road_load, tire_temperature_derivative
from .utils.units import DIESEL_DENSITY_KG_PER_L, J_PER_KWH, M_PER_KM, rpm_to_rad_s

log = logging.getLogger(__name__)

Status = Literal["ok", "energy_infeasible", "over_speed", "timeout"]


class SimTotals(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: Status = "ok"
    message: str | None = None
    duration_s: float = 0.0
    distance_km: float = 0.0
    fuel_kg: float = 0.0
    fuel_l: float = 0.0
    l_per_100km: float | None = None
    battery_kwh: float = 0.0  # net terminal energy, discharge positive
    kwh_per_100km: float | None = None
    regen_kwh: float = 0.0
    wheel_kwh: float = 0.0  # positive traction work at the wheels
    friction_brake_kwh: float = 0.0
    driveline_loss_kwh: float = 0.0
    battery_loss_kwh: float = 0.0
    source_kwh: float = 0.0  # crank work (diesel) or chemical energy out of the cells (electric)
    aux_kwh: dict[str, float] = {}
    ledger_residual: float = 0.0  # fraction of source energy
    final_soc: float | None = None
    max_overspeed: float = 0.0  # m/s above margin * v_lim


@dataclass
class SimResult:
    scenario_id: str
    vehicle: str
    metadata: dict
    totals: SimTotals
    trace: pd.DataFrame | None = None

    @property
    def ok(self) -> bool:
        return self.totals.status == "ok"

    def to_dict(self) -> dict:
        return {
            "scenario_id": self.scenario_id,
            "vehicle": self.vehicle,
            "metadata": self.metadata,
            "totals": self.totals.model_dump(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def energy_metrics(result: SimResult | SimTotals) -> dict[str, float]:
    """Per-100-km consumption from raw totals."""
    totals = result.totals if isinstance(result, SimResult) else result
    if totals.distance_km <= 0:
        raise ValueError("cannot normalise a run that covered no distance")
    per_100 = totals.distance_km / 100.0
    fuel_l = totals.fuel_kg / DIESEL_DENSITY_KG_PER_L
    return {
        "distance_km": totals.distance_km,
        "fuel_l": fuel_l,
        "l_per_100km": fuel_l / per_100,
        "kwh_per_100km": totals.battery_kwh / per_100,
        "regen_kwh": totals.regen_kwh,
    }


# ---------- run state ----------

@dataclass
class _Ledger:
    """Energy sums in J."""

    fuel_kg: float = 0.0
    battery: float = 0.0
    regen: float = 0.0
    source: float = 0.0
    wheel_pos: float = 0.0
    wheel_absorbed: float = 0.0  # braking work taken by the powertrain
    friction: float = 0.0
    driveline_loss: float = 0.0
    battery_loss: float = 0.0
    aux: dict[str, float] | None = None

    def add_aux(self, powers: dict[str, float], dt: float) -> None:
        if self.aux is None:
            self.aux = {}
        for name, p in powers.items():
            if name != "total":
                self.aux[name] = self.aux.get(name, 0.0) + p * dt

    @property
    def aux_total(self) -> float:
        return sum((self.aux or {}).values())

    @property
    def residual(self) -> float:
        sinks = (
            self.wheel_pos
            - self.wheel_absorbed
            + self.aux_total
            + self.driveline_loss
            + self.battery_loss
        )
        if self.source == 0.0:
            return 0.0
        return (self.source - sinks) / abs(self.source)


@dataclass
class _Powertrain:
    t_axle: float
    t_brake: float
    torque: float  # crank or per-machine
    omega: float
    fuel_rate: float = 0.0
    i_batt: float = 0.0
    p_elec: float = 0.0


def _default_duration(scenario: Scenario, driver: DriverParams) -> float:
    route = scenario.route
    seg = np.diff(route.distances)
    nominal = float(np.sum(seg / (driver.margin * route.speed_limits[:-1])))
    return 4.0 * nominal + 600.0


# ---------- diesel step ----------

def _diesel_step(t, v, gear, cmd, t_cap, t_amb, vehicle: VehicleConfig, maps: VehicleMaps, ledger, dt):
    drive = vehicle.diesel
    engine = maps.engine
    r_w = vehicle.body.wheel_radius
    omega_w = v / r_w
    ratio = total_ratio(drive.gearbox, gear)
    omega_run = max(omega_w * ratio, engine.idle_speed)
    aux = auxiliaries.aux_power_at(t, vehicle, t_amb, omega_run)
    t_aux = auxiliaries.diesel_aux_torque(aux["total"], omega_run)
    avail = diesel.max_axle_torque(omega_w, gear, t_aux, drive, engine)
    t_req = min(cmd.app * avail, t_cap) - cmd.bpp * vehicle.service_brake_torque
    op = diesel.engine_operating_point(t_req, omega_w, gear, t_aux, drive, engine)
    rate = diesel.fuel_rate(op.omega_run, op.t_eng, engine)

    ledger.fuel_kg += rate * dt
    ledger.source += op.t_eng * op.omega_run * dt
    ledger.add_aux(aux, dt)
    ledger.driveline_loss += diesel.driveline_loss(op, omega_w, gear, t_aux, drive.gearbox) * dt
    return _Powertrain(t_axle=op.t_axle, t_brake=op.t_brake, torque=op.t_eng, omega=op.omega_run, fuel_rate=rate), aux


# ---------- electric step ----------

@dataclass
class _ElectricState:
    batt: battery.BatteryState
    peak_timer: float = 0.0


def _electric_step(t, v, gear, cmd, t_cap, t_amb, es: _ElectricState, vehicle, maps: VehicleMaps, simcfg, ledger, dt):
    spec = vehicle.eaxle
    pack = vehicle.pack
    motor = maps.motor
    batt = es.batt
    r_w = vehicle.body.wheel_radius
    omega_w = v / r_w

    u_c, u_h = battery.btms_control(batt.t_cell, batt.u_c, batt.u_h, pack)
    p_heater, p_chiller = battery.btms_power(u_c, u_h, pack)
    aux = auxiliaries.aux_power_at(
        t, vehicle, t_amb, None, extra={"btms_heater": p_heater, "btms_chiller": p_chiller}
    )
    p_aux = aux["total"]

    ratio = electric.eaxle_ratio(spec, gear)
    eta = electric.eaxle_efficiency(spec, gear)
    omega_em = omega_w * ratio
    peak = es.peak_timer < spec.peak_duration
    t_lim = electric.machine_torque_limit(omega_em, spec, motor, peak)
    if omega_em > 0:
        # pack discharge current caps the machines' share of the bus
        p_max = pack.max_discharge_current * batt.v_batt - p_aux
        eta_em = motor.efficiency(omega_em, t_lim)
        t_lim = min(t_lim, max(p_max, 0.0) * eta_em / (spec.n_axles * omega_em))
    avail = spec.n_axles * t_lim * ratio * eta
    t_req = min(cmd.app * avail, t_cap) - cmd.bpp * vehicle.service_brake_torque

    if v < spec.regen_min_speed or batt.soc >= pack.soc_ceiling or omega_em <= 0:
        regen_limit = 0.0
    else:
        regen_limit = electric.machine_torque_limit(omega_em, spec, motor, peak=False)
        p_accept = pack.max_charge_current * batt.v_batt + p_aux
        eta_em = motor.efficiency(omega_em, regen_limit)
        regen_limit = min(regen_limit, p_accept / (spec.n_axles * omega_em * eta_em))

    op = electric.em_operating_point(
        t_req, omega_w, gear, spec, motor, peak=peak, regen_limit=regen_limit
    )
    cont = electric.machine_torque_limit(op.omega_em, spec, motor, peak=False)
    peak_timer = es.peak_timer + dt if op.t_em > cont else 0.0

    p_em = spec.n_axles * electric.em_electrical_power(op.t_em, op.omega_em, motor)
    i_batt = electric.battery_current_demand(p_em, p_aux, batt.v_batt)

    cell = pack.cell
    stepped = battery.cell_step(
        batt, battery.cell_current(i_batt, pack), dt, cell, maps.cells, simcfg.rc_substeps
    )
    stepped = replace(battery.pack_scale(stepped, i_batt, pack), u_c=u_c, u_h=u_h)
    if simcfg.housing_loop:
        cell_next = battery.cell_thermal_step(stepped, dt, cell)
        house_next = battery.housing_step(stepped, t_amb, dt, pack)
        stepped = replace(cell_next, t_house=house_next.t_house)
    else:
        stepped = battery.cell_ambient_thermal_step(stepped, t_amb, dt, cell)

    p_term = stepped.v_batt * i_batt
    ledger.battery += p_term * dt
    if p_term < 0:
        ledger.regen += -p_term * dt
    ledger.source += battery.chemical_power(stepped, pack, maps.cells) * dt
    ledger.battery_loss += pack.n_cells * battery.cell_loss(stepped, maps.cells) * dt
    ledger.add_aux(aux, dt)
    ledger.driveline_loss += electric.eaxle_loss(op, omega_w, gear, spec, motor) * dt

    es.batt = stepped
    es.peak_timer = peak_timer
    pt = _Powertrain(
        t_axle=op.t_axle, t_brake=op.t_brake, torque=op.t_em, omega=op.omega_em, i_batt=i_batt, p_elec=p_em
    )
    return pt, aux


# ---------- main loop ----------

def run(
    scenario: Scenario,
    vehicle: VehicleConfig,
    simcfg: SimConfig | None = None,
    driver: DriverParams | None = None,
) -> SimResult:
    """Integrate one scenario to the route end or the first fault. Deterministic."""
    simcfg = simcfg or SimConfig()
    driver = driver or vehicle.driver
    scenario.check_vehicle(vehicle)
    route = scenario.route
    if route.length_m <= 0:
        raise ScenarioValidationError("route has zero length", record=scenario.id)
    maps = maps_for(vehicle)

    dt = simcfg.dt
    body = vehicle.body
    mass = scenario.mass
    m_eq = body.equivalent_mass(mass)
    r_w = body.wheel_radius
    ref = reference_speed(route, driver)
    end = route.points[-1].s
    max_t = simcfg.max_duration or _default_duration(scenario, driver)

    samples = scenario.weather.samples
    t_amb0 = samples[0].T_amb
    t_tire = simcfg.initial_tire_temp if simcfg.initial_tire_temp is not None else t_amb0

    es: _ElectricState | None = None
    if vehicle.is_electric:
        t_cell = simcfg.initial_cell_temp if simcfg.initial_cell_temp is not None else t_amb0
        t_house = simcfg.initial_housing_temp if simcfg.initial_housing_temp is not None else t_amb0
        es = _ElectricState(batt=battery.initial_state(vehicle.pack, maps.cells, simcfg.initial_soc, t_cell, t_house))
        gearbox = vehicle.eaxle.gearbox
        extra_ratio = vehicle.eaxle.wheel_end_ratio
        omega_max = rpm_to_rad_s(vehicle.eaxle.max_speed_rpm)
    else:
        gearbox = vehicle.diesel.gearbox
        extra_ratio = 1.0
        omega_max = maps.engine.max_speed

    ledger = _Ledger()
    rows: list[dict] = []
    t = 0.0
    s = route.start
    v = 0.0
    gear = 1
    since_shift = math.inf
    pi = PIState()
    status: Status = "ok"
    message = None
    max_over = 0.0
    step = 0

    while s < end:
        if t >= max_t:
            status, message = "timeout", f"route not finished after {t:.0f} s"
            break
        i = route.segment_index(s)
        env = samples[i]
        grade = float(route.grades[i])
        v_ref = target_speed(ref, s, driver)
        cmd, pi = pedal_command(v, v_ref, dt, pi, driver)

        omega_w = v / r_w
        new_gear = shift_schedule(omega_w, gear, gearbox, since_shift, extra_ratio, omega_max)
        if new_gear != gear:
            gear, since_shift = new_gear, 0.0

        rl = road_load(
            v, 0.0, grade, t_tire, env, body, mass, vehicle.aero, vehicle.rolling,
            scenario.configuration, heading=float(route.headings[i]), traction_requested=cmd.app > 0,
        )
        t_cap = traction_cap(v, v_ref, rl.resistive, m_eq, r_w, dt, driver)

        try:
            if es is None:
                pt, aux = _diesel_step(t, v, gear, cmd, t_cap, env.T_amb, vehicle, maps, ledger, dt)
            else:
                pt, aux = _electric_step(t, v, gear, cmd, t_cap, env.T_amb, es, vehicle, maps, simcfg, ledger, dt)
        except OverSpeedError as e:
            status, message = "over_speed", str(e)
            break
        except (EnergyInfeasibleError, PackFaultError) as e:
            status, message = "energy_infeasible", str(e)
            break

        f_drive = pt.t_axle / r_w
        f_brake = pt.t_brake / r_w
        f_net = f_drive - rl.resistive
        if v <= 0.0 and f_net - f_brake <= 0.0:
            a = 0.0  # held by the brakes
        else:
            a = (f_net - f_brake) / m_eq

        p_wheel = pt.t_axle * v / r_w
        if p_wheel >= 0:
            ledger.wheel_pos += p_wheel * dt
        else:
            ledger.wheel_absorbed += -p_wheel * dt
        ledger.friction += f_brake * v * dt

        max_over = max(max_over, v - driver.margin * float(route.speed_limits[i]))

        if simcfg.record_trace and step % simcfg.record_stride == 0:
            row = {
                "t": t, "s": s, "v": v, "v_ref": v_ref, "gear": gear,
                "app": cmd.app, "bpp": cmd.bpp, "grade": grade, "T_amb": env.T_amb,
                "f_aero": rl.f_aero, "f_roll": rl.f_roll, "f_grade": rl.f_grade,
                "f_inertial": m_eq * a, "t_axle": pt.t_axle, "t_brake": pt.t_brake,
                "T_tire": t_tire,
            }
            if es is None:
                row.update(t_eng=pt.torque, omega_eng=pt.omega, fuel_rate=pt.fuel_rate)
            else:
                b = es.batt
                row.update(
                    t_em=pt.torque, omega_em=pt.omega, p_em=pt.p_elec, i_batt=pt.i_batt,
                    v_batt=b.v_batt, soc=b.soc, T_cell=b.t_cell, T_house=b.t_house,
                    heater=b.u_h, chiller=b.u_c,
                )
            row.update({f"aux_{k}": p for k, p in aux.items()})
            rows.append(row)

        t_tire += dt * tire_temperature_derivative(t_tire, v, env.T_amb, vehicle.tire)
        s += v * dt
        v = max(v + a * dt, 0.0)
        t += dt
        since_shift += dt
        step += 1

        if es is not None and es.batt.soc < vehicle.pack.soc_floor:
            status, message = "energy_infeasible", f"SoC {es.batt.soc:.3f} below floor"
            break

    distance_km = (min(s, end) - route.start) / M_PER_KM
    totals = _totals(status, message, t, distance_km, ledger, es, max_over)
    if status != "ok":
        log.warning("scenario %s on %s ended %s: %s", scenario.id, vehicle.name, status, message)
    trace = pd.DataFrame(rows) if simcfg.record_trace else None
    return SimResult(
        scenario_id=scenario.id,
        vehicle=vehicle.name,
        metadata=scenario.metadata(),
        totals=totals,
        trace=trace,
    )


def _totals(status, message, t, distance_km, ledger: _Ledger, es, max_over) -> SimTotals:
    kwh = 1.0 / J_PER_KWH
    raw = SimTotals(
        status=status,
        message=message,
        duration_s=t,
        distance_km=distance_km,
        fuel_kg=ledger.fuel_kg,
        battery_kwh=ledger.battery * kwh,
        regen_kwh=ledger.regen * kwh,
        wheel_kwh=ledger.wheel_pos * kwh,
        friction_brake_kwh=ledger.friction * kwh,
        driveline_loss_kwh=ledger.driveline_loss * kwh,
        battery_loss_kwh=ledger.battery_loss * kwh,
        source_kwh=ledger.source * kwh,
        aux_kwh={k: e * kwh for k, e in sorted((ledger.aux or {}).items())},
        ledger_residual=ledger.residual,
        final_soc=es.batt.soc if es is not None else None,
        max_overspeed=max(max_over, 0.0),
    )
    if distance_km <= 0:
        return raw
    m = energy_metrics(raw)
    is_diesel = es is None
    return raw.model_copy(
        update={
            "fuel_l": m["fuel_l"],
            "l_per_100km": m["l_per_100km"] if is_diesel else None,
            "kwh_per_100km": None if is_diesel else m["kwh_per_100km"],
        }
    )
