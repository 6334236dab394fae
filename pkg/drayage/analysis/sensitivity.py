"""One-at-a-time +/- perturbation of model inputs, ranked by mean |% change| in route energy."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator

from .. import config
from ..models.scenario import Scenario, SimConfig
from ..models.vehicle import VehicleConfig
from ..scenarios.routes import scale_route
from ..scenarios.weather import scale_weather
from ..simulator import SimResult
from .batch import BatchJob, LOGGER, run_batch

FACTORS: tuple[str, ...] = (
    "mass",
    "drag_coefficient",
    "frontal_area",
    "rolling_resistance",
    "aux_load",
    "speed_limit",
    "grade",
    "temperature",
    "air_density",
)


class SensitivitySpec(BaseModel):
    factors: list[str] = Field(default_factory=lambda: list(config.SENSITIVITY_FACTORS or FACTORS))
    step: float = Field(default=config.SENSITIVITY_STEP, ge=0, lt=1)
    scenarios: list[Scenario]

    @field_validator("factors")
    @classmethod
    def _known(cls, v: list[str]) -> list[str]:
        unknown = [f for f in v if f not in FACTORS]
        if unknown:
            raise ValueError(f"unknown sensitivity factors {unknown}; choose from {list(FACTORS)}")
        if not v:
            raise ValueError("no factors to perturb")
        return v

    @field_validator("scenarios")
    @classmethod
    def _non_empty(cls, v: list[Scenario]) -> list[Scenario]:
        if not v:
            raise ValueError("no baseline scenarios")
        return v


def perturb(scenario: Scenario, vehicle: VehicleConfig, factor: str, scale: float) -> tuple[Scenario, VehicleConfig]:
    """Scenario and vehicle with exactly one input scaled."""
    route, weather, mass = scenario.route, scenario.weather, scenario.mass
    if factor == "mass":
        mass = scenario.mass * scale
        body = vehicle.body.model_copy(
            update={
                "curb_mass": min(vehicle.body.curb_mass, mass),
                "max_gross_mass": max(vehicle.body.max_gross_mass, mass),
            }
        )
        vehicle = vehicle.model_copy(update={"body": body})
    elif factor == "drag_coefficient":
        cd = {phi: [c * scale for c in table] for phi, table in vehicle.aero.cd.items()}
        vehicle = vehicle.model_copy(update={"aero": vehicle.aero.model_copy(update={"cd": cd})})
    elif factor == "frontal_area":
        aero = vehicle.aero.model_copy(update={"frontal_area": vehicle.aero.frontal_area * scale})
        vehicle = vehicle.model_copy(update={"aero": aero})
    elif factor == "rolling_resistance":
        rolling = vehicle.rolling.model_copy(update={"scale": vehicle.rolling.scale * scale})
        vehicle = vehicle.model_copy(update={"rolling": rolling})
    elif factor == "aux_load":
        vehicle = vehicle.model_copy(update={"aux_scale": vehicle.aux_scale * scale})
    elif factor == "speed_limit":
        route = scale_route(route, speed_limit=scale)
    elif factor == "grade":
        route = scale_route(route, grade=scale)
    elif factor == "temperature":
        weather = scale_weather(weather, temperature=scale)
    elif factor == "air_density":
        weather = scale_weather(weather, density=scale)
    else:
        raise ValueError(f"unknown factor {factor!r}")
    out = Scenario(
        id=scenario.id,
        route=route,
        weather=weather,
        mass=mass,
        configuration=scenario.configuration,
        group=scenario.group,
        truck=scenario.truck,
    )
    return out, vehicle


def route_energy(result: SimResult) -> float:
    """kWh out of the battery, or diesel kg, for the whole route."""
    t = result.totals
    return t.battery_kwh if t.final_soc is not None else t.fuel_kg


def _pert_id(scenario_id: str, factor: str, sign: str) -> str:
    return f"{scenario_id}~{factor}{sign}"


async def sensitivity(
    spec: SensitivitySpec,
    vehicle: VehicleConfig,
    simcfg: SimConfig | None = None,
    max_concurrency: int = config.BATCH_MAX_CONCURRENCY,
) -> pd.DataFrame:
    """Ranked table: factor, mean % change for +step and -step, mean |% change|, rank (1 = most sensitive)."""
    simcfg = simcfg or SimConfig(record_trace=False)
    scenarios: list[Scenario] = list(spec.scenarios)
    overrides: dict[str, VehicleConfig] = {}
    for sc in spec.scenarios:
        for factor in spec.factors:
            for sign, scale in (("+", 1.0 + spec.step), ("-", 1.0 - spec.step)):
                p_sc, p_veh = perturb(sc, vehicle, factor, scale)
                pid = _pert_id(sc.id, factor, sign)
                scenarios.append(p_sc.model_copy(update={"id": pid}))
                if p_veh is not vehicle:
                    overrides[pid] = p_veh

    job = BatchJob(
        scenarios=scenarios,
        vehicle=vehicle,
        simcfg=simcfg,
        max_concurrency=max_concurrency,
        vehicle_overrides=overrides,
    )
    outcome = await run_batch(job)
    by_id = outcome.by_id()

    base_ok = {sc.id for sc in spec.scenarios if sc.id in by_id and by_id[sc.id].ok}
    if not base_ok:
        raise RuntimeError("every baseline scenario failed; nothing to compare against")
    if len(base_ok) < len(spec.scenarios):
        LOGGER.warning("%d baseline scenario(s) failed and are left out", len(spec.scenarios) - len(base_ok))

    rows = []
    for factor in spec.factors:
        row: dict[str, float | int | str] = {"factor": factor}
        for sign, col in (("+", "plus"), ("-", "minus")):
            changes = []
            failed = 0
            for sid in sorted(base_ok):
                res = by_id.get(_pert_id(sid, factor, sign))
                base = route_energy(by_id[sid])
                if res is None or not res.ok:
                    failed += 1
                    continue
                if base == 0:
                    continue
                changes.append(100.0 * (route_energy(res) / base - 1.0))
            row[f"{col}_pct"] = float(np.mean(changes)) if changes else float("nan")
            row[f"{col}_failed"] = failed
            if failed:
                LOGGER.warning("%s%s: %d of %d perturbed runs failed", factor, sign, failed, len(base_ok))
        moved = [abs(row[c]) for c in ("plus_pct", "minus_pct") if not np.isnan(row[c])]
        row["mean_abs_pct"] = float(np.mean(moved)) if moved else float("nan")
        rows.append(row)
    table = pd.DataFrame(rows).sort_values(
        ["mean_abs_pct", "factor"], ascending=[False, True], kind="stable", na_position="last"
    )
    # a factor with no successful perturbed run has no rank
    ranked = table["mean_abs_pct"].notna().to_numpy()
    table["rank"] = pd.array([int(r) if ok else pd.NA for r, ok in zip(np.cumsum(ranked), ranked)], dtype="Int64")
    return table.reset_index(drop=True)


def baseline_scenarios(scenarios: Sequence[Scenario], n: int, seed: int = config.SEED) -> list[Scenario]:
    """Seeded subset of `n` scenarios (all of them when fewer)."""
    if n >= len(scenarios):
        return list(scenarios)
    rng = np.random.default_rng(seed)
    idx = sorted(rng.choice(len(scenarios), size=n, replace=False))
    return [scenarios[i] for i in idx]
