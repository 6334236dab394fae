"""Command-line entry point: `python -m drayage <command> ...`."""
from __future__ import annotations

import argparse
import asyncio
import json
import logging
from collections.abc import Coroutine
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from pydantic import ValidationError

from drayage import config
from drayage.analysis.aggregate import long_format, seasonal_aggregate
from drayage.analysis.aux_sweep import ambient_aux_sweep
from drayage.analysis.batch import BatchJob, run_batch
from drayage.analysis.monthly import fleet_distribution, monthly_consumption
from drayage.analysis.sensitivity import SensitivitySpec, baseline_scenarios, sensitivity
from drayage.calibration import init_cache
from drayage.exceptions import ScenarioValidationError
from drayage.models.scenario import Scenario, SimConfig
from drayage.models.vehicle import VehicleConfig, load_vehicle
from drayage.performance import performance_characterize
from drayage.scenarios import (
    DemoDataset,
    attach_weather,
    build_fleet_itineraries,
    group_routes,
    load_city_temperatures,
    load_demo_dataset,
    load_route,
    load_weather,
    make_demo_dataset,
)
from drayage.scenarios.daytypes import day_type_dates, select_day_types
from drayage.simulator import energy_metrics, run
from drayage.utils.units import c_to_k
from drayage.validation import run_validation

try:
    import uvloop
except ImportError:  # Windows, or not installed
    uvloop = None

logging.basicConfig(level=config.LOG_LEVEL)
logger = logging.getLogger("drayage")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PARTIAL = 3

DEFAULT_VEHICLE = config.VEHICLES_DIR / "conventional.json"
# loaded gross masses drawn for itineraries, kg
DEFAULT_MASSES = [18_000.0, 22_000.0, 27_200.0, 31_000.0, 34_500.0]


def _arun(coro: Coroutine[Any, Any, Any]) -> Any:
    if uvloop is not None:
        return uvloop.run(coro)
    return asyncio.run(coro)


def _vehicle(args: argparse.Namespace) -> VehicleConfig:
    return load_vehicle(args.vehicle or DEFAULT_VEHICLE)


def _simcfg(args: argparse.Namespace, record_trace: bool = False) -> SimConfig:
    return SimConfig(dt=args.dt, record_trace=record_trace)


def _dataset(args: argparse.Namespace) -> DemoDataset:
    if args.dataset:
        return load_demo_dataset(args.dataset)
    return make_demo_dataset(
        n_destinations=args.destinations, seed=args.seed, months=_months(args.months)
    )


def _months(raw: str | None) -> list[int] | None:
    if not raw:
        return None
    return sorted({int(m) for m in raw.split(",") if m.strip()})


def _write_table(df: pd.DataFrame, out: Path, stem: str, fmt: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{stem}.json"
        path.write_text(df.to_json(orient="records", indent=2) + "\n")
    else:
        path = out / f"{stem}.csv"
        df.to_csv(path, index=False)
    print(f"Wrote {path}")
    return path


def _write_json(obj: Any, out: Path, name: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n")
    print(f"Wrote {path}")
    return path


# ---------- commands ----------

def cmd_simulate(args: argparse.Namespace) -> int:
    vehicle = _vehicle(args)
    route = load_route(args.route)
    weather = attach_weather(route, load_weather(args.weather))
    scenario = Scenario(
        id=args.id or route.id,
        route=route,
        weather=weather,
        mass=args.mass,
        configuration=args.configuration,
    )
    result = run(scenario, vehicle, _simcfg(args, record_trace=args.trace))
    out = Path(args.out)
    _write_json(result.to_dict(), out, f"{scenario.id}.json")
    if result.trace is not None:
        _write_table(result.trace, out, f"{scenario.id}_trace", args.format)
    summary = {"status": result.totals.status}
    if result.totals.distance_km > 0:
        summary.update(energy_metrics(result))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK if result.ok else EXIT_PARTIAL


def cmd_batch(args: argparse.Namespace) -> int:
    vehicle = _vehicle(args)
    ds = _dataset(args)
    groups = group_routes(ds.routes, args.groups, args.seed, port=ds.port) if args.groups else None
    scenarios = ds.scenarios(
        args.mass,
        months=_months(args.months),
        configuration=args.configuration,
        groups=groups,
    )
    if args.limit:
        scenarios = baseline_scenarios(scenarios, args.limit, args.seed)
    job = BatchJob(
        scenarios=scenarios,
        vehicle=vehicle,
        simcfg=_simcfg(args),
        max_concurrency=args.jobs,
        seed=args.seed,
        out_dir=Path(args.out),
    )
    outcome = _arun(run_batch(job))
    print(f"Wrote {len(outcome.results)} results to {args.out} ({len(outcome.failures)} failed)")
    return EXIT_OK if outcome.ok else EXIT_PARTIAL


def cmd_sensitivity(args: argparse.Namespace) -> int:
    vehicle = _vehicle(args)
    ds = _dataset(args)
    pool = ds.scenarios(args.mass, months=_months(args.months), day_types=("nominal",))
    spec_kwargs: dict[str, Any] = {"scenarios": baseline_scenarios(pool, args.routes, args.seed)}
    if args.factors:
        spec_kwargs["factors"] = [f.strip() for f in args.factors.split(",") if f.strip()]
    if args.step is not None:
        spec_kwargs["step"] = args.step
    spec = SensitivitySpec(**spec_kwargs)
    table = _arun(sensitivity(spec, vehicle, _simcfg(args), max_concurrency=args.jobs))
    _write_table(table, Path(args.out), f"sensitivity_{vehicle.name}", args.format)
    return EXIT_OK


def cmd_daytypes(args: argparse.Namespace) -> int:
    tables = load_city_temperatures(args.cities)
    rows = []
    for route_id, table in sorted(tables.items()):
        idx = select_day_types(table)
        dates = day_type_dates(table)
        for kind in ("cold", "nominal", "hot"):
            rows.append(
                {
                    "route_id": route_id,
                    "day_type": kind,
                    "day_index": idx[kind],
                    "date": dates[kind],
                }
            )
    _write_table(pd.DataFrame(rows), Path(args.out), "day_types", args.format)
    return EXIT_OK


def cmd_group(args: argparse.Namespace) -> int:
    ds = _dataset(args)
    assignment = group_routes(ds.routes, args.k, args.seed, port=ds.port)
    df = pd.DataFrame(sorted(assignment.items()), columns=["route_id", "group"])
    _write_table(df, Path(args.out), "route_groups", args.format)
    return EXIT_OK


def cmd_itinerary(args: argparse.Namespace) -> int:
    vehicle = _vehicle(args)
    ds = _dataset(args)
    months = _months(args.months) or sorted(ds.weather_by_month)
    masses = [float(m) for m in args.masses.split(",")] if args.masses else DEFAULT_MASSES
    plans = build_fleet_itineraries(
        ds.routes,
        ds.weights or None,
        ds.weather_by_month,
        masses=masses,
        vehicle=vehicle,
        trucks=args.trucks,
        months=months,
        monthly_vmt_target=args.vmt,
        seed=args.seed,
    )
    rows = [
        {
            "truck": truck,
            "month": month,
            "order": i,
            "scenario_id": sc.id,
            "route_id": sc.route.id,
            "day_type": sc.weather.day_type,
            "mass_kg": sc.mass,
            "route_km": sc.route.length_km,
        }
        for (truck, month), plan in sorted(plans.items())
        for i, sc in enumerate(plan)
    ]
    out = Path(args.out)
    _write_table(pd.DataFrame(rows), out, "itineraries", args.format)
    if not args.run:
        return EXIT_OK

    scenarios = [sc for plan in plans.values() for sc in plan]
    job = BatchJob(
        scenarios=scenarios,
        vehicle=vehicle,
        simcfg=_simcfg(args),
        max_concurrency=args.jobs,
        seed=args.seed,
        out_dir=out / "runs",
    )
    outcome = _arun(run_batch(job))
    monthly = monthly_consumption(outcome.results, months)
    _write_table(monthly, out, "monthly", args.format)
    column = "battery_kwh" if vehicle.pack is not None else "fuel_l"
    _write_table(fleet_distribution(monthly, column), out, "monthly_distribution", args.format)
    return EXIT_OK if outcome.ok else EXIT_PARTIAL


def cmd_aggregate(args: argparse.Namespace) -> int:
    summary = Path(args.results)
    if summary.is_dir():
        summary = summary / "summary.csv"
    df = pd.read_csv(summary)
    by = [c.strip() for c in args.by.split(",") if c.strip()]
    stats = seasonal_aggregate(df, by=by, metric=args.metric)
    out = Path(args.out)
    _write_table(stats, out, "aggregate", args.format)
    if args.long:
        _write_table(long_format(stats), out, "aggregate_long", "csv")
    return EXIT_OK


def cmd_perf(args: argparse.Namespace) -> int:
    vehicle = _vehicle(args)
    report = performance_characterize(vehicle, mass=args.mass, configuration=args.configuration)
    _write_json(report.model_dump(), Path(args.out), f"performance_{vehicle.name}.json")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    vehicle = _vehicle(args)
    report = run_validation(vehicle, _simcfg(args))
    _write_json(report, Path(args.out), f"validation_{vehicle.name}.json")
    for name in ("fall", "winter"):
        case = report[name]
        sim = case["simulated_l_per_100km"]
        logger.info(
            "%s: simulated %s L/100km vs measured %.2f",
            name,
            "n/a" if sim is None else f"{sim:.2f}",
            case["measured_l_per_100km"],
        )
    return EXIT_OK


def cmd_demo(args: argparse.Namespace) -> int:
    ds = make_demo_dataset(
        n_destinations=args.destinations, seed=args.seed, months=_months(args.months)
    )
    path = ds.write(args.out)
    print(f"Wrote {len(ds.routes)} routes to {path}")
    return EXIT_OK


def cmd_auxsweep(args: argparse.Namespace) -> int:
    vehicle = _vehicle(args)
    temps_c = np.arange(args.tmin, args.tmax + 0.5 * args.step, args.step)
    df = ambient_aux_sweep(vehicle, [c_to_k(float(t)) for t in temps_c], rpm=args.rpm)
    best = df.loc[df["total"].idxmin()]
    logger.info("minimum total aux power %.0f W at %.1f C", best["total"], best["T_amb_C"])
    _write_table(df, Path(args.out), f"aux_sweep_{vehicle.name}", args.format)
    return EXIT_OK


# ---------- parser ----------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--vehicle", default=None, help=f"vehicle JSON (default {DEFAULT_VEHICLE.name})"
    )
    common.add_argument("--out", default="out")
    common.add_argument("--dt", type=float, default=config.SIM_DT)
    common.add_argument("--seed", type=int, default=config.SEED)
    common.add_argument("--jobs", type=int, default=config.BATCH_MAX_CONCURRENCY)
    common.add_argument("--format", choices=["csv", "json"], default="csv")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument(
        "--dataset", default=None, help="directory written by `demo`; generated when unset"
    )
    data.add_argument("--destinations", type=int, default=20)
    data.add_argument("--months", default=None, help="comma list, e.g. 1,7")

    load = argparse.ArgumentParser(add_help=False)
    load.add_argument("--mass", type=float, default=27_200.0, help="gross mass, kg")
    load.add_argument(
        "--configuration",
        default="tractor_trailer",
        choices=["bobtail", "tractor_trailer", "tractor_flatbed"],
    )

    ap = argparse.ArgumentParser(prog="drayage", description="Drayage truck energy simulation")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common, load], help="one route + weather")
    p.add_argument("--route", required=True)
    p.add_argument("--weather", required=True)
    p.add_argument("--id", default=None)
    p.add_argument("--trace", action="store_true", help="also write the time trace")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("batch", parents=[common, data, load], help="every route x month x day type")
    p.add_argument("--groups", type=int, default=0, help="k for route grouping (0 = none)")
    p.add_argument("--limit", type=int, default=0, help="seeded subset of scenarios")
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("sensitivity", parents=[common, data, load], help="one-at-a-time +/- sweep")
    p.add_argument("--routes", type=int, default=200, help="baseline scenario count")
    p.add_argument("--factors", default=None)
    p.add_argument("--step", type=float, default=None)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("daytypes", parents=[common], help="cold/nominal/hot days per route")
    p.add_argument("--cities", required=True, help="city temperature CSV")
    p.set_defaults(func=cmd_daytypes)

    p = sub.add_parser("group", parents=[common, data], help="k-means route groups")
    p.add_argument("-k", type=int, default=5)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("itinerary", parents=[common, data], help="per-truck monthly itineraries")
    p.add_argument("--trucks", type=int, default=config.FLEET_SIZE)
    p.add_argument("--vmt", type=float, default=config.MONTHLY_VMT_KM, help="km per truck-month")
    p.add_argument("--masses", default=None, help="comma list of gross masses, kg")
    p.add_argument("--run", action="store_true", help="simulate and report monthly totals")
    p.set_defaults(func=cmd_itinerary)

    p = sub.add_parser("aggregate", parents=[common], help="statistics over a batch summary")
    p.add_argument("--results", required=True, help="batch output dir or summary CSV")
    p.add_argument("--by", default="group,month,day_type")
    p.add_argument("--metric", default=None)
    p.add_argument("--long", action="store_true", help="also write plot-ready long format")
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("perf", parents=[common, load], help="max speed, gradeability, startability")
    p.set_defaults(func=cmd_perf)

    p = sub.add_parser("validate", parents=[common], help="track-test regression")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("demo", parents=[common], help="write the synthetic dataset")
    p.add_argument("--destinations", type=int, default=20)
    p.add_argument("--months", default=None)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("auxsweep", parents=[common], help="aux power vs constant ambient")
    p.add_argument("--tmin", type=float, default=-20.0, help="C")
    p.add_argument("--tmax", type=float, default=40.0, help="C")
    p.add_argument("--step", type=float, default=1.0, help="C")
    p.add_argument(
        "--rpm", type=float, default=None, help="diesel engine speed for shaft-driven loads"
    )
    p.set_defaults(func=cmd_auxsweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logger.debug("%s environment, calibration data in %s", config.ENVIRONMENT, config.DATA_DIR)
    init_cache()
    try:
        return args.func(args)
    except (ScenarioValidationError, ValidationError, ValueError, FileNotFoundError) as e:
        logger.error("%s", e)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
