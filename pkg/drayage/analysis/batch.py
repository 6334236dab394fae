from __future__ import annotations

import asyncio
import json
import logging
from collections.abc import Mapping
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .. import config
from ..models.scenario import Scenario, SimConfig
from ..models.vehicle import VehicleConfig
from ..simulator import SimResult, run
from .aggregate import results_frame

LOGGER = logging.getLogger("batch")
if not LOGGER.handlers:
    h = logging.StreamHandler()
    fmt = logging.Formatter("[%(asctime)s] %(levelname)s batch: %(message)s")
    h.setFormatter(fmt)
    LOGGER.addHandler(h)
LOGGER.setLevel(config.LOG_LEVEL)


@dataclass
class BatchJob:
    scenarios: list[Scenario]
    vehicle: VehicleConfig
    simcfg: SimConfig = field(default_factory=lambda: SimConfig(record_trace=False))
    max_concurrency: int = config.BATCH_MAX_CONCURRENCY
    timeout: float = config.BATCH_PER_SCENARIO_TIMEOUT
    seed: int = config.SEED
    out_dir: Path | None = None
    # per-scenario vehicle (sensitivity perturbations, battery variants)
    vehicle_overrides: Mapping[str, VehicleConfig] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.scenarios:
            raise ValueError("batch has no scenarios")
        ids = [s.id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise ValueError("scenario ids must be unique within a batch")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")

    def vehicle_for(self, scenario_id: str) -> VehicleConfig:
        return self.vehicle_overrides.get(scenario_id, self.vehicle)


@dataclass
class BatchOutcome:
    results: list[SimResult]
    failures: dict[str, str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def by_id(self) -> dict[str, SimResult]:
        return {r.scenario_id: r for r in self.results}


def _simulate(scenario: Scenario, vehicle: VehicleConfig, simcfg: SimConfig) -> SimResult:
    # module-level so the process pool can pickle it
    return run(scenario, vehicle, simcfg)


async def run_batch(job: BatchJob, executor: Executor | None = None) -> BatchOutcome:
    """Every scenario of the job, at most `max_concurrency` in flight; failures stay per scenario."""
    loop = asyncio.get_running_loop()
    own_pool = executor is None and job.max_concurrency > 1
    if own_pool:
        executor = ProcessPoolExecutor(max_workers=job.max_concurrency)
    sem = asyncio.Semaphore(job.max_concurrency)

    async def run_one(scenario: Scenario) -> tuple[str, SimResult | None, str | None]:
        async with sem:
            try:
                fut = loop.run_in_executor(executor, _simulate, scenario, job.vehicle_for(scenario.id), job.simcfg)
                return scenario.id, await asyncio.wait_for(fut, timeout=job.timeout), None
            except asyncio.TimeoutError:
                LOGGER.warning("scenario %s timed out after %ss", scenario.id, job.timeout)
                return scenario.id, None, "timeout"
            except Exception as exc:
                LOGGER.exception("scenario %s failed", scenario.id)
                return scenario.id, None, f"{type(exc).__name__}: {exc}"

    try:
        outcomes = await asyncio.gather(*(run_one(s) for s in job.scenarios))
    finally:
        if own_pool:
            executor.shutdown(wait=True)

    results = sorted((r for _, r, _ in outcomes if r is not None), key=lambda r: r.scenario_id)
    failures = {sid: err for sid, _, err in sorted(outcomes, key=lambda o: o[0]) if err is not None}
    LOGGER.info("batch done: %d ok, %d failed", len(results), len(failures))
    outcome = BatchOutcome(results=results, failures=failures)
    if job.out_dir is not None:
        write_outcome(outcome, job.out_dir)
    return outcome


def write_outcome(outcome: BatchOutcome, out_dir: str | Path) -> Path:
    """One JSON per scenario id, a summary CSV and a failure list; byte-stable for equal inputs."""
    out = Path(out_dir)
    (out / "results").mkdir(parents=True, exist_ok=True)
    for r in outcome.results:
        (out / "results" / f"{r.scenario_id}.json").write_text(r.to_json() + "\n")
    if outcome.results:
        results_frame(outcome.results).to_csv(out / "summary.csv", index=False)
    (out / "failures.json").write_text(json.dumps(outcome.failures, indent=2, sort_keys=True) + "\n")
    return out
