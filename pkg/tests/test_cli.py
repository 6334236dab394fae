import asyncio
import json
import logging

import pandas as pd
import pytest

from conftest import make_route, make_scenario
from drayage import config
from drayage.analysis.batch import BatchJob, run_batch
from drayage.main import build_parser, main
from drayage.models.scenario import SimConfig
from drayage.scenarios.routes import save_route
from drayage.scenarios.weather import constant_weather, save_weather
from drayage.utils.units import c_to_k

ELECTRIC = str(config.VEHICLES_DIR / "electric.json")


@pytest.fixture
def route_files(tmp_path):
    route = make_route(route_id="yard", length_m=3_000.0)
    save_route(route, tmp_path / "yard.csv")
    save_weather(constant_weather(route, c_to_k(15.0)), tmp_path / "yard.json")
    return tmp_path / "yard.csv", tmp_path / "yard.json"


class TestParser:
    def test_command_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_unknown_configuration(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["perf", "--configuration", "van"])

    def test_defaults(self):
        args = build_parser().parse_args(["batch"])
        assert args.mass == 27_200.0
        assert args.configuration == "tractor_trailer"
        assert args.seed == config.SEED


class TestCommands:
    def test_simulate(self, route_files, tmp_path):
        route, weather = route_files
        out = tmp_path / "out"
        args = ["simulate", "--route", str(route), "--weather", str(weather), "--trace"]
        code = main([*args, "--out", str(out)])
        assert code == 0
        result = json.loads((out / "yard.json").read_text())
        assert result["totals"]["status"] == "ok"
        assert result["totals"]["distance_km"] == pytest.approx(3.0, abs=0.01)
        trace = pd.read_csv(out / "yard_trace.csv")
        assert len(trace) > 10

    def test_simulate_rejects_overweight(self, route_files, tmp_path):
        route, weather = route_files
        args = ["simulate", "--route", str(route), "--weather", str(weather), "--mass", "90000"]
        assert main([*args, "--out", str(tmp_path / "out")]) == 2

    def test_missing_file(self, tmp_path):
        args = ["simulate", "--route", str(tmp_path / "nope.csv")]
        args += ["--weather", str(tmp_path / "nope.json")]
        assert main([*args, "--out", str(tmp_path)]) == 2

    def test_demo_then_group(self, tmp_path):
        data = tmp_path / "data"
        assert main(["demo", "--destinations", "3", "--months", "1,7", "--out", str(data)]) == 0
        manifest = json.loads((data / "manifest.json").read_text())
        assert len(manifest["routes"]) == 6
        assert manifest["months"] == [1, 7]
        assert len(list((data / "weather").glob("*.json"))) == 6 * 2 * 3

        out = tmp_path / "groups"
        assert main(["group", "--dataset", str(data), "-k", "2", "--out", str(out)]) == 0
        groups = pd.read_csv(out / "route_groups.csv")
        assert len(groups) == 6
        assert set(groups["group"]) <= {1, 2}

    def test_logs_environment(self, tmp_path, monkeypatch, caplog):
        monkeypatch.setattr(config, "ENVIRONMENT", "staging")
        with caplog.at_level(logging.DEBUG, logger="drayage"):
            main(["demo", "--destinations", "1", "--months", "1", "--out", str(tmp_path)])
        assert "staging environment" in caplog.text

    def test_bad_months(self, tmp_path):
        assert main(["demo", "--destinations", "1", "--months", "jan", "--out", str(tmp_path)]) == 2

    def test_perf(self, tmp_path):
        assert main(["perf", "--vehicle", ELECTRIC, "--out", str(tmp_path)]) == 0
        report = json.loads(next(tmp_path.glob("performance_*.json")).read_text())
        assert report["max_speed_kmh"] > 100.0
        assert report["startability_pct"] >= 6.0

    def test_auxsweep(self, tmp_path):
        args = ["auxsweep", "--vehicle", ELECTRIC, "--tmin", "0", "--tmax", "30"]
        code = main([*args, "--out", str(tmp_path)])
        assert code == 0
        df = pd.read_csv(next(tmp_path.glob("aux_sweep_*.csv")))
        assert len(df) == 31
        assert {"btms_heater", "btms_chiller", "total"} <= set(df.columns)

    def test_daytypes(self, tmp_path):
        rows = [
            {"route_id": "R1", "day": f"2023-01-{d:02d}", "city": city, "T_K": c_to_k(t + off)}
            for d, t in enumerate([5.0, 12.0, 9.0, 20.0], start=1)
            for city, off in (("port", 0.0), ("inland", 2.0))
        ]
        cities = tmp_path / "cities.csv"
        pd.DataFrame(rows).to_csv(cities, index=False)
        assert main(["daytypes", "--cities", str(cities), "--out", str(tmp_path)]) == 0
        picked = pd.read_csv(tmp_path / "day_types.csv").set_index("day_type")
        assert picked.loc["cold", "date"] == "2023-01-01"
        assert picked.loc["hot", "date"] == "2023-01-04"

    def test_aggregate(self, diesel, tmp_path):
        routes = [make_route(route_id=f"A{i}", length_m=2_000.0 + 500.0 * i) for i in range(3)]
        fast = SimConfig(record_trace=False)
        job = BatchJob([make_scenario(r) for r in routes], diesel, fast, max_concurrency=1, out_dir=tmp_path)
        asyncio.run(run_batch(job))
        out = tmp_path / "stats"
        args = ["aggregate", "--results", str(tmp_path), "--by", "day_type"]
        args += ["--metric", "l_per_100km"]
        assert main([*args, "--out", str(out), "--long"]) == 0
        stats = pd.read_csv(out / "aggregate.csv")
        assert len(stats) == 1
        assert stats.loc[0, "count"] == 3
        assert (out / "aggregate_long.csv").exists()
