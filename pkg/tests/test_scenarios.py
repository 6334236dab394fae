import json
import logging

import numpy as np
import pandas as pd
import pytest

from conftest import make_route
from drayage.exceptions import ScenarioValidationError
from drayage.models.scenario import Scenario
from drayage.models.weather import CityTemperatureTable, WeatherSample, WeatherTrace
from drayage.scenarios import (
    attach_weather,
    build_fleet_itineraries,
    build_itinerary,
    constant_weather,
    distance_band,
    group_routes,
    load_city_temperatures,
    load_demo_dataset,
    load_route,
    load_weather,
    make_demo_dataset,
    representative_route_temperature,
    reverse_route,
    scale_route,
    scale_weather,
    season_of,
    select_day_types,
    straight_route,
)
from drayage.scenarios.daytypes import day_type_dates
from drayage.scenarios.routes import route_frame, route_from_frame, save_route
from drayage.scenarios.weather import save_weather
from drayage.utils.geo import offset_point
from drayage.utils.units import c_to_k


def make_frame(n=10, spacing=1000.0, dz=0.0):
    return pd.DataFrame(
        {
            "lat": [33.75 + 0.009 * i for i in range(n)],
            "lon": [-118.2] * n,
            "s_m": [spacing * i for i in range(n)],
            "v_lim_mps": [25.0] * n,
            "z_m": [dz * i for i in range(n)],
        }
    )


def make_table(reps, route_id="R1"):
    return CityTemperatureTable(
        route_id=route_id,
        days=[f"2023-01-{d + 1:02d}" for d in range(len(reps))],
        cities=["port"],
        temps=[[t] for t in reps],
    )


class TestLoadRoute:
    def test_flat_two_points(self, tmp_path):
        path = tmp_path / "r.csv"
        make_frame(n=2).to_csv(path, index=False)
        route = load_route(path)
        assert route.id == "r"
        assert np.all(route.grades == 0.0)

    def test_grade_from_elevation(self, tmp_path):
        path = tmp_path / "r.csv"
        make_frame(dz=10.0).to_csv(path, index=False)
        assert load_route(path).grades == pytest.approx(0.01)

    def test_decreasing_distance_names_the_row(self, tmp_path):
        df = make_frame()
        df.loc[6, "s_m"] = 4_500.0
        path = tmp_path / "r.csv"
        df.to_csv(path, index=False)
        with pytest.raises(ScenarioValidationError, match="record 7") as exc:
            load_route(path)
        assert exc.value.record == 7

    def test_bad_value_names_the_row(self):
        df = make_frame()
        df.loc[3, "v_lim_mps"] = np.nan
        with pytest.raises(ScenarioValidationError) as exc:
            route_from_frame(df, "x")
        assert exc.value.record == 4

    def test_missing_column(self, tmp_path):
        path = tmp_path / "r.csv"
        make_frame().drop(columns="z_m").to_csv(path, index=False)
        with pytest.raises(ScenarioValidationError, match="z_m"):
            load_route(path)

    def test_csv_header_metadata(self, tmp_path):
        path = tmp_path / "r.csv"
        with open(path, "w") as fh:
            fh.write("# id=R007-in\n# direction=inbound\n# month=7\n")
            make_frame().to_csv(fh, index=False)
        route = load_route(path)
        assert (route.id, route.direction, route.month) == ("R007-in", "inbound", 7)

    def test_json_array_and_object(self, tmp_path):
        records = make_frame().to_dict(orient="records")
        (tmp_path / "a.json").write_text(json.dumps(records))
        (tmp_path / "b.json").write_text(json.dumps({"id": "B", "direction": "inbound", "points": records}))
        a = load_route(tmp_path / "a.json")
        b = load_route(tmp_path / "b.json")
        assert a.id == "a" and b.id == "B" and b.direction == "inbound"
        assert a.distances.tolist() == b.distances.tolist()

    def test_unparseable(self, tmp_path):
        path = tmp_path / "r.json"
        path.write_text("{not json")
        with pytest.raises(ScenarioValidationError, match="cannot parse"):
            load_route(path)

    def test_steep_grade_clamped_with_warning(self, caplog):
        df = make_frame(n=3, spacing=100.0)
        df.loc[2, "z_m"] = 40.0
        with caplog.at_level(logging.WARNING):
            route = route_from_frame(df, "steep")
        assert route.grades.max() == pytest.approx(0.25)
        assert "clamped" in caplog.text

    def test_headings_from_coordinates(self):
        # make_frame steps due north
        route = route_from_frame(make_frame(), "north")
        assert route.headings == pytest.approx(0.0, abs=0.1)

    def test_save_and_reload(self, tmp_path):
        route = make_route(grade=0.01)
        save_route(route, tmp_path / "x.csv")
        again = load_route(tmp_path / "x.csv")
        assert again.id == route.id
        np.testing.assert_allclose(again.elevations, route.elevations)


class TestRouteTransforms:
    def test_reverse(self):
        up = make_route(grade=0.01)
        down = reverse_route(up, "down")
        assert down.direction == "inbound"
        assert down.length_m == pytest.approx(up.length_m)
        assert down.grades == pytest.approx(-0.01)
        assert down.far_endpoint.lat == pytest.approx(up.far_endpoint.lat)

    def test_scale(self):
        route = make_route(grade=0.02)
        scaled = scale_route(route, speed_limit=1.1, grade=0.5)
        assert scaled.speed_limits == pytest.approx(27.5)
        assert scaled.grades == pytest.approx(0.01)
        assert scale_route(route) is route


class TestWeather:
    def test_attach_broadcasts_single_sample(self):
        route = make_route()
        trace = WeatherTrace(samples=[WeatherSample(T_amb=290.0)])
        assert len(attach_weather(route, trace).samples) == len(route.points)

    def test_attach_rejects_mismatch(self):
        route = make_route()
        trace = WeatherTrace(samples=[WeatherSample(T_amb=290.0)] * 3)
        with pytest.raises(ScenarioValidationError):
            attach_weather(route, trace)

    def test_scenario_checks_point_count(self):
        route = make_route()
        with pytest.raises(ValueError):
            Scenario(id="x", route=route, weather=WeatherTrace(samples=[WeatherSample(T_amb=290.0)] * 2), mass=2e4)

    def test_density_fallback(self):
        assert WeatherSample(T_amb=c_to_k(15.0)).density == pytest.approx(1.225, abs=0.002)
        assert WeatherSample(T_amb=c_to_k(15.0), rho_a=1.3).density == 1.3

    def test_sample_bounds(self):
        with pytest.raises(ValueError):
            WeatherSample(T_amb=150.0)
        with pytest.raises(ValueError):
            WeatherSample(T_amb=290.0, rho_a=2.0)

    def test_file_round_trip(self, tmp_path):
        route = make_route()
        trace = constant_weather(route, c_to_k(-6.3), rho_a=1.337, v_w=3.0, theta_w=270.0, day_type="cold")
        save_weather(trace, tmp_path / "w.json")
        again = load_weather(tmp_path / "w.json")
        assert again.day_type == "cold"
        assert again.samples[0].rho_a == pytest.approx(1.337)
        assert again.samples[0].theta_w == pytest.approx(270.0)

    def test_temperature_scaled_on_celsius(self):
        route = make_route()
        trace = constant_weather(route, c_to_k(20.0), rho_a=1.2)
        hot = scale_weather(trace, temperature=1.1, density=0.9)
        assert hot.samples[0].T_amb == pytest.approx(c_to_k(22.0))
        assert hot.samples[0].rho_a == pytest.approx(1.08)

    def test_city_temperatures(self, tmp_path):
        rows = [
            {"route_id": "R1", "day": f"2023-01-0{d}", "city": c, "T_K": 280.0 + d + i}
            for d in (1, 2, 3)
            for i, c in enumerate(["port", "inland"])
        ]
        path = tmp_path / "c.csv"
        pd.DataFrame(rows).to_csv(path, index=False)
        tables = load_city_temperatures(path)
        t = tables["R1"]
        assert t.cities == ["port", "inland"]
        assert t.array.shape == (3, 2)
        assert t.array[2, 1] == pytest.approx(284.0)

    def test_numbered_days_keep_calendar_order(self, tmp_path):
        temps = {d: 285.0 for d in range(1, 12)}
        temps[2] = temps[10] = 270.0
        rows = [
            {"route_id": "R1", "day": d, "city": "port", "T_K": t}
            for d, t in temps.items()
        ]
        path = tmp_path / "c.csv"
        pd.DataFrame(rows).to_csv(path, index=False)
        table = load_city_temperatures(path)["R1"]
        assert table.days == [str(d) for d in range(1, 12)]
        assert select_day_types(table)["cold"] == 2
        assert day_type_dates(table)["cold"] == "2"

    def test_dates_sorted_whatever_the_file_order(self, tmp_path):
        days = ["2023-01-03", "2023-01-01", "2023-01-02"]
        rows = [{"route_id": "R1", "day": d, "city": "port", "T_K": 280.0 + i} for i, d in enumerate(days)]
        path = tmp_path / "c.csv"
        pd.DataFrame(rows).to_csv(path, index=False)
        table = load_city_temperatures(path)["R1"]
        assert table.days == sorted(days)
        assert table.array[:, 0].tolist() == [281.0, 282.0, 280.0]

    def test_city_temperatures_with_gap(self, tmp_path):
        path = tmp_path / "c.csv"
        pd.DataFrame(
            [
                {"route_id": "R1", "day": "d1", "city": "a", "T_K": 280.0},
                {"route_id": "R1", "day": "d1", "city": "b", "T_K": 281.0},
                {"route_id": "R1", "day": "d2", "city": "a", "T_K": 282.0},
            ]
        ).to_csv(path, index=False)
        with pytest.raises(ScenarioValidationError, match="gaps"):
            load_city_temperatures(path)


class TestDayTypes:
    @pytest.mark.parametrize(
        "temps, expected",
        [([290.0, 290.0, 290.0], 290.0), ([280.0, 300.0], 290.1724), ([300.0], 300.0)],
    )
    def test_rms(self, temps, expected):
        assert representative_route_temperature(temps) == pytest.approx(expected, abs=1e-4)

    def test_rms_permutation_and_bounds(self):
        temps = [271.0, 283.5, 296.2, 301.0]
        rms = representative_route_temperature(temps)
        assert rms == pytest.approx(representative_route_temperature(temps[::-1]))
        assert min(temps) <= rms <= max(temps)

    def test_rms_empty(self):
        with pytest.raises(ValueError):
            representative_route_temperature([])

    def test_three_days(self):
        assert select_day_types(make_table([290.0, 285.0, 295.0])) == {"cold": 2, "nominal": 1, "hot": 3}

    def test_all_equal(self):
        assert select_day_types(make_table([288.0] * 5)) == {"cold": 1, "nominal": 1, "hot": 1}

    def test_even_days_tie_goes_early(self):
        assert select_day_types(make_table([280.0, 290.0, 300.0, 310.0]))["nominal"] == 2

    def test_dates(self):
        assert day_type_dates(make_table([290.0, 285.0, 295.0]))["hot"] == "2023-01-03"


class TestGrouping:
    def _routes(self):
        routes = []
        for i, (bearing, dist) in enumerate([(10, 20e3), (12, 22e3), (14, 21e3), (150, 200e3), (152, 210e3)]):
            end = offset_point(33.75, -118.2, bearing, dist)
            df = pd.DataFrame(
                {"lat": [33.75, end[0]], "lon": [-118.2, end[1]], "s_m": [0.0, dist],
                 "v_lim_mps": [25.0, 25.0], "z_m": [0.0, 0.0]}
            )
            routes.append(route_from_frame(df, f"R{i}"))
        return routes

    def test_two_clusters(self):
        groups = group_routes(self._routes(), 2, seed=3, port=(33.75, -118.2))
        assert groups == {"R0": 1, "R1": 1, "R2": 1, "R3": 2, "R4": 2}

    def test_one_group_per_route(self):
        groups = group_routes(self._routes(), 5, seed=3)
        assert sorted(groups.values()) == [1, 2, 3, 4, 5]

    def test_deterministic(self):
        routes = self._routes()
        assert group_routes(routes, 3, seed=9) == group_routes(routes, 3, seed=9)

    def test_bad_k(self):
        with pytest.raises(ValueError):
            group_routes(self._routes(), 6, seed=1)
        with pytest.raises(ValueError):
            group_routes(self._routes(), 0, seed=1)


class TestItinerary:
    def _pool(self, route):
        return {route.id: [constant_weather(route, c_to_k(t), day_type=k)
                           for t, k in ((0.0, "cold"), (15.0, "nominal"), (30.0, "hot"))]}

    def test_exact_division(self):
        route = straight_route("R100", 100_000.0, 25.0, spacing_m=5_000.0)
        plan = build_itinerary([route], None, self._pool(route), 500.0, seed=1, masses=[27_200.0])
        assert len(plan) == 5
        assert len({sc.id for sc in plan}) == 5

    def test_target_reached_within_one_route(self):
        routes = [straight_route(f"R{i}", L, 25.0, spacing_m=5_000.0) for i, L in enumerate((40e3, 95e3, 230e3))]
        pool = {}
        for r in routes:
            pool.update(self._pool(r))
        plan = build_itinerary(routes, [3, 2, 1], pool, 8046.0, seed=11, masses=[20e3, 27.2e3])
        km = sum(sc.route.length_km for sc in plan)
        assert 8046.0 <= km < 8046.0 + 230.0

    def test_deterministic(self):
        route = straight_route("R100", 100_000.0, 25.0, spacing_m=5_000.0)
        a = build_itinerary([route], None, self._pool(route), 900.0, seed=5, masses=[20e3, 25e3, 30e3])
        b = build_itinerary([route], None, self._pool(route), 900.0, seed=5, masses=[20e3, 25e3, 30e3])
        assert [(s.id, s.mass) for s in a] == [(s.id, s.mass) for s in b]

    def test_infeasible_masses_dropped(self, diesel):
        route = straight_route("R100", 100_000.0, 25.0, spacing_m=5_000.0)
        plan = build_itinerary([route], None, self._pool(route), 1000.0, seed=2,
                               masses=[10_000.0, 27_200.0, 40_000.0], vehicle=diesel)
        assert {sc.mass for sc in plan} == {27_200.0}
        with pytest.raises(ValueError, match="feasible"):
            build_itinerary([route], None, self._pool(route), 100.0, seed=2, masses=[50_000.0], vehicle=diesel)

    def test_empty_pool(self):
        with pytest.raises(ValueError):
            build_itinerary([], None, {}, 100.0, seed=1, masses=[27_200.0])

    def test_fleet(self):
        route = straight_route("R100", 100_000.0, 25.0, spacing_m=5_000.0)
        weather = {1: self._pool(route), 2: self._pool(route)}
        plans = build_fleet_itineraries([route], None, weather, masses=[27_200.0], trucks=3, months=[1, 2],
                                        monthly_vmt_target=300.0, seed=4)
        assert sorted(plans) == [(f"truck-{n:02d}", m) for n in (1, 2, 3) for m in (1, 2)]
        assert all(len(p) == 3 for p in plans.values())
        assert plans[("truck-02", 1)][0].truck == "truck-02"


class TestLabels:
    def test_seasons(self):
        assert [season_of(m) for m in (1, 4, 7, 10, 12)] == ["winter", "spring", "summer", "fall", "winter"]
        with pytest.raises(ValueError):
            season_of(13)

    def test_bands(self):
        assert [distance_band(k) for k in (10, 80, 239.9, 300, 500)] == ["<80", "80-240", "80-240", "240-400", ">=400"]


class TestDemoDataset:
    @pytest.fixture(scope="class")
    def ds(self):
        return make_demo_dataset(n_destinations=3, seed=5, months=[1, 7], spacing_m=2_000.0)

    def test_pairs_and_weather(self, ds):
        assert len(ds.routes) == 6
        assert {r.direction for r in ds.routes} == {"inbound", "outbound"}
        for month in (1, 7):
            for r in ds.routes:
                traces = ds.weather_by_month[month][r.id]
                assert [t.day_type for t in traces] == ["cold", "nominal", "hot"]
                assert all(len(t.samples) == len(r.points) for t in traces)

    def test_winter_colder_than_summer(self, ds):
        r = ds.routes[0]
        jan = ds.weather_by_month[1][r.id][1].mean_temperature
        jul = ds.weather_by_month[7][r.id][1].mean_temperature
        assert jan < jul

    def test_reproducible(self, ds):
        again = make_demo_dataset(n_destinations=3, seed=5, months=[1, 7], spacing_m=2_000.0)
        assert [r.length_m for r in again.routes] == [r.length_m for r in ds.routes]

    def test_scenarios(self, ds):
        scs = ds.scenarios(27_200.0, months=[7], day_types=("hot",))
        assert len(scs) == 6
        assert all(sc.weather.day_type == "hot" for sc in scs)

    def test_write_and_load(self, ds, tmp_path):
        ds.write(tmp_path)
        back = load_demo_dataset(tmp_path)
        assert [r.id for r in back.routes] == [r.id for r in ds.routes]
        assert back.weights == pytest.approx(ds.weights)
        tables = load_city_temperatures(tmp_path / "city_temperatures.csv")
        assert set(tables) == {"R001", "R002", "R003"}
        frame = route_frame(back.routes[0])
        assert len(frame) == len(ds.routes[0].points)
