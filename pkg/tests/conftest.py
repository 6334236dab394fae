from __future__ import annotations

import pytest

from drayage import config
from drayage.calibration import clear_cache, init_cache
from drayage.models.scenario import Scenario
from drayage.models.vehicle import load_vehicle
from drayage.scenarios.routes import straight_route
from drayage.scenarios.weather import constant_weather
from drayage.utils.units import c_to_k


@pytest.fixture(autouse=True)
def calibration_cache():
    init_cache()
    yield
    clear_cache()


@pytest.fixture(scope="session")
def diesel():
    return load_vehicle(config.VEHICLES_DIR / "conventional.json")


@pytest.fixture(scope="session")
def electric():
    return load_vehicle(config.VEHICLES_DIR / "electric.json")


def make_route(**overrides):
    kwargs = {"route_id": "flat", "length_m": 5_000.0, "v_lim": 25.0, "spacing_m": 500.0}
    kwargs.update(overrides)
    return straight_route(
        kwargs.pop("route_id"), kwargs.pop("length_m"), kwargs.pop("v_lim"), **kwargs
    )


def make_scenario(route=None, t_amb_c: float = 20.0, **overrides):
    route = route or make_route()
    kwargs = {
        "id": route.id,
        "route": route,
        "weather": constant_weather(route, c_to_k(t_amb_c)),
        "mass": 27_200.0,
    }
    kwargs.update(overrides)
    return Scenario(**kwargs)
