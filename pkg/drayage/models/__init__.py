from .route import RoutePoint, RouteProfile
from .scenario import Scenario, SimConfig
from .vehicle import VehicleConfig, load_vehicle
from .weather import CityTemperatureTable, WeatherSample, WeatherTrace

__all__ = [
    "CityTemperatureTable",
    "RoutePoint",
    "RouteProfile",
    "Scenario",
    "SimConfig",
    "VehicleConfig",
    "WeatherSample",
    "WeatherTrace",
    "load_vehicle",
]
