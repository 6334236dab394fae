from .daytypes import representative_route_temperature, select_day_types
from .demo import DemoDataset, load_demo_dataset, make_demo_dataset
from .grouping import group_routes
from .itinerary import build_fleet_itineraries, build_itinerary
from .labels import distance_band, season_of
from .routes import load_route, reverse_route, scale_route, straight_route
from .weather import (
    air_density,
    attach_weather,
    constant_weather,
    load_city_temperatures,
    load_weather,
    scale_weather,
)

__all__ = [
    "DemoDataset",
    "air_density",
    "attach_weather",
    "build_fleet_itineraries",
    "build_itinerary",
    "constant_weather",
    "distance_band",
    "group_routes",
    "load_city_temperatures",
    "load_demo_dataset",
    "load_route",
    "load_weather",
    "make_demo_dataset",
    "representative_route_temperature",
    "reverse_route",
    "scale_route",
    "scale_weather",
    "season_of",
    "select_day_types",
    "straight_route",
]
