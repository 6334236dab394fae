from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .route import RouteProfile
from .vehicle import Configuration, VehicleConfig
from .weather import WeatherTrace
from ..exceptions import ScenarioValidationError


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    route: RouteProfile
    weather: WeatherTrace
    mass: float = Field(gt=0, description="gross mass, kg")
    configuration: Configuration = "tractor_trailer"
    group: int | None = None
    truck: str | None = None

    @model_validator(mode="after")
    def _weather_matches_route(self) -> "Scenario":
        if len(self.weather.samples) != len(self.route.points):
            raise ValueError(
                f"scenario {self.id}: {len(self.weather.samples)} weather samples "
                f"for {len(self.route.points)} route points"
            )
        return self

    def check_vehicle(self, vehicle: VehicleConfig) -> None:
        body = vehicle.body
        if not body.curb_mass <= self.mass <= body.max_gross_mass:
            raise ScenarioValidationError(
                f"mass {self.mass:.0f} kg outside [{body.curb_mass:.0f}, {body.max_gross_mass:.0f}] "
                f"for {vehicle.name}",
                record=self.id,
            )
        if self.configuration not in vehicle.aero.cd:
            raise ScenarioValidationError(
                f"configuration {self.configuration} has no drag table on {vehicle.name}",
                record=self.id,
            )

    def metadata(self) -> dict:
        return {
            "scenario_id": self.id,
            "route_id": self.route.id,
            "direction": self.route.direction,
            "month": self.weather.month or self.route.month,
            "day_type": self.weather.day_type,
            "configuration": self.configuration,
            "mass_kg": self.mass,
            "group": self.group,
            "truck": self.truck,
            "route_km": self.route.length_km,
            "mean_T_amb_K": self.weather.mean_temperature,
        }


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    dt: float = Field(default=1.0, gt=0, le=2)
    initial_soc: float = Field(default=0.95, ge=0, le=1)
    initial_tire_temp: float | None = Field(default=None, description="K; route-start ambient when unset")
    initial_cell_temp: float | None = None
    initial_housing_temp: float | None = None
    record_stride: int = Field(default=1, ge=1)
    record_trace: bool = True
    max_duration: float | None = Field(default=None, gt=0, description="s; derived from route when unset")
    rc_substeps: int = Field(default=10, ge=1)
    housing_loop: bool = True
