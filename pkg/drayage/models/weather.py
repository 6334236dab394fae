from __future__ import annotations

from datetime import date as Date
from functools import cached_property
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..utils.units import air_density

DayType = Literal["cold", "nominal", "hot"]
DAY_TYPES: tuple[str, ...] = ("cold", "nominal", "hot")


class WeatherSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    T_amb: float = Field(ge=200, le=330, description="K")
    rho_a: float | None = Field(default=None, ge=0.9, le=1.5, description="kg/m^3")
    v_w: float = Field(default=0.0, ge=0, description="wind speed, m/s")
    theta_w: float = Field(default=0.0, description="wind direction, degrees from north")

    @property
    def density(self) -> float:
        """Air density, falling back to dry air at standard pressure."""
        return self.rho_a if self.rho_a is not None else air_density(self.T_amb)


class WeatherTrace(BaseModel):
    model_config = ConfigDict(frozen=True)

    day_type: DayType = "nominal"
    date: Date | None = None
    samples: list[WeatherSample]

    @model_validator(mode="after")
    def _non_empty(self) -> "WeatherTrace":
        if not self.samples:
            raise ValueError("weather trace has no samples")
        return self

    @cached_property
    def temperatures(self) -> np.ndarray:
        return np.array([w.T_amb for w in self.samples], dtype=float)

    @cached_property
    def densities(self) -> np.ndarray:
        return np.array([w.density for w in self.samples], dtype=float)

    @cached_property
    def wind_speeds(self) -> np.ndarray:
        return np.array([w.v_w for w in self.samples], dtype=float)

    @cached_property
    def wind_directions(self) -> np.ndarray:
        return np.array([w.theta_w for w in self.samples], dtype=float)

    @property
    def mean_temperature(self) -> float:
        return float(self.temperatures.mean())

    @property
    def month(self) -> int | None:
        return self.date.month if self.date else None


class CityTemperatureTable(BaseModel):
    """Daily-average temperatures of the N major cities along one route over D days."""

    model_config = ConfigDict(frozen=True)

    route_id: str
    days: list[str]
    cities: list[str]
    # temps[d][n]: day d, city n, K
    temps: list[list[float]]

    @model_validator(mode="after")
    def _shape(self) -> "CityTemperatureTable":
        arr = np.asarray(self.temps, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"route {self.route_id}: need at least one day and one city")
        if arr.shape != (len(self.days), len(self.cities)):
            raise ValueError(f"route {self.route_id}: temperature grid does not match day/city labels")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"route {self.route_id}: non-finite temperature")
        return self

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.temps, dtype=float)
