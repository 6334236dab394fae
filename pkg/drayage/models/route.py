from __future__ import annotations

from functools import cached_property
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

MAX_ABS_GRADE = 0.25

Direction = Literal["inbound", "outbound"]


class RoutePoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    lat: float
    lon: float
    s: float = Field(description="cumulative distance, m")
    v_lim: float = Field(gt=0, description="speed limit, m/s")
    z: float = Field(description="elevation, m")
    heading: float = Field(ge=0, lt=360, description="degrees clockwise from north")
    # grade of the segment leaving this point; last point repeats the previous segment
    grade: float = 0.0


class RouteProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    direction: Direction = "outbound"
    month: int = Field(default=1, ge=1, le=12)
    points: list[RoutePoint]

    @model_validator(mode="after")
    def _check_points(self) -> "RouteProfile":
        if len(self.points) < 2:
            raise ValueError(f"route {self.id}: at least 2 points required")
        for i in range(1, len(self.points)):
            if self.points[i].s <= self.points[i - 1].s:
                raise ValueError(f"route {self.id}: distance not increasing at point {i + 1}")
        for i, p in enumerate(self.points):
            if abs(p.grade) > MAX_ABS_GRADE + 1e-12:
                raise ValueError(f"route {self.id}: |grade| > {MAX_ABS_GRADE} at point {i + 1}")
        return self

    # numpy views used by the simulator; the model is frozen so caching is safe

    @cached_property
    def distances(self) -> np.ndarray:
        return np.array([p.s for p in self.points], dtype=float)

    @cached_property
    def grades(self) -> np.ndarray:
        return np.array([p.grade for p in self.points], dtype=float)

    @cached_property
    def speed_limits(self) -> np.ndarray:
        return np.array([p.v_lim for p in self.points], dtype=float)

    @cached_property
    def headings(self) -> np.ndarray:
        return np.array([p.heading for p in self.points], dtype=float)

    @cached_property
    def elevations(self) -> np.ndarray:
        return np.array([p.z for p in self.points], dtype=float)

    @property
    def start(self) -> float:
        return self.points[0].s

    @property
    def length_m(self) -> float:
        return self.points[-1].s - self.points[0].s

    @property
    def length_km(self) -> float:
        return self.length_m / 1000.0

    def segment_index(self, s: float) -> int:
        """Index of the point whose segment contains distance `s` (piecewise constant)."""
        i = int(np.searchsorted(self.distances, s, side="right")) - 1
        return min(max(i, 0), len(self.points) - 1)

    @property
    def far_endpoint(self) -> RoutePoint:
        """The non-port end: destination for outbound trips, origin for inbound."""
        return self.points[-1] if self.direction == "outbound" else self.points[0]

    @property
    def port_endpoint(self) -> RoutePoint:
        return self.points[0] if self.direction == "outbound" else self.points[-1]
