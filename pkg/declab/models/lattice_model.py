# declab/models/lattice_model.py
# Lattice circles, arc assignments, correlation counts and exponential-sum specs.

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from declab.models._types import Rational
from declab.models.geometry_model import SquareRegion


class LatticeCircle(BaseModel):
    """Integer points with x^2 + y^2 = R, canonically sorted. `R = 0` marks a synthetic point set."""

    model_config = ConfigDict(frozen=True)

    R: int = Field(ge=0)
    points: tuple[tuple[int, int], ...] = ()

    @field_validator("points", mode="before")
    @classmethod
    def _canonical(cls, v):
        return tuple(sorted((int(x), int(y)) for x, y in v))

    @model_validator(mode="after")
    def _on_circle(self):
        if self.R > 0 and any(x * x + y * y != self.R for x, y in self.points):
            raise ValueError(f"point off the circle x^2 + y^2 = {self.R}")
        if len(set(self.points)) != len(self.points):
            raise ValueError("points must be distinct")
        return self

    @property
    def N(self) -> int:
        return len(self.points)

    @property
    def radius(self) -> float:
        return math.sqrt(self.R)

    @property
    def max_coordinate(self) -> int:
        return max((max(abs(x), abs(y)) for x, y in self.points), default=0)

    @classmethod
    def synthetic(cls, points) -> "LatticeCircle":
        return cls(R=0, points=points)

    def to_json_dict(self) -> dict:
        return {"R": self.R, "points": [list(p) for p in self.points]}


class ArcAssignment(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tau0: Rational
    arc_count: int
    subarc_width: float
    assignment: list[tuple[int, int, int, int]] = []   # (x, y, arc, subarc)
    occupancy: dict[int, int] = {}         # points per occupied subarc -> number of subarcs
    violations: list[tuple[int, int]] = []  # (arc, subarc) holding two or more points

    @property
    def max_occupancy(self) -> int:
        return max(self.occupancy, default=0)


class CorrelationResult(BaseModel):
    R: int
    N: int
    S6: int
    S4: int | None = None
    ratio_S6_N3: float | None = None
    method: Literal["brute6", "hash3", "dft"]
    M: int | None = None


class ExpSumSpec(BaseModel):
    """
    mode "period": integer frequencies over [0,1]^2 on an M x M grid (exact for M past Nyquist).
    mode "normalized": unit-circle frequencies a/sqrt(R) over `square` with a midpoint grid of M per side.
    """

    model_config = ConfigDict(frozen=True)

    points: LatticeCircle
    p: float = Field(ge=1)
    square: SquareRegion = SquareRegion(center=(0.5, 0.5), side=1.0)
    M: int = Field(ge=1)
    mode: Literal["period", "normalized"] = "period"
