# declab/models/geometry_model.py
# Intervals, squares, weight kinds, oriented boxes and grid specs.

import math
from fractions import Fraction
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from declab.core.errors import PartitionError
from declab.models._types import Point, Rational


class Interval(BaseModel):
    """A subinterval [lo, hi] of [0, 1] with exact rational endpoints."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lo: Rational
    hi: Rational

    @model_validator(mode="after")
    def _check_endpoints(self):
        if not (0 <= self.lo < self.hi <= 1):
            raise ValueError(f"Interval needs 0 <= lo < hi <= 1, got [{self.lo}, {self.hi}]")
        return self

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def center(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def partition(self, delta) -> list["Interval"]:
        """P_delta(self): consecutive pieces of length delta. Needs length/delta to be a whole number."""
        delta = Fraction(delta)
        if delta <= 0:
            raise PartitionError("partition scale must be positive")
        count = self.length / delta
        if count.denominator != 1:
            raise PartitionError(f"length {self.length} is not a multiple of {delta}")
        return [Interval(lo=self.lo + k * delta, hi=self.lo + (k + 1) * delta) for k in range(int(count))]

    def contains(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def separation(self, other: "Interval") -> Fraction:
        return max(Fraction(0), other.lo - self.hi, self.lo - other.hi)

    def label(self) -> str:
        return f"[{self.lo},{self.hi}]"


UNIT_INTERVAL = Interval(lo=0, hi=1)


class SquareRegion(BaseModel):
    """Axis-parallel square B(c, R): centre c, side R."""

    model_config = ConfigDict(frozen=True)

    center: Point = (0.0, 0.0)
    side: float = Field(gt=0)

    @property
    def area(self) -> float:
        return self.side * self.side

    @property
    def half(self) -> float:
        return self.side / 2

    def partition(self, r: float) -> list["SquareRegion"]:
        """Exact tiling by squares of side r, row-major from the lower-left corner."""
        count = self.side / r
        k = round(count)
        if k < 1 or abs(count - k) > 1e-9 * max(1.0, count):
            raise PartitionError(f"side {self.side} is not a multiple of {r}")
        cx, cy = self.center
        x0, y0 = cx - self.half, cy - self.half
        return [
            SquareRegion(center=(x0 + (i + 0.5) * r, y0 + (j + 0.5) * r), side=r)
            for i in range(k)
            for j in range(k)
        ]

    def tile_centers(self, r: float) -> np.ndarray:
        """Centres of partition(r) as an array of shape (k*k, 2)."""
        return np.array([sq.center for sq in self.partition(r)], dtype=float)

    def translated(self, v: Point) -> "SquareRegion":
        return SquareRegion(center=(self.center[0] + v[0], self.center[1] + v[1]), side=self.side)

    def scaled(self, s: float) -> "SquareRegion":
        return SquareRegion(center=(self.center[0] * s, self.center[1] * s), side=self.side * s)

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (np.abs(x[..., 0] - self.center[0]) <= self.half) & (np.abs(x[..., 1] - self.center[1]) <= self.half)


class WeightKind(BaseModel):
    model_config = ConfigDict(frozen=True)

    variant: Literal["radial_w", "product_w_tilde", "bump_eta"] = "radial_w"
    exponent: float = Field(default=100.0, gt=0)


class OrientedBox(BaseModel):
    """Rectangle with the long side along `direction`. A zero short side is allowed but degenerate."""

    model_config = ConfigDict(frozen=True)

    center: Point
    long: float
    short: float
    direction: Point = (0.0, 1.0)

    @field_validator("direction")
    @classmethod
    def _unit_direction(cls, v: Point) -> Point:
        norm = math.hypot(v[0], v[1])
        if norm == 0:
            raise ValueError("direction must be nonzero")
        return (v[0] / norm, v[1] / norm)

    @model_validator(mode="after")
    def _check_sides(self):
        if not (self.long >= self.short >= 0):
            raise ValueError(f"need long >= short >= 0, got {self.long} x {self.short}")
        return self

    @property
    def area(self) -> float:
        return self.long * self.short

    @property
    def normal(self) -> Point:
        return (-self.direction[1], self.direction[0])

    def vertices(self) -> list[Point]:
        """Corners in counter-clockwise order."""
        (cx, cy), (ux, uy), (nx, ny) = self.center, self.direction, self.normal
        hl, hs = self.long / 2, self.short / 2
        corners = [(-hs, hl), (hs, hl), (hs, -hl), (-hs, -hl)]  # (normal, direction) frame is left-handed
        return [(cx + a * nx + b * ux, cy + a * ny + b * uy) for a, b in corners]

    def contains(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        dx, dy = x[..., 0] - self.center[0], x[..., 1] - self.center[1]
        along = dx * self.direction[0] + dy * self.direction[1]
        across = dx * self.normal[0] + dy * self.normal[1]
        return (np.abs(along) <= self.long / 2) & (np.abs(across) <= self.short / 2)

    def dilated(self, factor: float) -> "OrientedBox":
        return OrientedBox(center=self.center, long=self.long * factor, short=self.short * factor,
                           direction=self.direction)


class GridSpec(BaseModel):
    """Node grid k*spacing for |k*spacing| <= extent on both axes, around `center`."""

    model_config = ConfigDict(frozen=True)

    spacing: float = Field(gt=0)
    extent: float = Field(gt=0)
    center: Point = (0.0, 0.0)

    def axis(self) -> np.ndarray:
        n = int(math.floor(self.extent / self.spacing + 1e-9))
        return self.spacing * np.arange(-n, n + 1, dtype=float)

    def points(self) -> np.ndarray:
        """All nodes as an (M, 2) array."""
        a = self.axis()
        X, Y = np.meshgrid(a + self.center[0], a + self.center[1], indexing="ij")
        return np.stack([X.ravel(), Y.ravel()], axis=-1)
