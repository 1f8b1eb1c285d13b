# declab/models/experiment_model.py
# Experiment specs and ratio reports for the decoupling lab.

from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, model_validator

from declab.core.config import MAX_SPACING
from declab.models._types import Rational, to_fraction
from declab.models.curve_model import PARABOLA, CurveSpec, DensityFunction
from declab.models.geometry_model import Interval, SquareRegion, WeightKind


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delta: Rational
    p: float
    curve: CurveSpec = PARABOLA
    square: SquareRegion | None = None
    family: tuple[DensityFunction, ...] = ()
    spacing: float = Field(default=MAX_SPACING, gt=0, le=MAX_SPACING)
    weight: WeightKind = WeightKind()
    comparison: bool = False         # allows p in [2, 6] outside (4, 6)
    override_side: bool = False      # allows a square whose side is not 1/delta^2

    @model_validator(mode="before")
    @classmethod
    def _default_square(cls, data):
        if isinstance(data, dict) and data.get("square") is None and data.get("delta") is not None:
            delta = to_fraction(data["delta"])
            if delta > 0:
                data = {**data, "square": SquareRegion(side=float(1 / delta ** 2))}
        return data

    @model_validator(mode="after")
    def _check(self):
        if self.delta <= 0 or (1 / self.delta).denominator != 1:
            raise ValueError(f"1/delta must be a positive integer, got delta={self.delta}")
        low, high = (2.0, 6.0) if self.comparison else (4.0, 6.0)
        inside = low <= self.p <= high if self.comparison else low < self.p < high
        if not inside:
            raise ValueError(f"p={self.p} outside the allowed range")
        if not self.override_side and abs(self.square.side * float(self.delta) ** 2 - 1) > 1e-12:
            raise ValueError("square side must be 1/delta^2 unless override_side is set")
        return self

    @property
    def children(self) -> list[Interval]:
        return self.curve.domain.partition(self.delta)


class BilinearSpec(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delta: Rational
    nu: Rational
    b: int = Field(default=1, ge=1)
    I: Interval
    I2: Interval
    p: float
    curve: CurveSpec = PARABOLA
    spacing: float = Field(default=MAX_SPACING, gt=0, le=MAX_SPACING)
    strict: bool = False             # enforce nu < 1/100

    @model_validator(mode="after")
    def _check(self):
        if self.strict and not self.nu < Fraction(1, 100):
            raise ValueError("strict bilinear spec needs nu < 1/100")
        if not (0 < self.nu < 1) or self.delta <= 0:
            raise ValueError("need 0 < nu < 1 and delta > 0")
        if (self.nu ** self.b / self.delta).denominator != 1:
            raise ValueError("nu^b / delta must be a positive integer")
        if self.I.length != self.nu or self.I2.length != self.nu:
            raise ValueError("I and I2 must be intervals of length nu")
        if (self.I.lo / self.nu).denominator != 1 or (self.I2.lo / self.nu).denominator != 1:
            raise ValueError("I and I2 must belong to P_nu([0, 1])")
        if self.I.separation(self.I2) < self.nu:
            raise ValueError("I and I2 must be nu-separated")
        return self

    @property
    def square(self) -> SquareRegion:
        return SquareRegion(side=float(1 / self.delta ** 2))


class RatioReport(BaseModel):
    """ratio = lhs/rhs when rhs > 0, else 0. `estimate` is the derived constant (e.g. ratio^(1/p))."""

    lhs: float
    rhs: float
    ratio: float
    estimate: float | None = None
    label: str = ""
    diagnostics: dict = {}
    envelopes: list[str] = []
    envelope_ok: bool | None = None

    @classmethod
    def of(cls, lhs: float, rhs: float, **extra) -> "RatioReport":
        ratio = lhs / rhs if rhs > 0 else 0.0
        return cls(lhs=lhs, rhs=rhs, ratio=ratio, **extra)
