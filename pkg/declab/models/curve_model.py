# declab/models/curve_model.py
# Phase curves and densities for extension operators.

import cmath
from fractions import Fraction
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from declab.models._types import Rational
from declab.models.geometry_model import UNIT_INTERVAL, Interval


class CurveSpec(BaseModel):
    """
    A phase curve xi -> h(xi).

    - parabola:      h(t) = a t^2, a in [1/100, 100]
    - circle_arc:    h(t) = 1 - sqrt(1 - t^2) on [0, tau], tau < 1
    - scaled_circle: H(xi) = (1 - sqrt(1 - xi^2 tau0^2)) / tau0^2
    - tabulated:     cubic spline through (knots, values); claims class C only when certified
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    variant: Literal["parabola", "circle_arc", "scaled_circle", "tabulated"] = "parabola"
    a: float = 1.0
    tau0: Rational | None = None
    knots: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    claims_class_c: bool = False
    domain: Interval = UNIT_INTERVAL

    @model_validator(mode="after")
    def _check_variant(self):
        if self.variant == "parabola" and not (Fraction(1, 100) <= self.a <= 100):
            raise ValueError(f"parabola coefficient {self.a} outside [1/100, 100]")
        if self.variant == "circle_arc" and self.domain.hi >= 1:
            raise ValueError("circle_arc needs a domain [0, tau] with tau < 1")
        if self.variant == "scaled_circle":
            if self.tau0 is None or not (0 < self.tau0 < 1):
                raise ValueError("scaled_circle needs 0 < tau0 < 1")
        if self.variant == "tabulated":
            if len(self.knots) < 4 or len(self.knots) != len(self.values):
                raise ValueError("tabulated curve needs >= 4 knots with matching values")
            if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
                raise ValueError("tabulated knots must be strictly increasing")
            if self.knots[0] > self.domain.lo or self.knots[-1] < self.domain.hi:
                raise ValueError("tabulated knots must span the curve domain")
        return self

    def label(self) -> str:
        if self.variant == "parabola":
            return f"parabola(a={self.a:g})"
        if self.variant == "scaled_circle":
            return f"scaled_circle(tau0={self.tau0})"
        return self.variant


PARABOLA = CurveSpec()


class DensityFunction(BaseModel):
    """
    g: domain -> C, evaluated as factor * e(modulation * xi) * base(shift + stretch * xi).

    The base is one of:
      - constant(value)
      - random_phase: unit phases e(u_k), u_k ~ U[0,1) seeded, constant on pieces of length `scale`
      - atom_sum: point masses (location, mass); E_J g is then a finite exponential sum
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    representation: Literal["constant", "random_phase", "atom_sum"] = "constant"
    value: complex = 1.0
    seed: int | None = None
    scale: Rational | None = None
    atoms: tuple[tuple[float, float], ...] = ()
    domain: Interval = UNIT_INTERVAL
    factor: complex = 1.0
    modulation: float = 0.0
    shift: float = 0.0
    stretch: float = Field(default=1.0, gt=0)
    name: str | None = None

    @model_validator(mode="after")
    def _check_representation(self):
        if self.representation == "random_phase":
            if self.seed is None or self.scale is None or self.scale <= 0:
                raise ValueError("random_phase needs a seed and a positive scale")
        if self.representation == "atom_sum" and any(m <= 0 for _, m in self.atoms):
            raise ValueError("atom masses must be positive")
        return self

    @property
    def is_zero(self) -> bool:
        return self.factor == 0 or (self.representation == "constant" and self.value == 0) or (
            self.representation == "atom_sum" and not self.atoms
        )

    def label(self) -> str:
        if self.name:
            return self.name
        if self.representation == "constant":
            return "zero" if self.is_zero else f"constant({self.value:g})"
        if self.representation == "random_phase":
            return f"random(seed={self.seed})"
        return f"atoms({len(self.atoms)})"

    def rescaled(self, a, sigma) -> "DensityFunction":
        """g_a(eta) = g(a + sigma * eta) on [0, 1]."""
        a, sigma = float(a), float(sigma)
        return self.model_copy(update={
            "domain": UNIT_INTERVAL,
            "shift": self.shift + self.stretch * a,
            "stretch": self.stretch * sigma,
            # e(theta (a + sigma eta)) = e(theta a) e(theta sigma eta)
            "factor": self.factor * complex(_unit(self.modulation * a)),
            "modulation": self.modulation * sigma,
        })

    def modulated(self, theta: float) -> "DensityFunction":
        return self.model_copy(update={"modulation": self.modulation + theta})

    def times(self, c: complex) -> "DensityFunction":
        return self.model_copy(update={"factor": self.factor * c})


def _unit(t: float) -> complex:
    return cmath.exp(2j * cmath.pi * t)


ZERO = DensityFunction(value=0.0, name="zero")
ONE = DensityFunction(value=1.0, name="constant")
