# declab/models/bound_model.py
# Log-domain bound ledgers, circle ladder parameters and exponent profiles.

import math
from fractions import Fraction

from pydantic import BaseModel, ConfigDict, Field, model_validator

from declab.core.errors import MissingScaleError
from declab.models._types import Rational


class BoundLedger(BaseModel):
    """
    Natural-log bounds log D_p(delta^s) keyed by the scale exponent s (as "p/q" strings).
    Only log(1/delta) is kept, so delta itself may underflow a double.
    """

    model_config = ConfigDict(frozen=True)

    p: float
    log_inv_delta: float = Field(gt=0)
    C: float = Field(default=1.0, gt=0)
    entries: dict[str, float] = {}

    @staticmethod
    def key(exponent) -> str:
        return str(Fraction(exponent))

    def get(self, exponent) -> float:
        return self.entries[self.key(exponent)]

    def require(self, exponents) -> None:
        missing = [f"delta^({self.key(s)})" for s in exponents if self.key(s) not in self.entries]
        if missing:
            raise MissingScaleError(missing)

    def with_entries(self, values: dict) -> "BoundLedger":
        merged = {**self.entries, **{self.key(k): float(v) for k, v in values.items()}}
        return self.model_copy(update={"entries": merged})


class LadderParams(BaseModel):
    """
    Scale ladder tau_j = tau0^((3/2)^j), j = 0..N+1, with C0 = 1/K.

    Scales are stored as log(1/tau_j); `half_exponents[j]` is the integer e_j with
    tau_j^(1/2) = C0^(e_j), present for strict ladders only. `delta` keeps the exact scale when the
    ladder was built from a rational delta.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    C0: Rational
    N: int = Field(ge=0)
    log_inv_tau: list[float]
    log_inv_delta: float | None = None
    delta: Rational | None = None
    half_exponents: list[int] = []
    adjusted: bool = False
    strict: bool = True

    @model_validator(mode="after")
    def _check(self):
        if len(self.log_inv_tau) != self.N + 2:
            raise ValueError("ladder needs tau_0 .. tau_{N+1}")
        if self.strict and (self.C0.numerator != 1 or self.C0.denominator < 101):
            raise ValueError("C0 must be 1/K with K >= 101")
        return self

    @property
    def K(self) -> int:
        return self.C0.denominator

    @property
    def tau(self) -> list[float]:
        """tau_j as floats (underflows to 0.0 for deep ladders)."""
        return [math.exp(-t) for t in self.log_inv_tau]


class ExponentProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: float
    alpha: float
    sigma_p: float
    theorem_exponent: float
    fixed_p_exponent: float | None = None
