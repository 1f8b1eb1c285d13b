# declab/models/_types.py
# Shared annotated field types for the schema modules.

from fractions import Fraction
from typing import Annotated

from pydantic import BeforeValidator, PlainSerializer

MAX_DENOMINATOR = 10 ** 9


def to_fraction(value) -> Fraction:
    """Accept Fraction, int, "p/q" strings or floats (floats are snapped to a bounded denominator)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value).limit_denominator(MAX_DENOMINATOR)
    raise ValueError(f"cannot read {value!r} as a rational")


# Exact rationals, serialised as "p/q" strings in JSON
Rational = Annotated[Fraction, BeforeValidator(to_fraction), PlainSerializer(str, when_used="json")]

Point = tuple[float, float]
