# tests/conftest.py
# Shared fixtures: envelope table, frozen-value regression check, temporary report database, small squares and hypothesis profile.

from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from declab.models.geometry_model import Interval, SquareRegion
from declab.seed.seed_envelopes import load_envelopes, regression_check

settings.register_profile("declab", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture])
settings.load_profile("declab")


@pytest.fixture
def envelopes():
    return load_envelopes(refresh=True)


@pytest.fixture
def regression():
    """Assert a measurement against its frozen "stable" row, freezing it on first use."""
    def check(name, measured):
        assert regression_check(name, measured), f"{name} = {measured!r} drifted from its frozen value"
        return measured
    return check


@pytest.fixture
def db_url(tmp_path):
    return f"sqlite:///{tmp_path / 'runs.db'}"


@pytest.fixture
def square8():
    return SquareRegion(side=8.0)


@pytest.fixture
def quarter():
    return Interval(lo=0, hi=Fraction(1, 4))


@pytest.fixture
def separated_quarters():
    return Interval(lo=0, hi=Fraction(1, 4)), Interval(lo=Fraction(1, 2), hi=Fraction(3, 4))
