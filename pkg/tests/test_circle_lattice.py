# tests/test_circle_lattice.py

import math
from fractions import Fraction

import pytest
from pydantic import ValidationError

from declab.core.errors import LadderMismatchError, PreconditionError, ResourceGuardError
from declab.models.lattice_model import LatticeCircle
from declab.services.bounds import choose_circle_ladder, coarse_ladder
from declab.services.circle_lattice import (arc_of_angle, arc_separation_distance, assign_points_to_arcs,
                                            enumerate_circle_points, first_octant, ladder_validity,
                                            normalized_separation, r2_divisor_count, r2_table,
                                            subarc_of, symmetry_closure)


# --- Enumeration ---
@pytest.mark.parametrize("R,N", [(1, 4), (2, 4), (3, 0), (5, 8), (25, 12), (325, 24), (1105, 32)])
def test_point_counts(R, N):
    assert enumerate_circle_points(R).N == N


def test_enumeration_agrees_with_the_divisor_oracle():
    table = r2_table(300)
    for R in range(1, 301):
        count = enumerate_circle_points(R).N
        assert count == r2_divisor_count(R) == table[R], R


def test_points_are_closed_under_symmetry():
    lc = enumerate_circle_points(1105)
    assert symmetry_closure(lc.points) == set(lc.points)
    assert sorted(first_octant(lc)) == [(24, 23), (31, 12), (32, 9), (33, 4)]
    assert lc.max_coordinate == 33


def test_enumeration_guards():
    with pytest.raises(PreconditionError):
        enumerate_circle_points(0)
    with pytest.raises(ResourceGuardError):
        enumerate_circle_points(2 ** 62)


def test_lattice_circle_validation():
    with pytest.raises(ValidationError):
        LatticeCircle(R=5, points=[(1, 1)])
    with pytest.raises(ValidationError):
        LatticeCircle.synthetic([(1, 1), (1, 1)])
    assert LatticeCircle.synthetic([(3, 1), (0, 2)]).points == ((0, 2), (3, 1))


# --- Separation ---
def test_normalized_separation():
    assert normalized_separation(enumerate_circle_points(5)) == pytest.approx(math.sqrt(2 / 5))
    assert normalized_separation(enumerate_circle_points(25)) == pytest.approx(math.sqrt(2 / 25))
    assert normalized_separation(LatticeCircle.synthetic([(0, 0), (3, 4)])) == pytest.approx(5.0)
    with pytest.raises(PreconditionError):
        normalized_separation(enumerate_circle_points(1).model_copy(update={"points": ((1, 0),)}))


def test_arc_separation_distance():
    assert arc_separation_distance(0.0, 0.6) == pytest.approx(math.sqrt(0.4))
    assert arc_separation_distance(0.3, 0.0) == 0.0
    with pytest.raises(PreconditionError):
        arc_separation_distance(0.8, 0.3)


# --- Arcs ---
def test_boundary_angles_go_to_the_lower_arc():
    tau0, n = 0.25, math.ceil(8 * math.pi)
    assert arc_of_angle(0.0, tau0, n) == 0
    assert arc_of_angle(tau0, tau0, n) == 0
    assert arc_of_angle(2 * tau0, tau0, n) == 1
    assert arc_of_angle(2 * tau0 + 1e-9, tau0, n) == 2
    assert arc_of_angle(2 * math.pi - 1e-12, tau0, n) == n - 1
    assert subarc_of(0.0, 0.1) == 0 and subarc_of(0.1, 0.1) == 0 and subarc_of(0.25, 0.1) == 2
    assert subarc_of(-1e-15, 0.1) == 0 and subarc_of(0.3, 0.0) == 0


def test_every_point_lands_in_one_subarc():
    lc = enumerate_circle_points(1105)
    out = assign_points_to_arcs(lc, coarse_ladder(Fraction(1, 4), 1))
    assert out.arc_count == math.ceil(8 * math.pi)
    assert len(out.assignment) == lc.N
    assert sum(k * v for k, v in out.occupancy.items()) == lc.N
    assert all(0 <= arc < out.arc_count for _, _, arc, _ in out.assignment)
    assert out.subarc_width == pytest.approx(0.25 * 0.25 ** (1.5 ** 2))


def test_crowded_subarcs_are_reported():
    lc = enumerate_circle_points(325)
    out = assign_points_to_arcs(lc, coarse_ladder(Fraction(1, 2), 0))
    assert out.max_occupancy > 1
    for arc, sub in out.violations:
        assert sum(1 for _, _, a, s in out.assignment if (a, s) == (arc, sub)) >= 2


def test_ladder_for_another_delta_is_rejected():
    with pytest.raises(LadderMismatchError):
        assign_points_to_arcs(enumerate_circle_points(25), choose_circle_ladder(log_inv_delta=20.0))


def test_ladder_validity():
    assert ladder_validity(1105)["valid"] is False
    assert ladder_validity(1)["reason"].startswith("R < 2")
    deep = ladder_validity(128 ** 12)
    assert deep["valid"] and deep["N"] == 1 and deep["K"] == 128
