# tests/test_bounds.py

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from declab.core.errors import MissingScaleError, PreconditionError
from declab.core.suite_config import CONSTANTS_C, CONSTANTS_LOG2_INV_DELTA, P_VALUES
from declab.models.bound_model import BoundLedger, LadderParams
from declab.services.bounds import (best_bound_over_depth, bootstrap_exponent, bootstrap_fixed_point_log,
                                    bootstrap_step, bound_constants, bounds_table, choose_circle_ladder,
                                    choose_iteration_depth, circle_bound_log, coarse_ladder, delta_exponent,
                                    exponent_profile, fill_ledger, fixed_p_exponent, l6_interpolated_bound_log,
                                    log_inv, product_exponent_sum, recursion_rhs_log, recursion_scales, solve_nchoice,
                                    theorem_bound_log, trivial_bound_log, verify_ladder)

C0 = Fraction(1, 128)
LOG_K = math.log(128)
p_open = st.floats(min_value=4.01, max_value=5.99)


# --- Exponents ---
def test_exponent_profile_endpoints():
    at4, at6 = exponent_profile(4.0), exponent_profile(6.0)
    assert at4.alpha == 0 and at4.theorem_exponent == pytest.approx(0.75) and at4.sigma_p == pytest.approx(0.25)
    assert at6.theorem_exponent == pytest.approx(1.0) and at6.sigma_p == pytest.approx(0.0)
    assert exponent_profile(5.0).theorem_exponent == pytest.approx(0.75 + math.log2(1.5) / 4)
    assert exponent_profile(5.0).alpha == pytest.approx(1 / 3, abs=1e-15)
    assert at4.fixed_p_exponent is None
    with pytest.raises(PreconditionError):
        exponent_profile(7.0)


@settings(max_examples=1000)
@given(p=st.floats(min_value=2.5, max_value=6.0))
def test_theorem_exponent_complements_sigma(p):
    profile = exponent_profile(p)
    assert profile.theorem_exponent == pytest.approx(1 - profile.sigma_p, abs=1e-12)


@given(p=p_open, N=st.integers(min_value=0, max_value=40))
def test_product_exponent_closed_form(p, N):
    assert product_exponent_sum(N, p) == pytest.approx(product_exponent_sum(N, p, closed_form=False), abs=1e-12)


@given(p=p_open)
def test_fixed_p_exponent_sits_between_the_endpoints(p):
    assert 0.5 < fixed_p_exponent(p) < 1


def test_delta_exponent_at_depth_zero():
    assert delta_exponent(0, 5.0) == pytest.approx((1 + 2 / 5) / 2)
    assert delta_exponent(3, 4.0) == pytest.approx((1 + 0.5 * 4) / 16)


# --- Theorem and trivial bounds ---
def test_theorem_bound_handles_tiny_deltas():
    L = 1000 * math.log(2)
    assert log_inv(Fraction(1, 2 ** 1000)) == pytest.approx(L)
    value = theorem_bound_log(Fraction(1, 2 ** 1000), p=5.0)
    assert value == pytest.approx(L ** (0.75 + math.log2(1.5) / 4) * math.log(L))
    assert theorem_bound_log(log_inv_delta=L, p=5.0, C=2.0) == pytest.approx(2 * value)


def test_bound_preconditions():
    with pytest.raises(PreconditionError):
        theorem_bound_log(0.5, p=5.0)
    with pytest.raises(PreconditionError):
        theorem_bound_log(Fraction(1, 1024), p=6.0)
    with pytest.raises(PreconditionError):
        log_inv(Fraction(3, 2))
    with pytest.raises(PreconditionError):
        log_inv()


def test_trivial_bound():
    assert trivial_bound_log(Fraction(1, 16), p=5.0) == pytest.approx(20 * math.log(2) + 2 * math.log(2))


# --- Recursion ---
def test_recursion_scales():
    assert recursion_scales(2) == [Fraction(1, 2), Fraction(3, 4), Fraction(7, 8)]


def test_recursion_needs_every_scale():
    L = 1000 * math.log(2)
    with pytest.raises(MissingScaleError) as info:
        recursion_rhs_log(2, BoundLedger(p=5.0, log_inv_delta=L))
    assert len(info.value.missing) == 3
    partial = BoundLedger(p=5.0, log_inv_delta=L).with_entries({Fraction(1, 2): 1.0})
    with pytest.raises(MissingScaleError) as info:
        recursion_rhs_log(1, partial)
    assert info.value.missing == ["delta^(3/4)"]


def test_recursion_rhs_dominates_its_first_term():
    L = 1000 * math.log(2)
    ledger = fill_ledger(5.0, L, 2)
    value = recursion_rhs_log(2, ledger)
    assert math.isfinite(value)
    assert value >= ledger.get(Fraction(7, 8))


def test_recursion_needs_small_delta():
    ledger = fill_ledger(5.0, 10.0, 2)
    with pytest.raises(PreconditionError):
        recursion_rhs_log(2, ledger)


# --- Depth and bootstrap ---
@pytest.mark.parametrize("log2_inv,expected", [(2, 1), (16, 1), (100, 2), (256, 2), (2 ** 12, 3)])
def test_iteration_depth(log2_inv, expected):
    N = choose_iteration_depth(log2_inv_delta=log2_inv)
    assert N == expected
    assert 2.0 ** -N <= log2_inv ** -0.25 * (1 + 1e-12)
    assert log2_inv ** -0.25 <= 2.0 ** (1 - N)


def test_iteration_depth_needs_small_delta():
    with pytest.raises(PreconditionError):
        choose_iteration_depth(Fraction(1, 2))


def test_bootstrap_exponent():
    factor, lam = bootstrap_exponent(2, 5.0)
    assert factor == 64 and lam == pytest.approx(2 * 27 / 64)
    with pytest.raises(PreconditionError):
        bootstrap_exponent(0, 5.0)


def test_best_depth_is_no_worse_than_the_chosen_one():
    out = best_bound_over_depth(p=5.0, C=1.5, log_inv_delta=2 ** 20)
    assert 1 <= out["N_star"] <= 64
    assert out["log_bound"] <= out["log_bound_chosen"] + 1e-9


def test_bootstrap_iterates_to_its_fixed_point():
    N, p, log_C = 1, 5.0, math.log(2.0)
    x = 10.0 * log_C
    for _ in range(400):
        x = bootstrap_step(N, p, log_C, x)["log_constant"]
    assert x == pytest.approx(bootstrap_fixed_point_log(N, p, log_C), rel=1e-9)


def test_bootstrap_cases():
    out = bootstrap_step(1, 5.0, math.log(2.0), math.log(50.0), cases=3)
    assert [row["n"] for row in out["cases"]] == [1, 2, 3]
    assert all(row["dominant"] in ("case1", "case2") for row in out["cases"])


def _nchoice_holds(N, p, eps):
    lhs = (4 / (p - 2)) ** (N + 1) * (p / 4 + (p - 4) / 4 * sum(((p - 2) / 4) ** j for j in range(1, N + 1)))
    rhs = (1 + (2 / p) * sum((2 / (p - 2)) ** j for j in range(N + 1))) / eps
    return lhs >= rhs * (1 - 1e-12)


@pytest.mark.parametrize("p,eps", [(4.5, 0.1), (5.0, 0.05), (5.5, 0.01), (6.0, 0.2)])
def test_solve_nchoice_is_minimal(p, eps):
    N = solve_nchoice(p, eps)
    assert _nchoice_holds(N, p, eps)
    assert N == 1 or not _nchoice_holds(N - 1, p, eps)
    assert solve_nchoice(p, eps / 10) >= N


def test_solve_nchoice_rejects_bad_eps():
    with pytest.raises(PreconditionError):
        solve_nchoice(5.0, 0.0)


# --- Circle ladder ---
def test_ladder_on_a_sandwich():
    ladder = choose_circle_ladder(C0 ** 6, C0)
    assert ladder.N == 1 and not ladder.adjusted and ladder.K == 128
    assert ladder.half_exponents == [2, 3]
    assert ladder.log_inv_tau == pytest.approx([4 * LOG_K, 6 * LOG_K, 9 * LOG_K])


def test_ladder_in_a_gap_adjusts_C0():
    ladder = choose_circle_ladder(C0 ** 10, C0)
    assert ladder.N == 1 and ladder.adjusted
    assert ladder.K >= 128
    assert ladder.log_inv_tau[2] >= 10 * LOG_K * (1 - 1e-12)
    verify_ladder(ladder)


@settings(max_examples=1000)
@given(u=st.floats(min_value=2.0, max_value=2 * 3 ** 10), K=st.integers(min_value=101, max_value=10 ** 6))
def test_random_ladders_sandwich_delta(u, K):
    L = u * math.log(K)
    ladder = choose_circle_ladder(log_inv_delta=L, C0=Fraction(1, K))
    N = ladder.N
    assert ladder.log_inv_tau[N] * (1 - 1e-12) <= L <= ladder.log_inv_tau[N + 1] * (1 + 1e-12)
    assert all(isinstance(e, int) for e in ladder.half_exponents)
    log_K = math.log(ladder.K)
    assert ladder.log_inv_tau[0] * 1.5 ** (N + 1) == pytest.approx(3 * 3 ** N * log_K, rel=1e-12)


def test_exact_delta_is_placed_on_integers():
    assert choose_circle_ladder(C0 ** 6, C0).delta == C0 ** 6
    assert choose_circle_ladder(C0 ** 10, C0).K == 220
    just_above = C0 ** 6 * (1 + Fraction(1, 10 ** 14))
    exact = choose_circle_ladder(just_above, C0)
    assert exact.N == 0 and exact.adjusted and exact.K == 128 ** 2
    rounded = choose_circle_ladder(log_inv_delta=6 * LOG_K, C0=C0)
    assert rounded.N == 1 and not rounded.adjusted and rounded.delta is None


def test_verify_ladder_rejects_an_exact_delta_outside_the_sandwich():
    just_above = C0 ** 6 * (1 + Fraction(1, 10 ** 14))
    fields = dict(C0=C0, N=1, log_inv_tau=[4 * LOG_K, 6 * LOG_K, 9 * LOG_K], log_inv_delta=6 * LOG_K,
                  half_exponents=[2, 3])
    verify_ladder(LadderParams(**fields))
    with pytest.raises(PreconditionError):
        verify_ladder(LadderParams(**fields, delta=just_above))


def test_deep_ladder_stays_in_log_space():
    ladder = choose_circle_ladder(log_inv_delta=2 * 3 ** 20 * LOG_K, C0=C0)
    assert ladder.N == 20
    assert ladder.tau[-1] == 0.0


def test_ladder_preconditions():
    with pytest.raises(PreconditionError):
        choose_circle_ladder(Fraction(1, 1000), C0)
    with pytest.raises(PreconditionError):
        choose_circle_ladder(C0 ** 6, Fraction(1, 100))


def test_coarse_ladder():
    ladder = coarse_ladder(Fraction(1, 4), 2)
    assert not ladder.strict
    assert ladder.log_inv_tau == pytest.approx([math.log(4) * 1.5 ** j for j in range(4)])


def test_circle_bound_tau0_term_is_capped():
    out = circle_bound_log(C0 ** 20, p=5.0, C0=C0)
    assert out["tau0_term"] <= out["tau0_cap"]
    assert out["log_bound"] > out["tau0_term"]


def test_bound_constants_are_stable(regression):
    out = bound_constants(P_VALUES, CONSTANTS_LOG2_INV_DELTA, CONSTANTS_C)
    assert len(out["rows"]) == len(P_VALUES) * len(CONSTANTS_LOG2_INV_DELTA)
    for name in ("depth", "circle", "tau0"):
        assert out[f"{name}_constant"] == max(row[name] for row in out["rows"])
    regression("bound_constant_depth", out["depth_constant"])
    regression("bound_constant_circle", out["circle_constant"])
    regression("bound_constant_tau0", out["tau0_constant"])
    with pytest.raises(PreconditionError):
        bound_constants([], CONSTANTS_LOG2_INV_DELTA)

def test_l6_interpolation_picks_a_tau():
    out = l6_interpolated_bound_log(2 ** 12, math.log(10 ** 6))
    assert 0 < out["tau"] <= 0.25
    assert out["excess"] <= 2 ** 12


def test_bounds_table():
    rows = bounds_table([4.5, 5.5], [8, 16, 32])
    assert len(rows) == 6
    assert rows[0]["delta"] == "2^-8"
    with pytest.raises(PreconditionError):
        bounds_table([], [8])
