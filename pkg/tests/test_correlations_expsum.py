# tests/test_correlations_expsum.py

import math

import pytest

from declab.core.config import BRUTE_MAX_POINTS, HASH_MAX_POINTS
from declab.core.errors import IntegrityError, NyquistError, PreconditionError, ResourceGuardError
from declab.core.suite_config import R_SUITE
from declab.models.geometry_model import SquareRegion
from declab.models.lattice_model import ExpSumSpec, LatticeCircle
from declab.services import correlations_expsum
from declab.services.circle_lattice import enumerate_circle_points
from declab.services.correlations_expsum import (circle_s6_bound, correlation_result, count_s4,
                                                 count_s6_brute, count_s6_hash, cross_check,
                                                 default_dft_size, expsum_lp_norm, s4_via_dft,
                                                 s6_via_dft, srtc_envelope_check, triple_sum_counts)


# --- Counting ---
@pytest.mark.parametrize("R", R_SUITE)
def test_s4_on_symmetric_circles(R):
    lc = enumerate_circle_points(R)
    assert count_s4(lc) == 3 * lc.N ** 2 - 3 * lc.N


@pytest.mark.parametrize("R", [1, 2, 5, 25])
def test_hash_matches_brute_force(R):
    lc = enumerate_circle_points(R)
    assert count_s6_hash(lc) == count_s6_brute(lc)


def test_triple_counts_cover_every_triple():
    lc = enumerate_circle_points(65)
    assert int(triple_sum_counts(lc).sum()) == lc.N ** 3


@pytest.mark.parametrize("R", R_SUITE)
def test_s6_stays_under_the_circle_bound(R):
    lc = enumerate_circle_points(R)
    S6 = count_s6_hash(lc)
    assert lc.N ** 3 <= S6 <= circle_s6_bound(lc.N)


def test_s6_sandwich_on_a_sparse_range():
    for R in range(1, 10_001, 97):
        lc = enumerate_circle_points(R)
        if lc.N:
            assert lc.N ** 3 <= count_s6_hash(lc) <= lc.N ** 5


def test_s6_is_invariant_under_translation_and_symmetry():
    pts = enumerate_circle_points(325).points
    base = count_s6_hash(pts)
    assert count_s6_hash([(x + 3, y - 7) for x, y in pts]) == base
    assert count_s6_hash([(y, -x) for x, y in pts]) == base
    assert count_s6_hash([(-x, y) for x, y in pts[: len(pts) // 2]]) == count_s6_hash(pts[: len(pts) // 2])


def test_empty_sets_count_zero():
    assert count_s4([]) == count_s6_hash([]) == count_s6_brute([]) == 0


def test_counting_guards():
    assert count_s6_brute([(i, 0) for i in range(BRUTE_MAX_POINTS)]) > 0
    with pytest.raises(PreconditionError):
        count_s6_brute([(i, 0) for i in range(BRUTE_MAX_POINTS + 1)])
    with pytest.raises(PreconditionError):
        count_s6_brute(enumerate_circle_points(65))
    with pytest.raises(ResourceGuardError):
        count_s6_hash([(i, 0) for i in range(HASH_MAX_POINTS + 1)])
    with pytest.raises(ResourceGuardError):
        count_s4([(2 ** 31, 0), (0, 1)])


# --- DFT moments ---
@pytest.mark.parametrize("R", R_SUITE)
def test_dft_moments_are_exact(R):
    lc = enumerate_circle_points(R)
    M = default_dft_size(R)
    assert M == 12 * math.ceil(math.sqrt(R)) + 1
    assert s6_via_dft(lc, M) == count_s6_hash(lc)
    assert s4_via_dft(lc, M) == count_s4(lc)


def test_dft_needs_nyquist():
    lc = enumerate_circle_points(25)
    with pytest.raises(NyquistError):
        s6_via_dft(lc, 12 * 5)
    with pytest.raises(NyquistError):
        s4_via_dft(lc, 8 * 5)


def test_correlation_result_methods():
    lc = enumerate_circle_points(25)
    brute, hashed, dft = (correlation_result(lc, m) for m in ("brute", "hash", "dft"))
    assert brute.S6 == hashed.S6 == dft.S6
    assert (brute.method, hashed.method, dft.method) == ("brute6", "hash3", "dft")
    assert dft.M == default_dft_size(25) and hashed.M is None
    assert hashed.ratio_S6_N3 == pytest.approx(hashed.S6 / 12 ** 3)
    with pytest.raises(PreconditionError):
        correlation_result(lc, "montecarlo")


def test_cross_check_flags_disagreement(monkeypatch):
    lc = enumerate_circle_points(5)
    assert cross_check(lc).S6 == count_s6_hash(lc)
    monkeypatch.setattr(correlations_expsum, "s6_via_dft", lambda points, M: 1)
    with pytest.raises(IntegrityError):
        cross_check(lc)


# --- Exponential sums ---
@pytest.mark.parametrize("R", R_SUITE)
def test_parseval_on_the_period_square(R):
    lc = enumerate_circle_points(R)
    spec = ExpSumSpec(points=lc, p=2, M=default_dft_size(R))
    assert expsum_lp_norm(spec) == pytest.approx(math.sqrt(lc.N), rel=1e-10)


def test_period_norms():
    lc = enumerate_circle_points(25)
    M = 12 * 5 + 1
    assert expsum_lp_norm(ExpSumSpec(points=lc, p=2, M=M)) == pytest.approx(math.sqrt(12))
    assert expsum_lp_norm(ExpSumSpec(points=lc, p=6, M=M)) == pytest.approx(count_s6_hash(lc) ** (1 / 6))
    assert expsum_lp_norm(ExpSumSpec(points=lc, p=math.inf, M=M)) == pytest.approx(12)
    with pytest.raises(NyquistError):
        expsum_lp_norm(ExpSumSpec(points=lc, p=6, M=30))


def test_normalized_norm_is_close_to_parseval():
    lc = enumerate_circle_points(25)
    spec = ExpSumSpec(points=lc, p=2, M=256, mode="normalized", square=SquareRegion(side=64.0))
    assert expsum_lp_norm(spec) == pytest.approx(math.sqrt(12), rel=0.1)
    with pytest.raises(NyquistError):
        expsum_lp_norm(spec.model_copy(update={"M": 128}))


def test_empty_expsum():
    assert expsum_lp_norm(ExpSumSpec(points=LatticeCircle.synthetic([]), p=4, M=4)) == 0.0


# --- Excess table ---
def test_excess_table_stays_in_its_envelope(regression):
    rows = srtc_envelope_check(R_SUITE)
    assert [row["N"] for row in rows] == [4, 4, 8, 12, 24, 32]
    assert [row["S6"] for row in rows] == [400, 400, 5840, 21360, 201120, 479120]
    for row in rows:
        assert row["within_circle_bound"] and row["envelope_ok"]
        assert 0 <= row["e"] <= math.log(2 * row["N"] + 3) / math.log(row["N"])
        regression(f"excess_r{row['R']}", row["e"])


@pytest.mark.parametrize("R,name", [(1, "s6_lambda1"), (5, "s6_lambda5")])
def test_brute_s6_matches_its_frozen_count(R, name, regression):
    regression(name, count_s6_brute(enumerate_circle_points(R)))


def test_excess_table_preconditions():
    with pytest.raises(PreconditionError):
        srtc_envelope_check([25], p=5)
    with pytest.raises(PreconditionError):
        srtc_envelope_check([3])
