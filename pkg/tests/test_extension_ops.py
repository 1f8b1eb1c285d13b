# tests/test_extension_ops.py

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import fresnel

from declab.core.errors import GridTooCoarseError, PreconditionError, QuadratureError
from declab.models.curve_model import ONE, PARABOLA, CurveSpec, DensityFunction
from declab.models.field_model import SampledField
from declab.models.geometry_model import UNIT_INTERVAL, Interval, SquareRegion, WeightKind
from declab.seed.seed_envelopes import check_envelope
from declab.services import extension_ops
from declab.services.extension_ops import (anisotropic_rescale_identity_check, certify_class_c,
                                           child_constant, evaluate_extension, evaluate_extension_at,
                                           exponential_sum_field, extension_rule, grid_checkpoints,
                                           l2_decoupling_ratio, lp_norm, parabola_approximation_gap,
                                           parabolic_rescale_identity_check, random_phases,
                                           require_class_c, reverse_holder_ratio, sample_field,
                                           shift_normalization, square_axes, weighted_lp_norm)
from declab.services.geometry_weights import weighted_half_width

HALF = Interval(lo=0, hi=Fraction(1, 2))
ARC = CurveSpec(variant="circle_arc", domain=HALF)
POINTS = np.array([[0.0, 0.0], [3.0, 0.0], [-7.5, 2.0], [12.0, -9.0], [0.5, 30.0]])
RADIAL = WeightKind()
ETA = WeightKind(variant="bump_eta")


def random_density(seed=3, scale=Fraction(1, 8)):
    return DensityFunction(representation="random_phase", seed=seed, scale=scale)


# --- Closed forms ---
def test_flat_slice_matches_the_exact_integral(quarter):
    x1 = np.array([0.5, 3.0, -11.0, 40.0])
    pts = np.stack([x1, np.zeros_like(x1)], axis=-1)
    exact = (np.exp(2j * np.pi * x1 * 0.25) - 1) / (2j * np.pi * x1)
    got = evaluate_extension_at(ONE, quarter, PARABOLA, pts)
    np.testing.assert_allclose(got, exact, rtol=1e-8)
    assert evaluate_extension_at(ONE, quarter, PARABOLA, [[0.0, 0.0]])[0] == pytest.approx(0.25, rel=1e-12)


@pytest.mark.parametrize("x2", [0.5, 2.0, 9.0, 25.0])
def test_vertical_slice_matches_fresnel_integrals(x2):
    z = 2 * math.sqrt(x2)
    S, C = fresnel(z)
    exact = (C + 1j * S) / z
    got = evaluate_extension_at(ONE, UNIT_INTERVAL, PARABOLA, [[0.0, x2]])[0]
    assert abs(got - exact) <= 1e-8 * abs(exact)


def test_atom_density_is_an_exact_exponential_sum():
    g = DensityFunction(representation="atom_sum", atoms=((0.1, 1.0), (0.6, 2.0)))
    got = evaluate_extension_at(g, UNIT_INTERVAL, PARABOLA, POINTS)
    want = exponential_sum_field([(0.1, 0.01), (0.6, 0.36)], [1.0, 2.0], POINTS)
    np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-13)


def test_atoms_go_to_half_open_children():
    g = DensityFunction(representation="atom_sum", atoms=((0.5, 1.0), (1.0, 1.0)))
    left, right = UNIT_INTERVAL.partition(Fraction(1, 2))
    checkpoints = np.zeros((1, 2))
    assert extension_rule(g, left, PARABOLA, checkpoints).size == 0
    assert extension_rule(g, right, PARABOLA, checkpoints).size == 2


# --- Densities ---
def test_random_phases_are_reproducible_and_frozen():
    a, b = random_phases(7, 16), random_phases(7, 16)
    np.testing.assert_array_equal(a, b)
    np.testing.assert_allclose(np.abs(a), 1.0)
    with pytest.raises(ValueError):
        a[0] = 1.0


def test_child_constant(quarter):
    g = random_density(scale=Fraction(1, 4))
    assert child_constant(ONE, quarter) == 1
    assert abs(child_constant(g, quarter)) == pytest.approx(1.0)
    assert child_constant(g, HALF) is None
    assert child_constant(ONE.modulated(2.0), quarter) is None


def test_modulation_translates_the_field(quarter):
    v = 3.0
    shifted = POINTS + np.array([v, 0.0])
    g = random_density()
    got = evaluate_extension_at(g.modulated(v), quarter, PARABOLA, POINTS)
    want = evaluate_extension_at(g, quarter, PARABOLA, shifted)
    np.testing.assert_allclose(got, want, rtol=1e-7, atol=1e-10)


def test_unimodular_factor_passes_through(quarter):
    c = np.exp(2j * np.pi * 0.3)
    g = random_density()
    np.testing.assert_allclose(evaluate_extension_at(g.times(c), quarter, PARABOLA, POINTS),
                               c * evaluate_extension_at(g, quarter, PARABOLA, POINTS), rtol=1e-9, atol=1e-12)


def test_extension_is_linear_in_the_density(quarter):
    one, two = DensityFunction(value=1.0), DensityFunction(value=2.0)
    np.testing.assert_allclose(evaluate_extension_at(one, quarter, PARABOLA, POINTS)
                               + evaluate_extension_at(two, quarter, PARABOLA, POINTS),
                               evaluate_extension_at(DensityFunction(value=3.0), quarter, PARABOLA, POINTS),
                               rtol=1e-10, atol=1e-10)
    g = random_density()
    np.testing.assert_allclose(evaluate_extension_at(g.times(2.5), quarter, PARABOLA, POINTS),
                               2.5 * evaluate_extension_at(g, quarter, PARABOLA, POINTS), rtol=1e-9, atol=1e-12)
    left = DensityFunction(representation="atom_sum", atoms=((0.1, 1.0),))
    right = DensityFunction(representation="atom_sum", atoms=((0.6, 2.0),))
    both = DensityFunction(representation="atom_sum", atoms=((0.1, 1.0), (0.6, 2.0)))
    np.testing.assert_allclose(evaluate_extension_at(left, UNIT_INTERVAL, PARABOLA, POINTS)
                               + evaluate_extension_at(right, UNIT_INTERVAL, PARABOLA, POINTS),
                               evaluate_extension_at(both, UNIT_INTERVAL, PARABOLA, POINTS), rtol=1e-12, atol=1e-12)


def test_extension_is_additive_over_adjacent_intervals():
    g = random_density()
    lo, hi = UNIT_INTERVAL.partition(Fraction(1, 2))
    np.testing.assert_allclose(evaluate_extension_at(g, lo, PARABOLA, POINTS)
                               + evaluate_extension_at(g, hi, PARABOLA, POINTS),
                               evaluate_extension_at(g, UNIT_INTERVAL, PARABOLA, POINTS), rtol=1e-7, atol=1e-8)


def test_quadrature_failure_carries_the_iterates(monkeypatch, quarter):
    monkeypatch.setattr(extension_ops, "QUAD_MAX_DOUBLINGS", 0)
    with pytest.raises(QuadratureError) as info:
        extension_rule(ONE, quarter, PARABOLA, POINTS)
    assert info.value.last is not None


def test_interval_outside_the_curve_domain_is_rejected():
    with pytest.raises(PreconditionError):
        extension_rule(ONE, Interval(lo=Fraction(1, 2), hi=1), ARC, POINTS)


# --- Grids and norms ---
def test_square_axes_tile_the_square(square8):
    xs, ys, h = square_axes(square8, 0.25)
    assert len(xs) == 32 and h == 0.25
    assert xs[0] == pytest.approx(-4 + 0.125) and xs[-1] == pytest.approx(4 - 0.125)
    wide, _, _ = square_axes(square8, 0.25, half_width=8.0)
    assert len(wide) == 64
    _, _, h2 = square_axes(square8, 0.2)
    assert h2 <= 0.2 and (8 / h2) == pytest.approx(round(8 / h2))
    with pytest.raises(GridTooCoarseError):
        square_axes(square8, 0.3)


def test_grid_checkpoints_keeps_corners():
    xs = np.arange(100.0)
    checkpoints = grid_checkpoints(xs, xs)
    assert len(checkpoints) == 48 * 48
    assert {(0.0, 0.0), (99.0, 99.0), (0.0, 99.0)} <= set(map(tuple, checkpoints))


def test_lp_norm_modes():
    B = SquareRegion(side=2.0)
    f = SampledField(origin=(-0.875, -0.875), spacing=0.25, values=np.ones((8, 8)), square=B)
    assert lp_norm(f, 2) == pytest.approx(2.0)
    assert lp_norm(f, 2, "normalized") == pytest.approx(1.0)
    assert lp_norm(f, math.inf) == 1.0
    assert 0 < lp_norm(f, 5, "weighted") < lp_norm(f, 5)
    with pytest.raises(PreconditionError):
        lp_norm(f, 0.5)


def test_weighted_norm_needs_the_weight_support(square8):
    f = evaluate_extension(random_density(), Interval(lo=0, hi=Fraction(1, 8)), PARABOLA, square8)
    with pytest.raises(PreconditionError):
        weighted_lp_norm(f, 4, scale=0.5)
    with pytest.raises(PreconditionError):
        lp_norm(f, 4, "weighted", weight=ETA)


def test_weighted_norm_reports_its_tail(square8):
    J = Interval(lo=0, hi=Fraction(1, 8))
    f = sample_field(random_density(), J, PARABOLA, square8, half_width=weighted_half_width(RADIAL, square8, 0.5))
    out = weighted_lp_norm(f, 4, scale=0.5, average=True)
    assert out["half_width"] >= weighted_half_width(RADIAL, square8, 0.5)
    assert 0 < out["tail_bound"] < 1e-6 * out["norm"] ** 4
    assert lp_norm(f, 4, "weighted", scale=0.5, average=True) == out["norm"]
    assert weighted_lp_norm(f, math.inf, scale=0.5)["tail_bound"] == 0.0


@pytest.mark.parametrize("p", [2, 4])
def test_weighted_norm_settles_when_the_spacing_halves(p, square8, quarter):
    half_width = weighted_half_width(ETA, square8)
    coarse, fine = (weighted_lp_norm(sample_field(random_density(), quarter, PARABOLA, square8, spacing, half_width),
                                     p, ETA)["norm"] for spacing in (0.25, 0.125))
    assert fine == pytest.approx(coarse, rel=1e-6)


@pytest.fixture(scope="module")
def eighth_field():
    J = Interval(lo=0, hi=Fraction(1, 8))
    return evaluate_extension(random_density(seed=5), J, PARABOLA, SquareRegion(side=8.0))


@given(p1=st.floats(1.0, 8.0), gap=st.floats(0.0, 8.0))
def test_normalized_norm_grows_with_p(eighth_field, p1, gap):
    p2 = p1 + gap
    assert lp_norm(eighth_field, p1, "normalized") <= lp_norm(eighth_field, p2, "normalized") * (1 + 1e-12)
    assert lp_norm(eighth_field, p2, "normalized") <= lp_norm(eighth_field, math.inf) * (1 + 1e-12)


def test_sampled_field_matches_pointwise_evaluation(quarter, square8):
    f = evaluate_extension(random_density(), quarter, PARABOLA, square8)
    xs, ys = f.axes()
    pts = np.array([[xs[3], ys[5]], [xs[20], ys[31]]])
    np.testing.assert_allclose(f.values[[3, 20], [5, 31]],
                               evaluate_extension_at(random_density(), quarter, PARABOLA, pts), rtol=1e-7, atol=1e-9)


# --- Rescaling identities ---
@pytest.mark.parametrize("I", [Interval(lo=0, hi=Fraction(1, 4)), Interval(lo=Fraction(1, 4), hi=Fraction(1, 2)),
                               Interval(lo=Fraction(1, 2), hi=1)])
@pytest.mark.parametrize("p", [4.5, 5.5])
@pytest.mark.parametrize("g", [ONE, random_density(seed=11, scale=Fraction(1, 16))], ids=["constant", "random"])
def test_parabolic_rescaling(I, p, g):
    out = parabolic_rescale_identity_check(g, I, p, SquareRegion(side=16.0))
    assert out["deviation"] < 1e-4
    assert out["jacobian"] == pytest.approx(float(I.length) ** 3)


def gaussian_chirp(x1, x2):
    return np.exp(-(x1 * x1 + x2 * x2)) * (1.5 + np.cos(0.7 * x1)) * np.exp(2j * np.pi * 0.3 * x2 * x2)


@pytest.fixture(scope="module")
def chirp_field():
    xs = -3.875 + 0.25 * np.arange(32)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    return SampledField(origin=(xs[0], xs[0]), spacing=0.25, values=gaussian_chirp(X, Y), square=SquareRegion(side=8.0))


@pytest.mark.parametrize("r,p,tol", [(1.0, 5.0, 1e-12), (2.0, 2.0, 1e-6), (1 / 3, 5.0, 1e-5),
                                     (0.5, 4.5, 1e-5)])
def test_anisotropic_rescaling(chirp_field, r, p, tol):
    out = anisotropic_rescale_identity_check(r, p, chirp_field, gaussian_chirp)
    assert out["deviation"] < tol
    assert out["rhs"] == pytest.approx(r ** (1 - 1 / p) * lp_norm(chirp_field, p), rel=1e-12)


def test_anisotropic_rescaling_needs_a_sampler(chirp_field):
    with pytest.raises(PreconditionError):
        anisotropic_rescale_identity_check(2.0, 5.0, chirp_field, None)
    with pytest.raises(PreconditionError):
        anisotropic_rescale_identity_check(0.0, 5.0, chirp_field, gaussian_chirp)


# --- Holder-type checks ---
def test_reverse_holder_ratios_stay_in_their_envelopes(envelopes, regression):
    J, B = Interval(lo=0, hi=Fraction(1, 8)), SquareRegion(side=8.0)
    q4 = reverse_holder_ratio(ONE, J, 2, 4, B)
    qinf = reverse_holder_ratio(ONE, J, 2, math.inf, B)
    assert 0 < q4["ratio"] and check_envelope("reverse_holder_q4", q4["ratio"], envelopes)
    assert 0 < qinf["ratio"] and check_envelope("reverse_holder_qinf", qinf["ratio"], envelopes)
    regression("reverse_holder_q4_measured", q4["ratio"])
    regression("reverse_holder_qinf_measured", qinf["ratio"])
    assert 0 <= q4["lhs_tail_bound"] < 1e-6 * q4["lhs"] ** 4
    assert 0 <= q4["rhs_tail_bound"] < 1e-6 * q4["rhs"] ** 2
    assert qinf["lhs_tail_bound"] == 0.0
    with pytest.raises(PreconditionError):
        reverse_holder_ratio(ONE, HALF, 2, 4, B)
    with pytest.raises(PreconditionError):
        reverse_holder_ratio(ONE, J, 4, 2, B)


def test_l2_decoupling_single_child_is_exact(square8):
    out = l2_decoupling_ratio(random_density(), Interval(lo=0, hi=Fraction(1, 8)), square8)
    assert out["children"] == 1
    assert out["ratio"] == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("g", [ONE, DensityFunction(representation="atom_sum",
                                                    atoms=((0.05, 1.0), (0.2, 1.0), (0.3, 0.5), (0.45, 1.0)))])
def test_l2_decoupling_respects_cauchy_schwarz(g, square8):
    out = l2_decoupling_ratio(g, HALF, square8)
    assert out["children"] == 4
    assert out["cap"] == 4.0
    assert out["ratio"] == pytest.approx(out["lhs"] / out["rhs"], rel=1e-12)
    assert 0 < out["ratio"] <= out["cap"] * (1 + 1e-12)


# --- Curve geometry ---
def test_class_c_certificates():
    assert certify_class_c(CurveSpec(a=0.5))["certified"]
    assert certify_class_c(ARC)["certified"]
    assert not certify_class_c(CurveSpec(a=2.0))["certified"]
    steep = CurveSpec(variant="tabulated", knots=tuple(np.linspace(0, 1, 9)),
                      values=tuple(2 * np.linspace(0, 1, 9) ** 2), claims_class_c=True)
    with pytest.raises(PreconditionError):
        require_class_c(steep)


@pytest.mark.parametrize("ell,tau", [(0.0, 0.25), (0.2, 0.125), (0.3, 0.1)])
def test_shift_normalization_is_third_order(ell, tau):
    out = shift_normalization(ARC, ell, tau)
    assert out["deviation"] <= out["bound"] * (1 + 1e-9) + 1e-15
    assert out["deviation"] <= out["class_c_bound"]
    assert shift_normalization(PARABOLA, ell, tau)["deviation"] < 1e-14


def test_parabola_gap_on_the_circle():
    out = parabola_approximation_gap(ARC, 0.25)
    assert out["gap"] <= out["bound"]
