# declab/services/decoupling_lab.py
# Empirical decoupling, bilinear, ball-inflation and reduction experiments on sampled extension fields.

import logging
import math
from fractions import Fraction

import numpy as np

from declab.core.config import MAX_SPACING, QUAD_CHUNK, VERBOSE, WEIGHT_EXPONENT
from declab.core.errors import PartitionError, PreconditionError
from declab.models.curve_model import ONE, ZERO, PARABOLA, CurveSpec, DensityFunction
from declab.models.experiment_model import BilinearSpec, ExperimentSpec, RatioReport
from declab.models.geometry_model import UNIT_INTERVAL, Interval, SquareRegion, WeightKind
from declab.seed.seed_envelopes import check_envelope
from declab.services.bounds import trivial_bound_log
from declab.services.extension_ops import (child_constant, evaluate_rule_on_axes, extension_rule,
                                           grid_checkpoints, square_axes)
from declab.services.geometry_weights import evaluate_weight, weighted_half_width, weighted_tail_bound

logger = logging.getLogger(__name__)

PRODUCT = WeightKind(variant="product_w_tilde")


# =====================================
# Families
# =====================================
def build_family(kind: str, count: int = 1, seed: int = 7, delta=Fraction(1, 16)) -> list[DensityFunction]:
    """
    Desk families:
      zero | constant | random[:K] (per-child unit phases at scale delta) | atoms (unit atom per child centre)
    """
    name, _, suffix = kind.partition(":")
    if suffix:
        count = int(suffix)
    delta = Fraction(delta)
    if name == "zero":
        return [ZERO]
    if name == "constant":
        return [ONE]
    if name == "random":
        seeds = np.random.default_rng(seed).integers(0, 2 ** 31 - 1, size=count)
        return [DensityFunction(representation="random_phase", seed=int(s), scale=delta, name=f"random[{k}]")
                for k, s in enumerate(seeds)]
    if name == "atoms":
        atoms = tuple((float(J.center), 1.0) for J in UNIT_INTERVAL.partition(delta))
        return [DensityFunction(representation="atom_sum", atoms=atoms, name="atoms")]
    raise PreconditionError(f"unknown family {kind!r}")


# =====================================
# Field engine
# =====================================
class _FieldBank:
    """
    Child fields E_J g for a list of densities, produced in row chunks of a fixed grid.
    Densities that are constant on every child share one basis field per child.
    """

    def __init__(self, members, children, curve: CurveSpec, xs, ys):
        self.children, self.curve, self.xs, self.ys = children, curve, xs, ys
        checkpoints = grid_checkpoints(xs, ys)
        self.basis = {}
        self.plans = []
        for g in members:
            if g.is_zero:
                self.plans.append(None)
                continue
            consts = [child_constant(g, J) for J in children]
            if all(c is not None for c in consts):
                for J in children:
                    if J not in self.basis:
                        self.basis[J] = extension_rule(ONE, J, curve, checkpoints)
                self.plans.append(np.array(consts, dtype=complex))
            else:
                self.plans.append([extension_rule(g, J, curve, checkpoints) for J in children])
        self.rows = max(1, QUAD_CHUNK // max(1, len(children) * len(ys)))

    def chunks(self):
        """Yield (row slice, [child fields of shape (children, rows, ny) or None per member])."""
        for start in range(0, len(self.xs), self.rows):
            rows = slice(start, min(len(self.xs), start + self.rows))
            xs_c = self.xs[rows]
            basis = None
            out = []
            for plan in self.plans:
                if plan is None:
                    out.append(None)
                elif isinstance(plan, np.ndarray):
                    if basis is None:
                        basis = np.stack([evaluate_rule_on_axes(self.basis[J], xs_c, self.ys)
                                          for J in self.children])
                    out.append(basis * plan[:, None, None])
                else:
                    out.append(np.stack([evaluate_rule_on_axes(r, xs_c, self.ys) for r in plan]))
            yield rows, out


def _mesh(xs, ys) -> np.ndarray:
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([X, Y], axis=-1)


def _inside(axis: np.ndarray, center: float, half: float) -> np.ndarray:
    return np.abs(axis - center) <= half + 1e-9 * max(1.0, half)


def _window_kernel(axis: np.ndarray, centers: np.ndarray, r: float, exponent: float) -> np.ndarray:
    """K[i, a] = (1 + |axis_i - c_a| / r)^(-e): one factor of the product weight of each window."""
    return (1.0 + np.abs(axis[:, None] - centers[None, :]) / r) ** (-exponent)


def _window_centers(square: SquareRegion, r: float) -> np.ndarray:
    """Distinct x (equivalently y) offsets of the centres of P_r(square), relative to its centre."""
    k = round(square.side / r)
    return -square.half + r * (np.arange(k) + 0.5)


# =====================================
# Decoupling ratio
# =====================================
def _decoupling_values(spec: ExperimentSpec, members,
                       per: int | None = None) -> tuple[list[tuple[float, float]], dict]:
    """
    (lhs, rhs) per member: plain L^p norm over B, and the l^2 sum of weighted child norms.
    With `per`, consecutive runs of `per` children form blocks and diagnostics["blocks"] holds the
    same pair for every block of every member.
    """
    B, kind = spec.square, spec.weight
    half_width = weighted_half_width(kind, B)
    xs, ys, h = square_axes(B, spec.spacing, half_width)
    in_x, in_y = _inside(xs, B.center[0], B.half), _inside(ys, B.center[1], B.half)
    children = spec.children
    bank = _FieldBank(members, children, spec.curve, xs, ys)

    p = spec.p
    lhs = np.zeros(len(members))
    rhs = np.zeros((len(members), len(children)))
    n_blocks = len(children) // per if per else 0
    block_lhs = np.zeros((len(members), n_blocks))
    for rows, fields in bank.chunks():
        w = evaluate_weight(kind, B, _mesh(xs[rows], ys))
        keep = in_x[rows]
        for m, F in enumerate(fields):
            if F is None:
                continue
            total = F.sum(axis=0)
            lhs[m] += float((np.abs(total[keep][:, in_y]) ** p).sum())
            rhs[m] += (np.abs(F) ** p * w).sum(axis=(1, 2))
            if per:
                G = F.reshape(n_blocks, per, F.shape[1], F.shape[2]).sum(axis=1)
                block_lhs[m] += (np.abs(G[:, keep][:, :, in_y]) ** p).sum(axis=(1, 2))

    cell = h * h
    values, blocks = [], []
    for m in range(len(members)):
        child_norms = (rhs[m] * cell) ** (1 / p)
        values.append((float((lhs[m] * cell) ** (1 / p)), float(np.sqrt((child_norms ** 2).sum()))))
        if per:
            block_rhs = np.sqrt((child_norms ** 2).reshape(n_blocks, per).sum(axis=1))
            blocks.append([(float(a), float(b)) for a, b in zip((block_lhs[m] * cell) ** (1 / p), block_rhs)])
    diagnostics = {
        "spacing": h,
        "nodes": [len(xs), len(ys)],
        "half_width": half_width,
        "tail_bound": weighted_tail_bound(kind, B, half_width),
        "children": len(children),
    }
    if per:
        diagnostics["blocks"] = blocks
    return values, diagnostics


def _trivial_cap(spec: ExperimentSpec) -> float:
    return math.exp(trivial_bound_log(p=spec.p, exponent=spec.weight.exponent,
                                      log_inv_delta=math.log(1 / spec.delta)))


def _decoupling_report(spec, g, lhs, rhs, diagnostics) -> RatioReport:
    report = RatioReport.of(lhs, rhs, label=g.label(), diagnostics=dict(diagnostics), envelopes=["trivial_bound"])
    cap = _trivial_cap(spec)
    report.diagnostics["trivial_cap"] = cap
    report.envelope_ok = report.ratio <= cap * 1.001
    return report


def decoupling_ratio(spec: ExperimentSpec, g: DensityFunction) -> RatioReport:
    """
    ||E_[0,1] g||_{L^p(B)} / (sum_{J in P_delta} ||E_J g||^2_{L^p(w_B)})^(1/2).

    Lower-bound evidence for D_p(delta), up to quadrature tolerance. Both sides come from the same
    sampled child fields, so the trivial bound 2^(e/p) delta^(-1/2) holds exactly on the grid.
    """
    values, diagnostics = _decoupling_values(spec, [g])
    lhs, rhs = values[0]
    return _decoupling_report(spec, g, lhs, rhs, diagnostics)


def family_reports(spec: ExperimentSpec) -> list[RatioReport]:
    """One decoupling report per member of spec.family, from a single pass over the grid."""
    if not spec.family:
        raise PreconditionError("family must be nonempty")
    values, diagnostics = _decoupling_values(spec, list(spec.family))
    return [_decoupling_report(spec, g, lhs, rhs, diagnostics) for g, (lhs, rhs) in zip(spec.family, values)]


def max_ratio_over_family(spec: ExperimentSpec) -> RatioReport:
    """Largest decoupling ratio over spec.family; ties go to the first member."""
    reports = family_reports(spec)
    best = max(range(len(reports)), key=lambda k: (reports[k].ratio, -k))
    out = reports[best].model_copy(deep=True)
    out.diagnostics["members"] = len(reports)
    out.diagnostics["ratios"] = [r.ratio for r in reports]
    out.envelope_ok = all(r.envelope_ok for r in reports)
    if VERBOSE:
        logger.info("📈 max ratio %.6g from %s over %d members (delta=%s, p=%g)",
                    out.ratio, out.label, len(reports), spec.delta, spec.p)
    return out


# =====================================
# Bilinear ratio
# =====================================
def bilinear_linear_envelope(spec: BilinearSpec, exponent: float = WEIGHT_EXPONENT) -> float:
    """
    log K with K^p capping the bilinear ratio:
      K = (nu^b/delta)^(1/2) (sum_Delta w~_Delta / w_B)^(1/p)
    where the window sum is at most (1 + 4 (3/2)^-e)^2 (1 + 1/sqrt2)^e on the cells of B.
    This is the trivial bound for D_p(delta/nu^b) with the window weights folded in.
    """
    log_kw = exponent * math.log1p(1 / math.sqrt(2)) + 2 * math.log1p(4 * 1.5 ** (-exponent))
    return 0.5 * math.log(spec.nu ** spec.b / spec.delta) + log_kw / spec.p


def bilinear_ratio(spec: BilinearSpec, g: DensityFunction) -> RatioReport:
    """
    lhs = Avg_{Delta in P_{nu^-b}(B)} (X_1 X_2)^(p/4),  X_i = sum_{J in P_{nu^b}(I_i)} ||E_J g||^2_{L^2_#(w~_Delta)}
    rhs = (Y_1 Y_2)^(p/4),                               Y_i = sum_{J in P_delta(I_i)} ||E_J g||^2_{L^p_#(w_B)}

    `estimate` = ratio^(1/p) is the empirical lower bound for the bilinear constant.
    Coarse fields are sums of the fine ones.
    """
    B, p, e = spec.square, spec.p, WEIGHT_EXPONENT
    r = float(spec.nu ** -spec.b)
    if (B.side / r) % 1 > 1e-9:
        raise PartitionError(f"square side {B.side} is not a multiple of the window side {r}")
    for I in (spec.I, spec.I2):
        if not spec.curve.domain.contains(I):
            raise PreconditionError(f"{I.label()} is outside the curve domain")

    fine = [spec.I.partition(spec.delta), spec.I2.partition(spec.delta)]
    per = int(spec.nu ** spec.b / spec.delta)
    children = fine[0] + fine[1]
    radial = WeightKind(exponent=e)
    xs, ys, h = square_axes(B, spec.spacing, weighted_half_width(radial, B))

    centers = _window_centers(B, r)
    K1 = _window_kernel(xs - B.center[0], centers, r, e)
    K2 = _window_kernel(ys - B.center[1], centers, r, e)

    bank = _FieldBank([g], children, spec.curve, xs, ys)
    n_fine = len(fine[0])
    n_coarse = n_fine // per
    window = np.zeros((2, n_coarse, len(centers), len(centers)))
    child_p = np.zeros(2 * n_fine)
    for rows, (F,) in bank.chunks():
        if F is None:
            break
        w = evaluate_weight(radial, B, _mesh(xs[rows], ys))
        child_p += (np.abs(F) ** p * w).sum(axis=(1, 2))
        coarse = F.reshape(2, n_coarse, per, F.shape[1], F.shape[2]).sum(axis=2)
        energy = np.abs(coarse) ** 2
        window += np.einsum("ra,icrs,sb->icab", K1[rows], energy, K2, optimize=True)

    cell = h * h
    X = (window * cell / (r * r)).sum(axis=1)
    Y = ((child_p * cell / B.area) ** (2 / p)).reshape(2, n_fine).sum(axis=1)
    lhs = float(np.mean((X[0] * X[1]) ** (p / 4)))
    rhs = float((Y[0] * Y[1]) ** (p / 4))

    report = RatioReport.of(lhs, rhs, label=g.label(), envelopes=["bilinear_linear"])
    report.estimate = report.ratio ** (1 / p)
    cap = bilinear_linear_envelope(spec, e)
    report.diagnostics = {"spacing": h, "nodes": [len(xs), len(ys)], "windows": len(centers) ** 2,
                          "window_side": r, "log_cap": cap}
    report.envelope_ok = report.estimate <= math.exp(cap) * (1 + 1e-9)
    return report


# =====================================
# Ball inflation
# =====================================
def ball_inflation_ratio(b: int, nu, p: float, I1: Interval, I2: Interval, Dp: SquareRegion,
                         g: DensityFunction, curve: CurveSpec = PARABOLA, spacing: float = MAX_SPACING) -> RatioReport:
    """
    lhs = Avg_{Delta in P_{nu^-b}(Dp)} prod_i (sum_{J in P_{nu^b}(I_i)} ||E_J g||^2_{L^{p/2}_#(w~_Delta)})^(p/4)
    rhs = prod_i (sum_J ||E_J g||^2_{L^{p/2}_#(w~_Dp)})^(p/4)

    ratio = lhs / (rhs nu^-1 (log nu^-b)^(p/2)): the residual constant left once the
    inflation factor is divided out.
    """
    nu = Fraction(nu)
    if b < 1 or not (0 < nu < 1) or (1 / nu).denominator != 1:
        raise PartitionError("need b >= 1 and 1/nu a positive integer")
    r = float(nu ** -b)
    if abs(Dp.side - r * r) > 1e-9 * r * r:
        raise PartitionError(f"Delta' must have side nu^-2b = {r * r:g}, got {Dp.side:g}")
    if I1.length != nu or I2.length != nu:
        raise PartitionError("I1 and I2 must have length nu")
    if I1.separation(I2) < nu:
        raise PreconditionError("I1 and I2 must be nu-separated")
    e, q = WEIGHT_EXPONENT, p / 2
    fine = [I1.partition(nu ** b), I2.partition(nu ** b)]
    n = len(fine[0])

    xs, ys, h = square_axes(Dp, spacing, weighted_half_width(PRODUCT, Dp))
    centers = _window_centers(Dp, r)
    K1 = _window_kernel(xs - Dp.center[0], centers, r, e)
    K2 = _window_kernel(ys - Dp.center[1], centers, r, e)
    big1 = _window_kernel(xs - Dp.center[0], np.zeros(1), Dp.side, e)[:, 0]
    big2 = _window_kernel(ys - Dp.center[1], np.zeros(1), Dp.side, e)[:, 0]

    bank = _FieldBank([g], fine[0] + fine[1], curve, xs, ys)
    window = np.zeros((2 * n, len(centers), len(centers)))
    whole = np.zeros(2 * n)
    for rows, (F,) in bank.chunks():
        if F is None:
            break
        mass = np.abs(F) ** q
        window += np.einsum("ra,jrs,sb->jab", K1[rows], mass, K2, optimize=True)
        whole += np.einsum("r,jrs,s->j", big1[rows], mass, big2, optimize=True)

    cell = h * h
    X = ((window * cell / (r * r)) ** (2 / q)).reshape(2, n, len(centers), len(centers)).sum(axis=1)
    Y = ((whole * cell / Dp.area) ** (2 / q)).reshape(2, n).sum(axis=1)
    lhs = float(np.mean((X[0] * X[1]) ** (p / 4)))
    raw = float((Y[0] * Y[1]) ** (p / 4))
    factor = float(1 / nu) * math.log(r) ** (p / 2)

    report = RatioReport.of(lhs, raw * factor, label=g.label(), envelopes=["ball_inflation_single_child"])
    report.estimate = report.ratio
    report.diagnostics = {"spacing": h, "nodes": [len(xs), len(ys)], "windows": len(centers) ** 2,
                          "children": n, "inflation_factor": factor}
    if n == 1:
        report.envelope_ok = check_envelope("ball_inflation_single_child", report.ratio)
    return report


# =====================================
# Reduction to the bilinear constant
# =====================================
def reduction_consistency_check(delta, nu, p: float, family, curve: CurveSpec = PARABOLA,
                                spacing: float = MAX_SPACING) -> dict:
    """
    Reduction of linear to bilinear decoupling, checked on each member g:

        ||E g||_{L^p(B)} <= C (D + nu^-1 M) (sum_J ||E_J g||^2_{L^p(w_B)})^(1/2)

    over J in P_delta([0, 1]). D is the measured block constant: the largest
    ||E_I g||_{L^p(B)} / (sum_{J in P_delta(I)} ||E_J g||^2_{L^p(w_B)})^(1/2) over I in P_nu([0, 1]).
    M is the largest bilinear estimate over nu-separated pairs of blocks. Minkowski and
    Cauchy-Schwarz over the 1/nu blocks give C <= nu^(-1/2).
    """
    delta, nu = Fraction(delta), Fraction(nu)
    if (1 / nu).denominator != 1 or (nu / delta).denominator != 1:
        raise PartitionError("need 1/nu and nu/delta to be positive integers")
    family = list(family)
    if not family:
        raise PreconditionError("family must be nonempty")

    spec = ExperimentSpec(delta=delta, p=p, curve=curve, spacing=spacing)
    per = int(nu / delta)
    values, diagnostics = _decoupling_values(spec, family, per=per)
    D = max((a / b for blocks in diagnostics["blocks"] for a, b in blocks if b > 0), default=0.0)

    blocks = curve.domain.partition(nu)
    far = [(i, j) for i in range(len(blocks)) for j in range(i + 1, len(blocks))
           if blocks[i].separation(blocks[j]) >= nu]
    M = 0.0
    for g in family:
        if g.is_zero:
            continue
        for i, j in far:
            pair = BilinearSpec(delta=delta, nu=nu, I=blocks[i], I2=blocks[j], p=p, curve=curve, spacing=spacing)
            M = max(M, bilinear_ratio(pair, g).estimate)

    scale = D + M / float(nu)
    rows_out = []
    for g, (lhs, rhs) in zip(family, values):
        denominator = scale * rhs
        rows_out.append({
            "label": g.label(),
            "lhs": lhs,
            "rhs": rhs,
            "constant": lhs / denominator if denominator > 0 else 0.0,
        })
    constant = max(row["constant"] for row in rows_out)
    cap = math.sqrt(len(blocks))
    if VERBOSE:
        logger.info("🔗 reduction delta=%s nu=%s: D=%.4g M=%.4g C=%.4g (cap %.4g)", delta, nu, D, M, constant, cap)
    return {
        "delta": str(delta), "nu": str(nu), "p": p,
        "D_block": D,
        "M_bilinear": M,
        "far_pairs": len(far),
        "constant": constant,
        "cap": cap,
        "rows": rows_out,
        "envelope_ok": constant <= cap * (1 + 1e-9),
        "diagnostics": diagnostics,
    }



# =====================================
# Table-level checks
# =====================================
def almost_multiplicative_constant(table: dict) -> dict:
    """max D(d1 d2) / (D(d1) D(d2)) over entries whose product scale is also in the table."""
    table = {Fraction(k): float(v) for k, v in table.items()}
    best, witnesses = None, []
    for d1 in sorted(table):
        for d2 in sorted(table):
            if d2 < d1 or d1 * d2 not in table:
                continue
            denominator = table[d1] * table[d2]
            if denominator <= 0:
                continue
            value = table[d1 * d2] / denominator
            witnesses.append({"delta1": str(d1), "delta2": str(d2), "value": value})
            if best is None or value > best:
                best = value
    return {"constant": best, "witnesses": witnesses}


def dyadic_classes(norms, nu, b: int) -> list[list[int]]:
    """
    Pigeonhole classes F_0..F_kmax, kmax = ceil(log2 nu^-3b):
      F_0: norm <= nu^3b max;  F_k: 2^(k-1) nu^3b max < norm <= 2^k nu^3b max
    """
    norms = np.asarray(norms, dtype=float)
    nu = Fraction(nu)
    if not (0 < nu < 1) or b < 1:
        raise PreconditionError("need 0 < nu < 1 and b >= 1")
    k_max = math.ceil(math.log2(float(nu ** (-3 * b))))
    classes = [[] for _ in range(k_max + 1)]
    top = float(norms.max(initial=0.0))
    threshold = float(nu ** (3 * b)) * top
    for idx, value in enumerate(norms):
        k = 0
        while value > threshold * 2 ** k and k < k_max:
            k += 1
        classes[k].append(idx)
    return classes
