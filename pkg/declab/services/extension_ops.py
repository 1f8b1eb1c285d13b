# declab/services/extension_ops.py
# Extension operators E_J g, sampled norms and the rescaling / Holder checks built on them.

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline

from declab.core.config import (MAX_SPACING, QUAD_CHUNK, QUAD_MAX_DOUBLINGS, QUAD_ORDER,
                                QUAD_TOLERANCE, VERBOSE)
from declab.core.errors import (GridTooCoarseError, PartitionError, PreconditionError,
                                QuadratureError)
from declab.models.curve_model import PARABOLA, CurveSpec, DensityFunction
from declab.models.field_model import SampledField
from declab.models.geometry_model import UNIT_INTERVAL, Interval, SquareRegion, WeightKind
from declab.services.geometry_weights import evaluate_weight, weighted_half_width, weighted_tail_bound

logger = logging.getLogger(__name__)

CHECK_AXIS = 48          # checkpoint nodes per axis when checking quadrature convergence
CHECK_LIMIT = 4096


# =====================================
# Curves
# =====================================
@lru_cache(maxsize=64)
def _spline(knots: tuple, values: tuple) -> CubicSpline:
    return CubicSpline(np.array(knots), np.array(values))


def curve_value(curve: CurveSpec, xi, order: int = 0) -> np.ndarray:
    """h and its first three derivatives, vectorised in xi."""
    xi = np.asarray(xi, dtype=float)
    if curve.variant == "parabola":
        a = curve.a
        return [a * xi * xi, 2 * a * xi, np.full_like(xi, 2 * a), np.zeros_like(xi)][order]
    if curve.variant == "tabulated":
        return _spline(curve.knots, curve.values)(xi, order)

    t2 = 1.0 if curve.variant == "circle_arc" else float(curve.tau0) ** 2
    s = np.sqrt(1.0 - t2 * xi * xi)
    if order == 0:
        return xi * xi / (1.0 + s)
    if order == 1:
        return xi / s
    if order == 2:
        return s ** -3
    return 3 * t2 * xi * s ** -5


def curve_slope_bound(curve: CurveSpec, J: Interval) -> float:
    xi = np.linspace(float(J.lo), float(J.hi), 257)
    return float(np.abs(curve_value(curve, xi, 1)).max())


def _check_domain(J: Interval, curve: CurveSpec) -> None:
    if not curve.domain.contains(J):
        raise PreconditionError(f"interval {J.label()} is not inside the curve domain {curve.domain.label()}")


# =====================================
# Densities
# =====================================
@lru_cache(maxsize=128)
def random_phases(seed: int, count: int) -> np.ndarray:
    """Unit phases e(u_k), u_k ~ U[0, 1), reproducible from the seed."""
    rng = np.random.default_rng(seed)
    out = np.exp(2j * np.pi * rng.random(count))
    out.flags.writeable = False
    return out


def _phase_table(g: DensityFunction) -> np.ndarray:
    return random_phases(g.seed, math.ceil(1 / g.scale) + 1)


def evaluate_density(g: DensityFunction, xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if g.representation == "atom_sum":
        raise PreconditionError("atom densities have no pointwise values")
    u = g.shift + g.stretch * xi
    if g.representation == "constant":
        base = np.full(xi.shape, g.value, dtype=complex)
    else:
        table = _phase_table(g)
        idx = np.clip(np.floor(u / float(g.scale)).astype(int), 0, len(table) - 1)
        base = table[idx]
    return g.factor * np.exp(2j * np.pi * g.modulation * xi) * base


def density_breakpoints(g: DensityFunction, J: Interval) -> list[float]:
    """Interior points of J where a random-phase density jumps."""
    if g.representation != "random_phase":
        return []
    lo, hi, scale = float(J.lo), float(J.hi), float(g.scale)
    u_lo, u_hi = g.shift + g.stretch * lo, g.shift + g.stretch * hi
    tol = 1e-12 * (hi - lo)
    out = []
    for k in range(math.ceil(u_lo / scale), math.floor(u_hi / scale) + 1):
        xi = (k * scale - g.shift) / g.stretch
        if lo + tol < xi < hi - tol:
            out.append(xi)
    return out


def child_constant(g: DensityFunction, J: Interval) -> complex | None:
    """The value of g on J when g is constant there, else None."""
    if g.modulation != 0 or g.representation == "atom_sum":
        return None
    if g.representation == "constant":
        return complex(g.factor * g.value)
    lo, hi, scale = float(J.lo), float(J.hi), float(g.scale)
    u_lo, u_hi = g.shift + g.stretch * lo, g.shift + g.stretch * hi
    k = math.floor((u_lo + u_hi) / 2 / scale)
    tol = 1e-12 * scale
    if u_lo < k * scale - tol or u_hi > (k + 1) * scale + tol:
        return None
    table = _phase_table(g)
    return complex(g.factor * table[min(k, len(table) - 1)])


# =====================================
# Quadrature rules
# =====================================
@dataclass(frozen=True)
class ExtensionRule:
    """E(x) = sum_k coefficients[k] e(nodes[k] x1 + heights[k] x2)."""

    nodes: np.ndarray
    heights: np.ndarray
    coefficients: np.ndarray
    panels: int = 0

    @property
    def size(self) -> int:
        return len(self.nodes)

    def scaled(self, c: complex) -> "ExtensionRule":
        return ExtensionRule(self.nodes, self.heights, self.coefficients * c, self.panels)

    @classmethod
    def empty(cls) -> "ExtensionRule":
        z = np.zeros(0)
        return cls(z, z, z.astype(complex))


@lru_cache(maxsize=8)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    return (x + 1) / 2, w / 2


def _panel_nodes(lo: float, hi: float, breaks: list[float], panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes on [lo, hi]; panels never straddle a breakpoint."""
    x0, w0 = _gauss_legendre(QUAD_ORDER)
    edges = [lo, *breaks, hi]
    nodes, weights = [], []
    for a, b in zip(edges, edges[1:]):
        k = max(1, math.ceil(panels * (b - a) / (hi - lo) - 1e-9))
        cuts = np.linspace(a, b, k + 1)
        width = np.diff(cuts)
        nodes.append((cuts[:-1, None] + width[:, None] * x0).ravel())
        weights.append((width[:, None] * w0).ravel())
    return np.concatenate(nodes), np.concatenate(weights)


def _quadrature_rule(g, curve, J: Interval, breaks, panels: int) -> ExtensionRule:
    xi, w = _panel_nodes(float(J.lo), float(J.hi), breaks, panels)
    return ExtensionRule(xi, curve_value(curve, xi), w * evaluate_density(g, xi), panels)


def _atom_rule(g: DensityFunction, J: Interval, curve: CurveSpec) -> ExtensionRule:
    """Exact rule for a sum of point masses; atoms are assigned to half-open [lo, hi) pieces."""
    lo, hi = float(J.lo), float(J.hi)
    nodes, coeffs = [], []
    for u, mass in g.atoms:
        xi = (u - g.shift) / g.stretch
        inside = lo <= xi < hi or (J.hi == g.domain.hi and abs(xi - hi) <= 1e-12)
        if inside:
            nodes.append(xi)
            coeffs.append(g.factor * mass / g.stretch * np.exp(2j * np.pi * g.modulation * xi))
    if not nodes:
        return ExtensionRule.empty()
    xi = np.array(nodes)
    return ExtensionRule(xi, curve_value(curve, xi), np.array(coeffs, dtype=complex))


def evaluate_rule_at(rule: ExtensionRule, points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    out = np.zeros(len(points), dtype=complex)
    if rule.size == 0:
        return out
    step = max(1, QUAD_CHUNK // rule.size)
    for s in range(0, len(points), step):
        p = points[s:s + step]
        phase = np.outer(p[:, 0], rule.nodes) + np.outer(p[:, 1], rule.heights)
        out[s:s + step] = np.exp(2j * np.pi * phase) @ rule.coefficients
    return out


def evaluate_rule_on_axes(rule: ExtensionRule, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Separable evaluation: E[i, j] = sum_k c_k e(xi_k xs[i]) e(h_k ys[j])."""
    out = np.zeros((len(xs), len(ys)), dtype=complex)
    if rule.size == 0:
        return out
    step = max(1, QUAD_CHUNK // max(len(xs), len(ys)))
    for s in range(0, rule.size, step):
        A = np.exp(2j * np.pi * np.outer(xs, rule.nodes[s:s + step])) * rule.coefficients[s:s + step]
        B = np.exp(2j * np.pi * np.outer(ys, rule.heights[s:s + step]))
        out += A @ B.T
    return out


def extension_rule(g: DensityFunction, J: Interval, curve: CurveSpec, checkpoints: np.ndarray) -> ExtensionRule:
    """
    Converged rule for E_J g. Panels double until the sup over `checkpoints` changes by less than
    QUAD_TOLERANCE (relative); raises QuadratureError with the last two iterates otherwise.
    """
    _check_domain(J, curve)
    if g.is_zero:
        return ExtensionRule.empty()
    if g.representation == "atom_sum":
        return _atom_rule(g, J, curve)

    checkpoints = np.asarray(checkpoints, dtype=float).reshape(-1, 2)
    breaks = density_breakpoints(g, J)
    bandwidth = (np.abs(checkpoints[:, 0]).max() + curve_slope_bound(curve, J) * np.abs(checkpoints[:, 1]).max()
                 + abs(g.modulation) + 1.0)
    panels = max(1, math.ceil(float(J.length) * bandwidth / 2))

    rule = _quadrature_rule(g, curve, J, breaks, panels)
    prev = evaluate_rule_at(rule, checkpoints)
    earlier = None
    for _ in range(QUAD_MAX_DOUBLINGS):
        panels *= 2
        finer = _quadrature_rule(g, curve, J, breaks, panels)
        cur = evaluate_rule_at(finer, checkpoints)
        change = np.abs(cur - prev).max() / max(np.abs(cur).max(), 1e-300)
        if VERBOSE:
            logger.debug("🔁 %s on %s: %d panels, change %.2e", g.label(), J.label(), panels, change)
        if change < QUAD_TOLERANCE:
            return finer
        earlier, prev = prev, cur
    raise QuadratureError(f"quadrature for {g.label()} on {J.label()} did not converge "
                          f"after {QUAD_MAX_DOUBLINGS} doublings", previous=earlier, last=prev)


# =====================================
# Grids
# =====================================
def square_axes(B: SquareRegion, spacing: float, half_width: float | None = None):
    """
    Midpoint nodes of a grid whose cells tile B exactly, extended by whole cells out to
    `half_width` around the centre. Returns (xs, ys, h) with h <= spacing.
    """
    if spacing > MAX_SPACING + 1e-12:
        raise GridTooCoarseError(f"grid spacing {spacing} exceeds {MAX_SPACING}")
    n = max(1, math.ceil(B.side / spacing - 1e-9))
    h = B.side / n
    m = 0 if half_width is None else max(0, math.ceil((half_width - B.half) / h - 1e-9))
    offsets = -B.half - m * h + h / 2 + h * np.arange(n + 2 * m)
    return B.center[0] + offsets, B.center[1] + offsets, h


def grid_checkpoints(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sub-grid that keeps the edges and corners, where the phase oscillates fastest."""
    ix = np.unique(np.linspace(0, len(xs) - 1, min(len(xs), CHECK_AXIS)).round().astype(int))
    iy = np.unique(np.linspace(0, len(ys) - 1, min(len(ys), CHECK_AXIS)).round().astype(int))
    X, Y = np.meshgrid(xs[ix], ys[iy], indexing="ij")
    return np.stack([X.ravel(), Y.ravel()], axis=-1)


def point_checkpoints(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) <= CHECK_LIMIT:
        return points
    size = np.abs(points).sum(axis=1)
    extreme = np.argsort(size)[-64:]
    stride = np.linspace(0, len(points) - 1, CHECK_LIMIT - 64).round().astype(int)
    return points[np.unique(np.concatenate([extreme, stride]))]


def sample_field(g: DensityFunction, J: Interval, curve: CurveSpec, B: SquareRegion,
                 spacing: float = MAX_SPACING, half_width: float | None = None) -> SampledField:
    xs, ys, h = square_axes(B, spacing, half_width)
    rule = extension_rule(g, J, curve, grid_checkpoints(xs, ys))
    values = evaluate_rule_on_axes(rule, xs, ys)
    return SampledField(origin=(float(xs[0]), float(ys[0])), spacing=h, values=values, square=B)


def evaluate_extension(g: DensityFunction, J: Interval, curve: CurveSpec = PARABOLA,
                       B: SquareRegion | None = None, spacing: float = MAX_SPACING) -> SampledField:
    """E_J g sampled on the midpoint grid of B."""
    if B is None:
        raise PreconditionError("evaluate_extension needs a square")
    return sample_field(g, J, curve, B, spacing)


def evaluate_extension_at(g: DensityFunction, J: Interval, curve: CurveSpec, points) -> np.ndarray:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    rule = extension_rule(g, J, curve, point_checkpoints(points))
    return evaluate_rule_at(rule, points)


def exponential_sum_field(frequencies, masses, points) -> np.ndarray:
    """sum_k m_k e(f_k . x) at each point."""
    f = np.asarray(frequencies, dtype=float).reshape(-1, 2)
    rule = ExtensionRule(f[:, 0], f[:, 1], np.asarray(masses, dtype=complex).reshape(-1))
    return evaluate_rule_at(rule, points)


# =====================================
# Norms
# =====================================
def _node_mesh(f: SampledField) -> np.ndarray:
    xs, ys = f.axes()
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return np.stack([X, Y], axis=-1)


def lp_norm(f: SampledField, p: float, mode: str = "plain", weight: WeightKind | None = None,
            scale: float = 1.0, average: bool = False) -> float:
    """
    plain:      (sum_B |f|^p h^2)^(1/p)
    normalized: the same divided by |B| (an average)
    weighted:   (sum_grid |f|^p w_B^scale h^2)^(1/p), optionally divided by |B|; see weighted_lp_norm
    p = inf gives the sup of |f| (times w^scale when weighted).
    """
    if p < 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    if mode in ("plain", "normalized"):
        vals = np.abs(f.restrict(f.square))
        if math.isinf(p):
            return float(vals.max(initial=0.0))
        total = float((vals ** p).sum()) * f.cell_area
        if mode == "normalized":
            total /= f.square.area
        return total ** (1 / p)
    if mode != "weighted":
        raise PreconditionError(f"unknown norm mode {mode!r}")
    return weighted_lp_norm(f, p, weight, scale, average)["norm"]


def covered_half_width(f: SampledField) -> float:
    """Largest half-width around the centre of f.square that the grid cells cover."""
    xs, ys = f.axes()
    cx, cy = f.square.center
    return min(cx - (xs[0] - f.spacing / 2), xs[-1] + f.spacing / 2 - cx,
               cy - (ys[0] - f.hy / 2), ys[-1] + f.hy / 2 - cy)


def weighted_lp_norm(f: SampledField, p: float, weight: WeightKind | None = None, scale: float = 1.0,
                     average: bool = False) -> dict:
    """
    (int |f|^p w_B^scale)^(1/p) over the truncated square, which the grid of f must cover
    (sample with half_width=weighted_half_width(kind, B, scale)). `tail_bound` bounds the dropped
    part of int |f|^p w^scale by the analytic weight tail times the sampled sup of |f|^p; it is 0 for p = inf.
    """
    if p < 1:
        raise PreconditionError(f"p must be >= 1, got {p}")
    kind = weight or WeightKind()
    need = weighted_half_width(kind, f.square, scale)
    have = covered_half_width(f)
    if have < need - 1e-9 * f.square.side:
        raise PreconditionError(f"weighted norm needs the grid to reach {need:g} from the centre, "
                                f"it reaches {have:g}")

    w = evaluate_weight(kind, f.square, _node_mesh(f)) ** scale
    vals = np.abs(f.values)
    if math.isinf(p):
        return {"norm": float((vals * w).max(initial=0.0)), "tail_bound": 0.0, "half_width": have}
    total = float((vals ** p * w).sum()) * f.cell_area
    tail = weighted_tail_bound(kind, f.square, have, scale) * float(vals.max(initial=0.0)) ** p
    if average:
        total /= f.square.area
        tail /= f.square.area
    return {"norm": total ** (1 / p), "tail_bound": tail, "half_width": have}


# =====================================
# Rescaling identities
# =====================================
def parabolic_rescale_identity_check(g: DensityFunction, I: Interval, p: float, B: SquareRegion,
                                     curve: CurveSpec = PARABOLA, spacing: float = MAX_SPACING) -> dict:
    """
    |E_I g(x)| = sigma |E g_a(T x)| with g_a(eta) = g(a + sigma eta) and
    T x = (sigma x1 + 2 c a sigma x2, sigma^2 x2) for h = c xi^2. Both sides are summed over the
    nodes of B, so the deviation only measures quadrature error.
    """
    if curve.variant != "parabola":
        raise PreconditionError("parabolic rescaling needs a parabola")
    a0, sigma = float(I.lo), float(I.length)
    f = evaluate_extension(g, I, curve, B, spacing)
    xs, ys = f.axes()
    tol = 1e-9 * B.side
    xs = xs[np.abs(xs - B.center[0]) <= B.half + tol]
    ys = ys[np.abs(ys - B.center[1]) <= B.half + tol]
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    Tx = np.stack([sigma * X + 2 * curve.a * a0 * sigma * Y, sigma * sigma * Y], axis=-1).reshape(-1, 2)

    lhs = lp_norm(f, p)
    image = evaluate_extension_at(g.rescaled(a0, sigma), UNIT_INTERVAL, curve, Tx)
    rhs = sigma * (float((np.abs(image) ** p).sum()) * f.cell_area) ** (1 / p)
    deviation = abs(lhs - rhs) / lhs if lhs > 0 else abs(rhs)
    return {"lhs": lhs, "rhs": rhs, "deviation": deviation, "jacobian": sigma ** 3}


def anisotropic_rescale_identity_check(r: float, p: float, f: SampledField, sampler) -> dict:
    """
    f_r(x1, x2) = r f(x1, r x2) satisfies ||f_r||_{L^p(X x Y/r)} = r^(1 - 1/p) ||f||_{L^p(X x Y)}.

    `sampler` evaluates f at arbitrary (x1, x2) arrays; f_r is resampled on its own midpoint grid
    over Y/r, so the two sides come from independent quadratures.
    """
    if r <= 0:
        raise PreconditionError("r must be positive")
    if not callable(sampler):
        raise PreconditionError("the rescaling check needs a sampler for f")
    base = float((np.abs(f.values) ** p).sum()) * f.cell_area
    rhs = r ** (1 - 1 / p) * base ** (1 / p)

    xs, ys = f.axes()
    y_lo, y_hi = ys[0] - f.hy / 2, ys[-1] + f.hy / 2
    span = (y_hi - y_lo) / r
    n = math.ceil(span / min(MAX_SPACING, f.hy) - 1e-9)
    hy = span / n
    ys_r = y_lo / r + hy / 2 + hy * np.arange(n)
    X, Y = np.meshgrid(xs, ys_r, indexing="ij")
    values = r * np.asarray(sampler(X, r * Y))
    lhs = (float((np.abs(values) ** p).sum()) * f.spacing * hy) ** (1 / p)
    deviation = abs(lhs - rhs) / rhs if rhs > 0 else abs(lhs)
    return {"lhs": lhs, "rhs": rhs, "deviation": deviation, "nodes": int(values.size)}


# =====================================
# Holder-type checks
# =====================================
def reverse_holder_ratio(g: DensityFunction, J: Interval, p: float, q: float, B: SquareRegion,
                         curve: CurveSpec = PARABOLA, spacing: float = MAX_SPACING,
                         weight: WeightKind | None = None) -> dict:
    """||E_J g||_{L^q_#(w_B)} / ||E_J g||_{L^p_#(w_B^(p/q))} for |J| = 1/side(B)."""
    if abs(float(J.length) * B.side - 1) > 1e-9:
        raise PreconditionError(f"need |J| * side = 1, got {float(J.length) * B.side}")
    if not (1 <= p < q):
        raise PreconditionError(f"need 1 <= p < q, got p={p}, q={q}")
    kind = weight or WeightKind()
    scale = 1.0 if math.isinf(q) else p / q
    f = sample_field(g, J, curve, B, spacing, weighted_half_width(kind, B, scale))
    if math.isinf(q):
        lhs, lhs_tail = lp_norm(f, math.inf), 0.0
    else:
        top = weighted_lp_norm(f, q, kind, 1.0, average=True)
        lhs, lhs_tail = top["norm"], top["tail_bound"]
    bottom = weighted_lp_norm(f, p, kind, scale, average=True)
    rhs = bottom["norm"]
    return {"lhs": lhs, "rhs": rhs, "ratio": lhs / rhs if rhs > 0 else 0.0,
            "lhs_tail_bound": lhs_tail, "rhs_tail_bound": bottom["tail_bound"]}


def l2_decoupling_ratio(g: DensityFunction, J: Interval, B: SquareRegion, curve: CurveSpec = PARABOLA,
                        spacing: float = MAX_SPACING, weight: WeightKind | None = None) -> dict:
    """
    ||E_J g||^2_{L^2(w_B)} / sum_{J' in P_{1/R}(J)} ||E_J' g||^2_{L^2(w_B)}, R = side(B).
    Cauchy-Schwarz caps the ratio by #children.
    """
    scale = Fraction(B.side).limit_denominator(10 ** 6)
    try:
        children = J.partition(1 / scale)
    except PartitionError:
        raise PartitionError(f"|J| = {J.length} is not a multiple of 1/R = {1 / scale}") from None
    kind = weight or WeightKind()
    xs, ys, h = square_axes(B, spacing, weighted_half_width(kind, B))
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    w = evaluate_weight(kind, B, np.stack([X, Y], axis=-1))
    checkpoints = grid_checkpoints(xs, ys)

    total = np.zeros((len(xs), len(ys)), dtype=complex)
    rhs = 0.0
    for child in children:
        F = evaluate_rule_on_axes(extension_rule(g, child, curve, checkpoints), xs, ys)
        total += F
        rhs += float((np.abs(F) ** 2 * w).sum()) * h * h
    lhs = float((np.abs(total) ** 2 * w).sum()) * h * h
    ratio = lhs / rhs if rhs > 0 else 0.0
    return {"ratio": ratio, "lhs": lhs, "rhs": rhs, "children": len(children), "cap": float(len(children))}


# =====================================
# Curve geometry
# =====================================
def certify_class_c(curve: CurveSpec, samples: int = 2001) -> dict:
    """h(0) = h'(0) = h'''(0) = 0 and 1/2 <= h'' <= 2 on the domain, checked on a dense grid."""
    xi = np.linspace(float(curve.domain.lo), float(curve.domain.hi), samples)
    d2 = curve_value(curve, xi, 2)
    at_zero = [float(curve_value(curve, np.array([0.0]), k)[0]) for k in (0, 1, 3)]
    certified = all(abs(v) <= 1e-9 for v in at_zero) and 0.5 <= d2.min() and d2.max() <= 2.0
    return {
        "h0": at_zero[0], "dh0": at_zero[1], "d3h0": at_zero[2],
        "min_d2h": float(d2.min()), "max_d2h": float(d2.max()),
        "max_abs_d3h": float(np.abs(curve_value(curve, xi, 3)).max()),
        "certified": bool(certified),
    }


def require_class_c(curve: CurveSpec) -> None:
    if curve.variant == "tabulated" and curve.claims_class_c and not certify_class_c(curve)["certified"]:
        raise PreconditionError("tabulated curve claims class C but fails certification")


def shift_normalization(curve: CurveSpec, ell: float, tau: float, samples: int = 1025) -> dict:
    """sup_{s in [0, tau]} |h(ell + s) - h(ell) - h'(ell) s - h''(ell) s^2 / 2| against its Taylor bound."""
    if not (curve.domain.lo <= ell and ell + tau <= curve.domain.hi):
        raise PreconditionError(f"[{ell}, {ell + tau}] leaves the curve domain")
    s = np.linspace(0.0, tau, samples)
    h0, h1, h2 = (float(curve_value(curve, np.array([ell]), k)[0]) for k in range(3))
    deviation = float(np.abs(curve_value(curve, ell + s) - h0 - h1 * s - h2 * s * s / 2).max())
    d3 = float(np.abs(curve_value(curve, ell + s, 3)).max())
    return {"deviation": deviation, "bound": d3 * tau ** 3 / 6, "class_c_bound": tau ** 3 / 3}


def parabola_approximation_gap(curve: CurveSpec, tau: float, samples: int = 1025) -> dict:
    """sup_{t in [0, tau]} |h(t) - h''(0) t^2 / 2|; at most tau^3/3 on class C curves."""
    t = np.linspace(0.0, tau, samples)
    c = float(curve_value(curve, np.array([0.0]), 2)[0]) / 2
    gap = float(np.abs(curve_value(curve, t) - c * t * t).max())
    return {"gap": gap, "bound": tau ** 3 / 3}
