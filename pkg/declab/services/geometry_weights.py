# declab/services/geometry_weights.py
# Weight families, weight-calculus checks, oriented boxes and the ball-inflation tilings.

import logging
import math
from fractions import Fraction

import numpy as np
from scipy.ndimage import uniform_filter
from scipy.special import logsumexp

from declab.core.config import WEIGHT_CUTOFF, WEIGHT_EXTENT_FACTOR
from declab.core.errors import (DegenerateGeometryError, GridTooCoarseError, PartitionError,
                                PreconditionError)
from declab.models.geometry_model import GridSpec, Interval, OrientedBox, SquareRegion, WeightKind

logger = logging.getLogger(__name__)

ETA_SHIFT = 1.0 / 7.0      # exp(1 - 1/(1 - 1/8)) = e^(-1/7) at the corners of B
CHUNK = 2048


# =====================================
# Weights
# =====================================
def evaluate_weight(kind: WeightKind, B: SquareRegion, x) -> np.ndarray | float:
    """
    w_B(x)  = (1 + |x - c|/R)^(-e)
    w~_B(x) = prod_i (1 + |x_i - c_i|/R)^(-e)
    eta_B(x) = e^(1/7) exp(1 - 1/(1 - u^2)) 1[u < 1] + (1 + |x - c|^2/R^2)^(-e),  u = |x - c|/(2R)

    eta_B >= 1 on B and its tail is <= 2^e w_B^2. Works on a single point or an (..., 2) array.
    """
    x = np.asarray(x, dtype=float)
    R, e = B.side, kind.exponent
    dx, dy = x[..., 0] - B.center[0], x[..., 1] - B.center[1]

    if kind.variant == "radial_w":
        out = (1.0 + np.hypot(dx, dy) / R) ** (-e)
    elif kind.variant == "product_w_tilde":
        out = ((1.0 + np.abs(dx) / R) * (1.0 + np.abs(dy) / R)) ** (-e)
    else:
        r2 = (dx * dx + dy * dy) / (R * R)
        u2 = r2 / 4.0
        inside = u2 < 1.0
        safe = np.where(inside, 1.0 - u2, 1.0)
        bump = np.where(inside, np.exp(ETA_SHIFT + 1.0 - 1.0 / safe), 0.0)
        out = bump + (1.0 + r2) ** (-e)
    return float(out) if out.ndim == 0 else out


def log_weight(kind: WeightKind, B: SquareRegion, x) -> np.ndarray:
    """log of the radial or product weight (no underflow at far points)."""
    x = np.asarray(x, dtype=float)
    R, e = B.side, kind.exponent
    dx, dy = x[..., 0] - B.center[0], x[..., 1] - B.center[1]
    if kind.variant == "radial_w":
        return -e * np.log1p(np.hypot(dx, dy) / R)
    if kind.variant == "product_w_tilde":
        return -e * (np.log1p(np.abs(dx) / R) + np.log1p(np.abs(dy) / R))
    return np.log(evaluate_weight(kind, B, x))


def weight_integral(kind: WeightKind, R: float) -> float:
    """Exact integral of the radial or product weight over the plane."""
    e = kind.exponent
    if kind.variant == "product_w_tilde":
        return (2 * R / (e - 1)) ** 2
    if kind.variant == "radial_w":
        return 2 * math.pi * R * R / ((e - 1) * (e - 2))
    raise PreconditionError("closed form only for radial_w and product_w_tilde")


def weighted_half_width(kind: WeightKind, B: SquareRegion, scale: float = 1.0) -> float:
    """
    Half-width of the square that weighted integrals run over: max(R/2, rho), where w^scale drops
    below WEIGHT_CUTOFF at distance rho, capped at the 8x square.
    """
    R, es = B.side, kind.exponent * scale
    grow = WEIGHT_CUTOFF ** (-1.0 / es) - 1.0
    if kind.variant == "bump_eta":
        rho = max(2.0 * R, R * math.sqrt(max(grow, 0.0)))
    else:
        rho = R * grow
    return min(max(R / 2, rho), WEIGHT_EXTENT_FACTOR * R / 2)


def weighted_tail_bound(kind: WeightKind, B: SquareRegion, half_width: float, scale: float = 1.0) -> float:
    """Upper bound for the integral of w^scale outside the square of half-width `half_width` around c."""
    R, es, H = B.side, kind.exponent * scale, half_width
    if kind.variant == "radial_w":
        if es <= 2:
            return math.inf
        return 2 * math.pi * R * R * (1 + H / R) ** (2 - es) / (es - 2)
    if kind.variant == "product_w_tilde":
        if es <= 1:
            return math.inf
        one_dim = 2 * R / (es - 1)
        outside = 2 * R * (1 + H / R) ** (1 - es) / (es - 1)
        return 2 * outside * one_dim
    if es <= 1:
        return math.inf
    compact = 0.0 if H >= 2 * R else math.e ** (1 + ETA_SHIFT) * 4 * R * R * 4
    return compact + math.pi * R * R * (1 + H * H / (R * R)) ** (1 - es) / (es - 1)


# =====================================
# Weight-calculus checks
# =====================================
def _octant(points: np.ndarray) -> np.ndarray:
    """Grid nodes with 0 <= y <= x; the radial checks are symmetric under the 8 lattice symmetries."""
    return points[(points[:, 1] >= -1e-12) & (points[:, 1] <= points[:, 0] + 1e-12)]


def weight_convolution_check(R: float, Rp: float, grid: GridSpec, exponent: float = 100.0) -> dict:
    """
    Measures, by direct discrete convolution on `grid` (centred at the origin):

      upper = sup_x (w_R * w_R')(x) / (R'^2 w_R(x))
      lower = inf_x (1_B * w_R)(x) / (R^2 w_R(x)),   B = B(0, R)

    plus the lower ratio at x = 0 and the mass of w_R' outside the grid (truncation bound).
    """
    if not (0 < Rp <= R):
        raise PreconditionError(f"need 0 < R' <= R, got R={R}, R'={Rp}")
    if grid.spacing > Rp / 4 + 1e-12:
        raise GridTooCoarseError(f"spacing {grid.spacing} > R'/4 = {Rp / 4}; refine the grid")
    if grid.extent < 4 * R - 1e-12:
        raise PreconditionError(f"grid must cover B(0, 8R): extent {grid.extent} < {4 * R}")
    if any(abs(c) > 0 for c in grid.center):
        raise PreconditionError("convolution grid must be centred at the origin")

    h2 = grid.spacing ** 2
    ys = grid.points()
    in_B = (np.abs(ys[:, 0]) <= R / 2 + 1e-12) & (np.abs(ys[:, 1]) <= R / 2 + 1e-12)
    log_wp_y = -exponent * np.log1p(np.hypot(ys[:, 0], ys[:, 1]) / Rp)
    yB = ys[in_B]

    xs = _octant(ys)
    upper, lower = 0.0, math.inf
    center_ratio = None
    for start in range(0, len(xs), 64):
        x = xs[start:start + 64]
        log_w_x = -exponent * np.log1p(np.hypot(x[:, 0], x[:, 1]) / R)[:, None]

        # w_R(x - y) w_R'(y) / w_R(x) <= 1 termwise
        d = np.hypot(x[:, None, 0] - ys[None, :, 0], x[:, None, 1] - ys[None, :, 1])
        terms = np.exp(-exponent * np.log1p(d / R) + log_wp_y[None, :] - log_w_x)
        conv = h2 * terms.sum(axis=1) / (Rp * Rp)
        upper = max(upper, float(conv.max()))

        dB = np.hypot(x[:, None, 0] - yB[None, :, 0], x[:, None, 1] - yB[None, :, 1])
        ind = h2 * np.exp(-exponent * np.log1p(dB / R) - log_w_x).sum(axis=1) / (R * R)
        lower = min(lower, float(ind.min()))
        at_zero = np.flatnonzero(np.hypot(x[:, 0], x[:, 1]) < 1e-12)
        if at_zero.size:
            center_ratio = float(ind[at_zero[0]])

    tail = weighted_tail_bound(WeightKind(exponent=exponent), SquareRegion(side=Rp), grid.extent)
    logger.debug("📐 convolution check R=%g R'=%g: upper=%.4g lower=%.4g", R, Rp, upper, lower)
    return {"upper": upper, "lower": lower, "center_ratio": center_ratio,
            "truncation_bound": tail, "points": int(len(ys))}


def one_dim_convolution_check(R: float, Rp: float, spacing: float, exponent: float = 100.0) -> dict:
    """1-D analogue on [-4R, 4R]: sup (w_I * w_I')/(R' w_I) and sup R w_I / (1_I * w_I)."""
    if not (0 < Rp <= R):
        raise PreconditionError(f"need 0 < R' <= R, got R={R}, R'={Rp}")
    if spacing > Rp / 4 + 1e-12:
        raise GridTooCoarseError(f"spacing {spacing} > R'/4 = {Rp / 4}")
    n = int(math.floor(4 * R / spacing + 1e-9))
    t = spacing * np.arange(-n, n + 1)
    log_w = -exponent * np.log1p(np.abs(t) / R)
    log_wp = -exponent * np.log1p(np.abs(t) / Rp)
    diff = np.abs(t[:, None] - t[None, :])
    log_w_diff = -exponent * np.log1p(diff / R)

    conv = spacing * np.exp(log_w_diff + log_wp[None, :] - log_w[:, None]).sum(axis=1) / Rp
    in_I = np.abs(t) <= R / 2 + 1e-12
    ind = spacing * np.exp(log_w_diff[:, in_I] - log_w[:, None]).sum(axis=1)
    return {"upper": float(conv.max()), "lower_constant": float((R / ind).max())}


def subweight_ratio_at(B: SquareRegion, r: float, points, exponent: float = 100.0) -> np.ndarray:
    """sum_{Delta in P_r(B)} w_Delta(x) / w_B(x) at each point, computed in log space."""
    tiles = B.tile_centers(r)          # raises PartitionError for non-integral tilings
    x = np.asarray(points, dtype=float).reshape(-1, 2)
    log_wB = -exponent * np.log1p(np.hypot(x[:, 0] - B.center[0], x[:, 1] - B.center[1]) / B.side)
    out = np.empty(len(x))
    for start in range(0, len(x), CHUNK):
        xc = x[start:start + CHUNK]
        d = np.hypot(xc[:, None, 0] - tiles[None, :, 0], xc[:, None, 1] - tiles[None, :, 1])
        log_sum = logsumexp(-exponent * np.log1p(d / r), axis=1)
        out[start:start + CHUNK] = np.exp(log_sum - log_wB[start:start + CHUNK])
    return out


def sum_of_subweights_check(B: SquareRegion, r: float, grid: GridSpec, exponent: float = 100.0) -> dict:
    """sup over the grid of sum_{Delta in P_r(B)} w_Delta / w_B."""
    tiles = len(B.partition(r))
    x = grid.points()
    ratio = subweight_ratio_at(B, r, x, exponent)
    k = int(np.argmax(ratio))
    cap = tiles * (1 + 1 / math.sqrt(2)) ** exponent
    return {"constant": float(ratio[k]), "argmax": tuple(map(float, x[k])), "tiles": tiles, "analytic_cap": cap}


def rotated_center_weight_check(delta_inv: float, a_values, angles, grid: GridSpec,
                                exponent: float = 100.0) -> dict:
    """sup of w_{B(Rot(a,0), 1/delta)} / w_{B(0, 1/delta)} over the grid, for |a| <= 1/delta."""
    R = float(delta_inv)
    x = grid.points()
    log_w0 = -exponent * np.log1p(np.hypot(x[:, 0], x[:, 1]) / R)
    worst, cap = 0.0, 0.0
    for a in a_values:
        if abs(a) > R + 1e-12:
            raise PreconditionError(f"|a| = {abs(a)} exceeds 1/delta = {R}")
        cap = max(cap, (1 + abs(a) / R) ** exponent)
        for theta in angles:
            c = (a * math.cos(theta), a * math.sin(theta))
            log_wc = -exponent * np.log1p(np.hypot(x[:, 0] - c[0], x[:, 1] - c[1]) / R)
            worst = max(worst, float(np.exp(log_wc - log_w0).max()))
    return {"constant": worst, "analytic_cap": cap}


def layer_cake_constants(B: SquareRegion, exponent: float = 100.0, n_max: int = 4,
                         grid: GridSpec | None = None) -> dict:
    """
    Two-sided constants c, C with c S <= w_B <= C S on the grid restricted to 2^n_max B, where
    S = sum_{n=0}^{n_max} 2^(-e n) 1_{2^n B}.
    """
    grid = grid or GridSpec(spacing=B.side / 16, extent=2 ** n_max * B.side / 2, center=B.center)
    x = grid.points()
    dx, dy = np.abs(x[:, 0] - B.center[0]), np.abs(x[:, 1] - B.center[1])
    cheb = np.maximum(dx, dy)
    keep = cheb <= 2 ** n_max * B.side / 2 + 1e-12
    x, cheb = x[keep], cheb[keep]

    n = np.arange(n_max + 1)
    inside = cheb[:, None] <= (2.0 ** n)[None, :] * B.side / 2 + 1e-12
    log_terms = np.where(inside, -exponent * n * math.log(2), -np.inf)
    log_S = logsumexp(log_terms, axis=1)
    log_w = log_weight(WeightKind(exponent=exponent), B, x)
    log_ratio = log_w - log_S
    return {"lower": float(np.exp(log_ratio.min())), "upper": float(np.exp(log_ratio.max()))}


def local_average_weight_check(f, B: SquareRegion, p: float, exponent: float = 100.0) -> dict:
    """
    Compares ||f||^p_{L^p(w_B)} with  int ||f||^p_{L^p_#(B(y, R))} w_B(y) dy  on the field's grid.

    Both sides are discrete sums over the same nodes, so ratio <= 1 / min(K / w_B) where
    K = R^-2 (1_B * w_B) is the discrete kernel of the right side.
    """
    hx, hy = f.spacing, f.hy
    if abs(hx - hy) > 1e-12:
        raise PreconditionError("local averages need a square grid")
    xs, ys = f.axes()
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    w = evaluate_weight(WeightKind(exponent=exponent), B, np.stack([X, Y], axis=-1))
    R = B.side
    m = int(math.floor(R / (2 * hx) + 1e-9))
    size = 2 * m + 1
    cell = hx * hy

    power = np.abs(f.values) ** p
    lhs = float((power * w).sum() * cell)
    # box sums over B(y, R) for every node y (zero outside the grid)
    box_power = uniform_filter(power, size=size, mode="constant", cval=0.0) * size * size
    rhs = float((box_power * cell / (R * R) * w).sum() * cell)
    box_w = uniform_filter(w, size=size, mode="constant", cval=0.0) * size * size
    kernel = box_w * cell / (R * R)
    support = power > 0
    cap = float((w[support] / kernel[support]).max()) if support.any() else 0.0
    ratio = lhs / rhs if rhs > 0 else 0.0
    return {"ratio": ratio, "lhs": lhs, "rhs": rhs, "cap": cap}


# =====================================
# Oriented boxes
# =====================================
def _clip_polygon_half_plane(polygon, inside, intersect):
    """Sutherland-Hodgman: clip polygon to a half-plane."""
    out = []
    n = len(polygon)
    for i in range(n):
        cur, nxt = polygon[i], polygon[(i + 1) % n]
        cur_in, nxt_in = inside(cur), inside(nxt)
        if cur_in:
            out.append(cur)
            if not nxt_in:
                out.append(intersect(cur, nxt))
        elif nxt_in:
            out.append(intersect(cur, nxt))
    return out


def _signed_area(vertices) -> float:
    """Shoelace formula; positive for counter-clockwise vertices."""
    if len(vertices) < 3:
        return 0.0
    s = 0.0
    for (x0, y0), (x1, y1) in zip(vertices, vertices[1:] + vertices[:1]):
        s += x0 * y1 - x1 * y0
    return s / 2.0


def _polygon_area(vertices) -> float:
    return abs(_signed_area(list(vertices)))


def clip_convex(subject: list, clip: list) -> list:
    """Intersection polygon of two convex polygons, clip vertices counter-clockwise."""
    out = list(subject)
    clip = list(clip)
    if _signed_area(clip) < 0:
        clip.reverse()
    n = len(clip)
    for i in range(n):
        (ax, ay), (bx, by) = clip[i], clip[(i + 1) % n]
        ex, ey = bx - ax, by - ay

        def side(p, ax=ax, ay=ay, ex=ex, ey=ey):
            return ex * (p[1] - ay) - ey * (p[0] - ax)

        def intersect(p, q):
            sp, sq = side(p), side(q)
            t = sp / (sp - sq)
            return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))

        out = _clip_polygon_half_plane(out, lambda p: side(p) >= 0.0, intersect)
        if not out:
            return []
    return out


def oriented_box_intersection_area(P1: OrientedBox, P2: OrientedBox) -> float:
    """Exact area of the convex intersection of two rectangles."""
    if P1.area <= 0 or P2.area <= 0:
        raise DegenerateGeometryError("zero-area box")
    return _polygon_area(clip_convex(P1.vertices(), P2.vertices()))


def monte_carlo_intersection_area(P1: OrientedBox, P2: OrientedBox, samples: int = 1_000_000,
                                  seed: int = 0) -> float:
    """Monte-Carlo oracle: uniform samples in P1, fraction landing in P2, times |P1|."""
    if P1.area <= 0 or P2.area <= 0:
        raise DegenerateGeometryError("zero-area box")
    rng = np.random.default_rng(seed)
    a = rng.uniform(-P1.short / 2, P1.short / 2, samples)
    b = rng.uniform(-P1.long / 2, P1.long / 2, samples)
    (nx, ny), (ux, uy) = P1.normal, P1.direction
    pts = np.stack([P1.center[0] + a * nx + b * ux, P1.center[1] + a * ny + b * uy], axis=-1)
    return P1.area * float(P2.contains(pts).mean())


def square_as_box(B: SquareRegion) -> OrientedBox:
    return OrientedBox(center=B.center, long=B.side, short=B.side, direction=(0.0, 1.0))


def normal_direction(c: float) -> tuple[float, float]:
    """Unit normal (-2c, 1)/|(-2c, 1)| to the parabola at xi = c."""
    norm = math.hypot(2 * c, 1.0)
    return (-2 * c / norm, 1.0 / norm)


# =====================================
# Ball-inflation tilings
# =====================================
def build_tiling(J: Interval, Dp: SquareRegion, b: int, nu) -> list[OrientedBox]:
    """
    Cover Delta' (side nu^-2b) by parallel nu^-b x nu^-2b boxes with the long side along the
    normal at c_J. Boxes form a grid symmetric about the centre of Delta'; only boxes meeting
    Delta' in positive area are kept.
    """
    nu = Fraction(nu)
    if J.length != nu ** b:
        raise PartitionError(f"|J| = {J.length} must equal nu^b = {nu ** b}")
    return tile_along_normal(float(J.center), Dp, b, nu)


def tile_along_normal(c: float, Dp: SquareRegion, b: int, nu) -> list[OrientedBox]:
    """The tiling of build_tiling for the normal at xi = c; c = 0 gives axis-parallel boxes."""
    nu = Fraction(nu)
    inv = 1 / nu ** b
    if b < 1 or inv.denominator != 1:
        raise PartitionError(f"nu^-b must be an integer, got {inv}")
    long, short = float(inv ** 2), float(inv)
    if abs(Dp.side - long) > 1e-9 * long:
        raise PartitionError(f"Delta' side {Dp.side} must be nu^-2b = {long}")

    d = normal_direction(c)
    n = (-d[1], d[0])
    span_d = Dp.side * (abs(d[0]) + abs(d[1]))
    span_n = Dp.side * (abs(n[0]) + abs(n[1]))
    k_d = max(1, math.ceil(span_d / long - 1e-9))
    k_n = max(1, math.ceil(span_n / short - 1e-9))

    square = square_as_box(Dp)
    boxes = []
    for i in range(k_d):
        for j in range(k_n):
            s = (i - (k_d - 1) / 2) * long
            t = (j - (k_n - 1) / 2) * short
            center = (Dp.center[0] + s * d[0] + t * n[0], Dp.center[1] + s * d[1] + t * n[1])
            box = OrientedBox(center=center, long=long, short=short, direction=d)
            if oriented_box_intersection_area(box, square) > 1e-9 * box.area:
                boxes.append(box)
    logger.debug("🧱 tiling for c_J=%s: %d boxes", c, len(boxes))
    return boxes


def tiling_intersection_constant(J1: Interval, J2: Interval, b: int, nu, offsets) -> dict:
    """
    max over the relative placements `offsets` of |P_J1 cap P_J2| / nu^(-2b-1), where P_Ji is a
    nu^-b x nu^-2b box along the normal at c_Ji. Two strips of width w meet in area <= w^2/sin(angle),
    which is <= (5/2) nu^(-2b-1) for nu-separated centres in [0, 1].
    """
    nu = Fraction(nu)
    if abs(J1.center - J2.center) < nu:
        raise PreconditionError("interval centres must be nu-separated")
    long, short = float(1 / nu ** (2 * b)), float(1 / nu ** b)
    d1, d2 = normal_direction(float(J1.center)), normal_direction(float(J2.center))
    scale = float(1 / nu ** (2 * b + 1))
    P1 = OrientedBox(center=(0.0, 0.0), long=long, short=short, direction=d1)
    worst = 0.0
    for off in offsets:
        P2 = OrientedBox(center=(float(off[0]), float(off[1])), long=long, short=short, direction=d2)
        worst = max(worst, oriented_box_intersection_area(P1, P2) / scale)
    sin_angle = abs(d1[0] * d2[1] - d1[1] * d2[0])
    strip = short * short / sin_angle / scale if sin_angle > 0 else math.inf
    return {"constant": worst, "strip_bound": strip}
