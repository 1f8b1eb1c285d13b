# declab/services/circle_lattice.py
# Integer points on x^2 + y^2 = R, separations and the arc / subarc decomposition.

import logging
import math
from collections import Counter
from fractions import Fraction

import numpy as np

from declab.core.config import INTEGER_GUARD
from declab.core.errors import LadderMismatchError, PreconditionError, ResourceGuardError
from declab.models.bound_model import LadderParams
from declab.models.lattice_model import ArcAssignment, LatticeCircle
from declab.services.bounds import choose_circle_ladder

logger = logging.getLogger(__name__)

SCAN_BLOCK = 1 << 20


# =====================================
# Enumeration
# =====================================
def enumerate_circle_points(R: int) -> LatticeCircle:
    """All (x, y) in Z^2 with x^2 + y^2 = R, by an x-scan with an exact integer square-root test."""
    R = int(R)
    if R < 1:
        raise PreconditionError(f"R must be >= 1, got {R}")
    if R >= INTEGER_GUARD:
        raise ResourceGuardError(f"R = {R} exceeds the integer guard 2^62")

    points = []
    top = math.isqrt(R)
    # x in [0, isqrt(R)]; numpy for the bulk, exact isqrt to confirm
    for start in range(0, top + 1, SCAN_BLOCK):
        x = np.arange(start, min(top, start + SCAN_BLOCK - 1) + 1, dtype=np.int64)
        rest = R - x * x
        root = np.floor(np.sqrt(rest.astype(np.float64))).astype(np.int64)
        near = np.abs(root * root - rest) <= 4 * root + 4
        for xi, ri in zip(x[near].tolist(), rest[near].tolist()):
            y = math.isqrt(ri)
            if y * y == ri:
                points.extend({(sx * xi, sy * y) for sx in (1, -1) for sy in (1, -1)})
    lc = LatticeCircle(R=R, points=set(points))
    logger.debug("🔵 R=%d: %d lattice points", R, lc.N)
    return lc


def symmetry_closure(points) -> set[tuple[int, int]]:
    """Closure under (x, y) -> (+-x, +-y), (+-y, +-x)."""
    out = set()
    for x, y in points:
        for a, b in ((x, y), (y, x)):
            out.update({(a, b), (-a, b), (a, -b), (-a, -b)})
    return out


def first_octant(lc: LatticeCircle) -> list[tuple[int, int]]:
    return [(x, y) for x, y in lc.points if 0 <= y <= x]


# =====================================
# Divisor oracle
# =====================================
def r2_divisor_count(R: int) -> int:
    """r_2(R) = 4 (d_1(R) - d_3(R)), divisors counted by residue mod 4."""
    R = int(R)
    if R < 1:
        raise PreconditionError("R must be >= 1")
    d1 = d3 = 0
    for d in range(1, math.isqrt(R) + 1):
        if R % d:
            continue
        for e in {d, R // d}:
            if e % 4 == 1:
                d1 += 1
            elif e % 4 == 3:
                d3 += 1
    return 4 * (d1 - d3)


def r2_table(n: int) -> np.ndarray:
    """r_2(R) for R = 0..n via a divisor sieve (entry 0 is 1)."""
    chi = np.zeros(n + 1, dtype=np.int64)
    for d in range(1, n + 1, 2):
        chi[d::d] += 1 if d % 4 == 1 else -1
    chi *= 4
    chi[0] = 1
    return chi


# =====================================
# Separation
# =====================================
def normalized_separation(lc: LatticeCircle) -> float:
    """min |a - b| / sqrt(R) over distinct pairs, from exact integer squared distances."""
    if lc.N < 2:
        raise PreconditionError("separation needs at least two points")
    pts = np.array(lc.points, dtype=np.int64)
    best = None
    for i in range(len(pts) - 1):
        d = pts[i + 1:] - pts[i]
        m = int((d * d).sum(axis=1).min())
        best = m if best is None else min(best, m)
    sep = math.sqrt(best / lc.R) if lc.R > 0 else math.sqrt(best)
    if lc.R > 0 and best < 1:
        raise PreconditionError("coincident points")
    return sep


def arc_separation_distance(a: float, ell: float) -> float:
    """Chord length between the unit-circle graph points over a and a + ell (both in [0, 1])."""
    if not (0 <= a and a + ell <= 1 and ell >= 0):
        raise PreconditionError("need 0 <= a <= a + ell <= 1")
    s = (2 * a + ell) / (math.sqrt(1 - a * a) + math.sqrt(1 - (a + ell) ** 2))
    return ell * math.sqrt(1 + s * s)


# =====================================
# Arcs
# =====================================
def _angle(x: int, y: int) -> float:
    return math.atan2(y, x) % (2 * math.pi)


def arc_of_angle(phi: float, tau0: float, arc_count: int) -> int:
    """Arc index for arcs (k tau0, (k+1) tau0]; the first arc is closed at 0. Boundary points go to the lower arc."""
    k = phi / tau0
    nearest = round(k)
    upper = nearest if abs(k - nearest) <= 1e-12 * max(1.0, k) else math.ceil(k)
    return min(max(upper - 1, 0), arc_count - 1)


def subarc_of(coordinate: float, width: float) -> int:
    """Bin (s width, (s+1) width] of the chord coordinate, with the same tie rule as arc_of_angle."""
    if width <= 0:
        return 0
    return arc_of_angle(max(coordinate, 0.0), width, math.inf)


def assign_points_to_arcs(lc: LatticeCircle, ladder: LadderParams) -> ArcAssignment:
    """
    Arcs of arclength tau0 starting at angle 0 (ceil(2 pi / tau0) of them, the last one shorter),
    half-open (start, end] with the first arc closed at 0, so boundary points go to the lower arc.
    Inside an arc, points are binned by the coordinate along the arc's chord direction at the arc
    start into subarcs of width tau_{N+1} tau0, with the same tie rule. Occupancy above one is
    reported, not assumed away.
    """
    tau = ladder.tau
    tau0, tau_last = tau[0], tau[-1]
    if lc.R > 0 and ladder.log_inv_delta is not None:
        delta_log = math.log(lc.R) / 2
        if abs(delta_log - ladder.log_inv_delta) > 1e-9 * max(1.0, delta_log):
            raise LadderMismatchError(f"ladder built for log(1/delta)={ladder.log_inv_delta}, "
                                      f"but 1/sqrt(R) gives {delta_log}")
    if lc.R > 0 and ladder.log_inv_tau[-1] < math.log(lc.R) / 2 * (1 - 1e-12) and ladder.strict:
        raise LadderMismatchError("tau_{N+1} exceeds delta = 1/sqrt(R)")

    arc_count = math.ceil(2 * math.pi / tau0 - 1e-12)
    width = tau_last * tau0

    rows, bins = [], Counter()
    for x, y in lc.points:
        phi = _angle(x, y)
        arc = arc_of_angle(phi, tau0, arc_count)
        start = arc * tau0
        # angle from the arc start, measured in the frame rotated to that start
        rel = phi - start
        coordinate = math.sin(rel)
        sub = subarc_of(coordinate, width)
        rows.append((x, y, arc, sub))
        bins[(arc, sub)] += 1

    occupancy = Counter(bins.values())
    violations = sorted(k for k, v in bins.items() if v > 1)
    if violations:
        logger.warning("⚠️ %d subarcs hold more than one point (R=%d)", len(violations), lc.R)
    return ArcAssignment(
        tau0=Fraction(tau0).limit_denominator(10 ** 12) if tau0 > 0 else Fraction(0),
        arc_count=arc_count,
        subarc_width=width,
        assignment=rows,
        occupancy=dict(occupancy),
        violations=violations,
    )


def ladder_validity(R: int, C0=Fraction(1, 128)) -> dict:
    """Whether a strict circle ladder exists for delta = 1/sqrt(R), with the reason when it does not."""
    if R < 2:
        return {"valid": False, "reason": "R < 2 gives delta >= 1", "N": None}
    try:
        ladder = choose_circle_ladder(C0=C0, log_inv_delta=math.log(R) / 2)
    except PreconditionError as exc:
        return {"valid": False, "reason": str(exc), "N": None}
    return {"valid": True, "reason": "adjusted C0" if ladder.adjusted else "", "N": ladder.N, "K": ladder.K}
