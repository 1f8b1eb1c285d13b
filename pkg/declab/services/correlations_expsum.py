# declab/services/correlations_expsum.py
# Additive correlations S4 / S6 of lattice point sets and L^p norms of their exponential sums.

import logging
import math
from collections import Counter

import numpy as np

from declab.core.config import (BRUTE_MAX_POINTS, DFT_RESIDUAL, HASH_MAX_POINTS, HASH_SHARD_SIZE,
                                INTEGER_GUARD)
from declab.core.errors import (IntegrityError, NyquistError, PrecisionLossError, PreconditionError,
                                ResourceGuardError)
from declab.core.parallel import map_jobs
from declab.models.lattice_model import CorrelationResult, ExpSumSpec, LatticeCircle
from declab.seed.seed_envelopes import check_envelope
from declab.services.circle_lattice import enumerate_circle_points
from declab.services.extension_ops import exponential_sum_field

logger = logging.getLogger(__name__)


def _as_array(points) -> np.ndarray:
    if isinstance(points, LatticeCircle):
        points = points.points
    return np.array(list(points), dtype=np.int64).reshape(-1, 2)


def _square_sum(counts) -> int:
    """sum of squares as an exact Python integer."""
    return sum(int(c) * int(c) for c in counts)


# =====================================
# Sum multiplicities
# =====================================
class _KeyCodec:
    """Packs integer vectors with |coordinate| <= bound into single int64 keys."""

    def __init__(self, bound: int):
        self.offset = bound
        self.width = 2 * bound + 1
        if self.width * self.width >= INTEGER_GUARD:
            raise ResourceGuardError("sum keys would overflow 64-bit integers")

    def encode(self, v: np.ndarray) -> np.ndarray:
        return (v[..., 0] + self.offset) * self.width + (v[..., 1] + self.offset)


def _pair_sums(pts: np.ndarray, codec: _KeyCodec) -> tuple[np.ndarray, np.ndarray]:
    sums = (pts[:, None, :] + pts[None, :, :]).reshape(-1, 2)
    return np.unique(codec.encode(sums), return_counts=True)


def count_s4(points) -> int:
    """sum_s #{(l1, l2): l1 + l2 = s}^2."""
    pts = _as_array(points)
    if len(pts) == 0:
        return 0
    codec = _KeyCodec(2 * int(np.abs(pts).max()))
    _, counts = _pair_sums(pts, codec)
    return _square_sum(counts)


def triple_sum_counts(points) -> np.ndarray:
    """Multiplicities T(s) = #{(l1, l2, l3): l1 + l2 + l3 = s} over the occupied sums s."""
    pts = _as_array(points)
    N = len(pts)
    if N == 0:
        return np.zeros(0, dtype=np.int64)
    codec = _KeyCodec(3 * int(np.abs(pts).max()))
    pair_keys, pair_counts = _pair_sums(pts, codec)
    # key(a + b) = key(a) + key(b) - key(0) for the packed encoding
    zero = codec.encode(np.zeros(2, dtype=np.int64))
    point_keys = codec.encode(pts) - zero

    per_shard = max(1, HASH_SHARD_SIZE // max(1, len(pair_keys)))
    shards = [point_keys[s:s + per_shard] for s in range(0, N, per_shard)]

    def shard_counts(shard):
        keys = (shard[:, None] + pair_keys[None, :]).ravel()
        weights = np.broadcast_to(pair_counts, (len(shard), len(pair_counts))).ravel()
        uniq, inverse = np.unique(keys, return_inverse=True)
        return uniq, np.bincount(inverse, weights=weights).astype(np.int64)

    parts = map_jobs(shard_counts, shards)
    keys = np.concatenate([k for k, _ in parts])
    counts = np.concatenate([c for _, c in parts])
    uniq, inverse = np.unique(keys, return_inverse=True)
    return np.bincount(inverse, weights=counts).astype(np.int64)


def count_s6_hash(points) -> int:
    """S6 = sum_s T(s)^2, exact."""
    pts = _as_array(points)
    if len(pts) > HASH_MAX_POINTS:
        raise ResourceGuardError(f"N = {len(pts)} exceeds {HASH_MAX_POINTS}; use the dft method")
    return _square_sum(triple_sum_counts(pts))


def count_s6_brute(points) -> int:
    """Direct count of 6-tuples with l1 + l2 + l3 = l4 + l5 + l6 (N <= 12)."""
    pts = _as_array(points)
    N = len(pts)
    if N > BRUTE_MAX_POINTS:
        raise PreconditionError(f"brute force refuses N = {N} > {BRUTE_MAX_POINTS}")
    if N == 0:
        return 0
    triples = (pts[:, None, None, :] + pts[None, :, None, :] + pts[None, None, :, :]).reshape(-1, 2)
    total = 0
    for t in triples:
        total += int(np.all(triples == t, axis=1).sum())
    return total


# =====================================
# DFT moments
# =====================================
def _grid_moment(pts: np.ndarray, M: int, power: int) -> int:
    """(1/M^2) sum_{j,k} |F(j/M, k/M)|^power, rounded, for F(x, y) = sum e(n x + m y)."""
    G = np.zeros((M, M), dtype=float)
    np.add.at(G, (pts[:, 0] % M, pts[:, 1] % M), 1.0)
    F = np.fft.ifft2(G) * (M * M)
    total = math.fsum((np.abs(F) ** power).ravel()) / (M * M)
    result = round(total)
    if abs(total - result) > DFT_RESIDUAL * max(1, result):
        raise PrecisionLossError(f"DFT moment {total!r} is not within {DFT_RESIDUAL} of an integer")
    return int(result)


def s6_via_dft(points, M: int) -> int:
    """S6 as the sixth moment of the exponential sum on an M x M grid (exact past Nyquist)."""
    pts = _as_array(points)
    if len(pts) == 0:
        return 0
    c = int(np.abs(pts).max())
    if M < 12 * c + 1:
        raise NyquistError(f"M = {M} < 12 max|c| + 1 = {12 * c + 1}")
    return _grid_moment(pts, M, 6)


def s4_via_dft(points, M: int) -> int:
    pts = _as_array(points)
    if len(pts) == 0:
        return 0
    c = int(np.abs(pts).max())
    if M < 8 * c + 1:
        raise NyquistError(f"M = {M} < 8 max|c| + 1 = {8 * c + 1}")
    return _grid_moment(pts, M, 4)


def default_dft_size(R: int) -> int:
    return 12 * math.isqrt(max(R - 1, 0)) + 12 + 1 if R > 0 else 13


def circle_s6_bound(N: int) -> int:
    """2 N^4 + 3 N^3: two circles of equal radius share at most two points."""
    return 2 * N ** 4 + 3 * N ** 3


def correlation_result(lc: LatticeCircle, method: str = "hash", M: int | None = None) -> CorrelationResult:
    if method == "brute":
        S6, tag = count_s6_brute(lc), "brute6"
    elif method == "dft":
        M = M or default_dft_size(max(lc.R, lc.max_coordinate ** 2))
        S6, tag = s6_via_dft(lc, M), "dft"
    elif method == "hash":
        S6, tag = count_s6_hash(lc), "hash3"
    else:
        raise PreconditionError(f"unknown S6 method {method!r}")
    ratio = S6 / lc.N ** 3 if lc.N else None
    return CorrelationResult(R=lc.R, N=lc.N, S6=S6, S4=count_s4(lc), ratio_S6_N3=ratio,
                             method=tag, M=M if tag == "dft" else None)


def cross_check(lc: LatticeCircle, M: int | None = None) -> CorrelationResult:
    """hash and dft must agree exactly; otherwise IntegrityError."""
    hashed = correlation_result(lc, "hash")
    dft = correlation_result(lc, "dft", M)
    if hashed.S6 != dft.S6:
        raise IntegrityError(f"S6 mismatch at R={lc.R}: hash {hashed.S6} != dft {dft.S6}")
    return dft


# =====================================
# Exponential sums
# =====================================
def expsum_lp_norm(spec: ExpSumSpec) -> float:
    """
    Normalized L^p norm of F = sum_a e(a . z).

    period:     a integer, z over [0,1]^2 sampled at j/M (exact for even p once M >= 2 p max|c| + 1)
    normalized: a / sqrt(R) on the unit circle, z over `square` on an M x M midpoint grid
    """
    pts = _as_array(spec.points)
    if len(pts) == 0:
        return 0.0
    p = spec.p
    if spec.mode == "period":
        c = int(np.abs(pts).max())
        even = float(p).is_integer() and int(p) % 2 == 0
        if even and spec.M < 2 * int(p) * c + 1:
            raise NyquistError(f"M = {spec.M} too small for exact p = {p} moments")
        G = np.zeros((spec.M, spec.M), dtype=float)
        np.add.at(G, (pts[:, 0] % spec.M, pts[:, 1] % spec.M), 1.0)
        F = np.abs(np.fft.ifft2(G) * spec.M * spec.M)
        if math.isinf(p):
            return float(F.max())
        return (math.fsum((F ** p).ravel()) / spec.M ** 2) ** (1 / p)

    R = spec.points.R or int((pts[0] ** 2).sum())
    freqs = pts / math.sqrt(R)
    h = spec.square.side / spec.M
    if h > 1 / (4 * float(np.abs(freqs).max())) + 1e-12:
        raise NyquistError(f"grid spacing {h} exceeds 1/(4 max|frequency|)")
    axis = -spec.square.half + h / 2 + h * np.arange(spec.M)
    X, Y = np.meshgrid(spec.square.center[0] + axis, spec.square.center[1] + axis, indexing="ij")
    F = np.abs(exponential_sum_field(freqs, np.ones(len(pts)), np.stack([X.ravel(), Y.ravel()], axis=-1)))
    if math.isinf(p):
        return float(F.max())
    return float(np.mean(F ** p)) ** (1 / p)


def srtc_envelope_check(R_list, p: float = 6.0) -> list[dict]:
    """e(R) = log(S6 / N^3) / log N per R, with the circle bound and the frozen excess envelope."""
    if p != 6:
        raise PreconditionError("the excess table is defined through the sixth moment (p = 6)")
    rows = []
    for R in R_list:
        lc = enumerate_circle_points(R)
        if lc.N < 4:
            raise PreconditionError(f"R = {R} has N = {lc.N} < 4 points")
        S6 = count_s6_hash(lc)
        excess = math.log(S6 / lc.N ** 3) / math.log(lc.N)
        rows.append({
            "R": R, "N": lc.N, "S6": S6, "e": excess,
            "within_circle_bound": S6 <= circle_s6_bound(lc.N),
            "envelope_ok": check_envelope("sqrt_cancellation_excess", excess),
        })
    logger.info("🔢 square-root cancellation table: %d rows", len(rows))
    return rows
