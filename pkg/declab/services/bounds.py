# declab/services/bounds.py
# Explicit constant machinery in log domain: theorem bound, recursion, depth choice, bootstrap, circle ladder.

import logging
import math
from fractions import Fraction

import numpy as np

from declab.core.config import DEPTH_SCAN_MAX, NCHOICE_SCAN_MAX, TAU_GRID_MAX, TAU_GRID_POINTS
from declab.core.errors import PreconditionError
from declab.models._types import to_fraction
from declab.models.bound_model import BoundLedger, ExponentProfile, LadderParams

logger = logging.getLogger(__name__)

LOG_100 = math.log(100.0)


# =====================================
# Helpers
# =====================================
def log_inv(delta=None, log_inv_delta: float | None = None) -> float:
    """log(1/delta). Fractions are handled exactly so delta = 2^-1000 does not underflow."""
    if log_inv_delta is not None:
        return float(log_inv_delta)
    if delta is None:
        raise PreconditionError("need delta or log_inv_delta")
    if isinstance(delta, (Fraction, int, str)):
        d = to_fraction(delta)
        if not (0 < d < 1):
            raise PreconditionError(f"delta must lie in (0, 1), got {d}")
        return math.log(d.denominator) - math.log(d.numerator)
    if not (0 < delta < 1):
        raise PreconditionError(f"delta must lie in (0, 1), got {delta}")
    return -math.log(delta)


def _check_p(p: float, low: float = 4.0, high: float = 6.0, closed: bool = False) -> None:
    ok = low <= p <= high if closed else low < p < high
    if not ok:
        raise PreconditionError(f"p={p} outside {'[' if closed else '('}{low}, {high}{']' if closed else ')'}")


def _geometric(r: float, n: int) -> float:
    """sum_{j=0}^{n} r^j."""
    if abs(r - 1.0) < 1e-15:
        return float(n + 1)
    return (1.0 - r ** (n + 1)) / (1.0 - r)


# =====================================
# Exponents
# =====================================
def exponent_profile(p: float) -> ExponentProfile:
    _check_p(p, 2.0, 6.0, closed=True)
    half = math.log2((p - 2) / 2) if p > 2 else -math.inf
    return ExponentProfile(
        p=p,
        alpha=(p - 4) / (p - 2) if p > 2 else -math.inf,
        sigma_p=0.25 * (1 - half),
        theorem_exponent=0.75 + 0.25 * half,
        fixed_p_exponent=fixed_p_exponent(p) if 4 < p < 6 else None,
    )


def fixed_p_exponent(p: float) -> float:
    """1 - 1/(2 + log_{4/(p-2)} 4): the exponent obtained by optimising N for a fixed p."""
    _check_p(p)
    return 1 - 1 / (2 + math.log(4) / math.log(4 / (p - 2)))


def product_exponent_sum(N: int, p: float, closed_form: bool = True) -> float:
    """sum_{j=0}^{N} ((p-4)/(p-2)) (2/(p-2))^(N-j) = 1 - (2/(p-2))^(N+1)."""
    r = 2 / (p - 2)
    if closed_form:
        return 1 - r ** (N + 1)
    alpha = (p - 4) / (p - 2)
    return math.fsum(alpha * r ** (N - j) for j in range(N + 1))


def delta_exponent(N: int, p: float) -> float:
    """(1/2^(N+1)) (1 + (2/p) sum_{j=0}^{N} (2/(p-2))^j), the delta exponent of the recursion."""
    return (1 + (2 / p) * _geometric(2 / (p - 2), N)) / 2 ** (N + 1)


# =====================================
# Theorem bound
# =====================================
def theorem_bound_log(delta=None, p: float = 5.0, C: float = 1.0, log_inv_delta: float | None = None) -> float:
    """C (log 1/delta)^(3/4 + log2((p-2)/2)/4) log log 1/delta."""
    _check_p(p)
    L = log_inv(delta, log_inv_delta)
    if L <= 1:
        raise PreconditionError("need delta < 1/e so that log log 1/delta > 0")
    return C * L ** exponent_profile(p).theorem_exponent * math.log(L)


def trivial_bound_log(delta=None, p: float = 5.0, exponent: float = 100.0,
                      log_inv_delta: float | None = None) -> float:
    """log(2^(e/p) delta^(-1/2))."""
    return exponent / p * math.log(2) + log_inv(delta, log_inv_delta) / 2


# =====================================
# Recursion
# =====================================
def recursion_scales(N: int) -> list[Fraction]:
    """Exponents s_j = 1 - 1/2^(j+1), j = 0..N: the recursion reads D_p(delta^s_j)."""
    return [1 - Fraction(1, 2 ** (j + 1)) for j in range(N + 1)]


def fill_ledger(p: float, log_inv_delta: float, N: int, C: float = 1.0) -> BoundLedger:
    """Ledger holding theorem_bound_log at every scale the recursion needs."""
    entries = {s: theorem_bound_log(p=p, C=C, log_inv_delta=float(s) * log_inv_delta) for s in recursion_scales(N)}
    return BoundLedger(p=p, log_inv_delta=log_inv_delta, C=C).with_entries(entries)


def recursion_rhs_log(N: int, table: BoundLedger) -> float:
    """
    log of C^(N^2) (D(delta^(1 - 1/2^(N+1))) + delta^(-x_N) prod_j D(delta^(s_j))^(alpha r^(N-j)))
    with r = 2/(p-2), x_N = delta_exponent(N, p). The two terms are combined with logaddexp.
    """
    if N < 0:
        raise PreconditionError("N must be >= 0")
    p, L = table.p, table.log_inv_delta
    if L / 2 ** (N + 1) <= LOG_100:
        raise PreconditionError(f"need delta^(1/2^(N+1)) < 1/100 for N={N}")
    scales = recursion_scales(N)
    table.require(scales)

    alpha, r = (p - 4) / (p - 2), 2 / (p - 2)
    first = table.get(scales[-1])
    second = L * delta_exponent(N, p) + math.fsum(
        alpha * r ** (N - j) * table.get(s) for j, s in enumerate(scales)
    )
    return N * N * math.log(table.C) + float(np.logaddexp(first, second))


# =====================================
# Iteration depth & bootstrap
# =====================================
def choose_iteration_depth(delta=None, log2_inv_delta: float | None = None) -> int:
    """The N with 2^-N <= (log2 1/delta)^(-1/4) <= 2^(-N+1); ties go to the smaller N."""
    if log2_inv_delta is None:
        log2_inv_delta = log_inv(delta) / math.log(2)
    if log2_inv_delta <= 1:
        raise PreconditionError("delta too large: need log2(1/delta) > 1")
    t = math.log2(log2_inv_delta) / 4
    if abs(t - round(t)) < 1e-12:
        t = float(round(t))
    N = math.ceil(t)
    if N < 1:
        raise PreconditionError(f"delta too large for an iteration depth N >= 1 (got N={N})")
    return N


def bootstrap_exponent(N: int, p: float) -> tuple[float, float]:
    """(8^N, lambda_N = N/(4/(p-2))^(N+1)): P(C^(8^N), lambda_N) holds."""
    if N < 1:
        raise PreconditionError("bootstrap needs N >= 1")
    _check_p(p, 4.0, 6.0, closed=True)
    return float(8 ** N), N / (4 / (p - 2)) ** (N + 1)


def depth_bound_log(N: int, p: float, log_C: float, log_inv_delta: float) -> float:
    """log of (C^(8^N) delta^(-N/2^(N+1)))^(1/(2/(p-2))^(N+1))."""
    return ((p - 2) / 2) ** (N + 1) * (8 ** N * log_C + N * log_inv_delta / 2 ** (N + 1))


def best_bound_over_depth(delta=None, p: float = 5.0, C: float = 1.0,
                          log_inv_delta: float | None = None) -> dict:
    """Exhaustive scan over N in [1, DEPTH_SCAN_MAX]; also reports the bound at the chosen depth."""
    _check_p(p)
    L = log_inv(delta, log_inv_delta)
    if L <= 1:
        raise PreconditionError("need delta < 1/e")
    log_C = math.log(C)
    values = [depth_bound_log(N, p, log_C, L) for N in range(1, DEPTH_SCAN_MAX + 1)]
    best = int(np.argmin(values))
    try:
        chosen = choose_iteration_depth(log2_inv_delta=L / math.log(2))
    except PreconditionError:
        chosen = None
    at_chosen = depth_bound_log(chosen, p, log_C, L) if chosen else None
    return {"N_star": best + 1, "log_bound": values[best], "N_chosen": chosen, "log_bound_chosen": at_chosen}


def bootstrap_step(N: int, p: float, log_C: float, log_C_Np: float, cases: int = 4) -> dict:
    """
    One pass of P(C_Np, lambda_N) => P(C^(2^N + N^2/r^(N+1)) C_Np^(1 - N/(8/(p-2))^(N+1)), lambda_N),
    r = 2/(p-2), with the two case bounds at delta_n = 100^(-2^(N+1) n).
    """
    _, lam = bootstrap_exponent(N, p)
    r = 2 / (p - 2)
    mu = N / (8 / (p - 2)) ** (N + 1)
    improved = (2 ** N + N * N / r ** (N + 1)) * log_C + (1 - mu) * log_C_Np

    rows = []
    for n in range(1, cases + 1):
        L = 2 ** (N + 1) * n * LOG_100
        case1 = max(25 * math.log(2), math.log(2) + N * N * log_C) + (1 - mu) * log_C_Np + lam * L
        case2 = ((p - 2) / 2) ** (N + 1) * (math.log(2) + N * N * log_C + N * L / 2 ** (N + 1))
        rows.append({"n": n, "log_inv_delta": L, "case1": case1, "case2": case2,
                     "dominant": "case1" if case1 >= case2 else "case2"})
    return {"log_constant": improved, "lambda": lam, "cases": rows}


def bootstrap_fixed_point_log(N: int, p: float, log_C: float) -> float:
    """Limit of iterating bootstrap_step: ((8/(p-2))^(N+1) 2^N / N + 4^(N+1) N) log C."""
    bootstrap_exponent(N, p)
    return ((8 / (p - 2)) ** (N + 1) * 2 ** N / N + 4 ** (N + 1) * N) * log_C


def solve_nchoice(p: float, eps: float) -> int:
    """
    Smallest N >= 1 with
      (4/(p-2))^(N+1) (p/4 + ((p-4)/4) sum_{j=1}^{N} ((p-2)/4)^j) >= (1/eps)(1 + (2/p) sum_{j=0}^{N} (2/(p-2))^j),
    scanned in log domain.
    """
    _check_p(p, closed=True)
    if eps <= 0:
        raise PreconditionError("eps must be positive")
    N = np.arange(1, NCHOICE_SCAN_MAX + 1, dtype=float)

    q = (p - 2) / 4
    inner = N if abs(q - 1) < 1e-15 else q * (1 - q ** N) / (1 - q)
    lhs = (N + 1) * math.log(4 / (p - 2)) + np.log(p / 4 + (p - 4) / 4 * inner)
    r = 2 / (p - 2)
    geo = N + 1 if abs(r - 1) < 1e-15 else (1 - r ** (N + 1)) / (1 - r)
    rhs = -math.log(eps) + np.log1p((2 / p) * geo)

    hits = np.flatnonzero(lhs >= rhs - 1e-12)
    if hits.size == 0:
        raise PreconditionError(f"no N <= {NCHOICE_SCAN_MAX} satisfies the depth condition for p={p}, eps={eps}")
    return int(N[hits[0]])


# =====================================
# Circle ladder
# =====================================
def _at_most_power(delta: Fraction, K: int, m: int) -> bool:
    """delta <= K^-m, exactly."""
    return delta.numerator * K ** m <= delta.denominator


def _at_least_power(delta: Fraction, K: int, m: int) -> bool:
    """delta >= K^-m, exactly."""
    return delta.numerator * K ** m >= delta.denominator


def _exact_delta(delta) -> Fraction | None:
    if isinstance(delta, (Fraction, int, str)):
        return to_fraction(delta)
    return None


def choose_circle_ladder(delta=None, C0=Fraction(1, 128), log_inv_delta: float | None = None) -> LadderParams:
    """
    N with C0^(3 3^N) <= delta <= C0^(2 3^N), tau_0 = C0^(2 2^N), tau_j = tau_0^((3/2)^j).

    When delta falls between two sandwiches, N is the largest with 2 3^N <= log_C0(delta) and
    C0 is replaced by 1/K' with K' = ceil(delta^(-1/(3 3^N))) >= K; the ladder is marked adjusted.
    A rational delta is placed with exact integer comparisons.
    """
    C0 = to_fraction(C0)
    if C0.numerator != 1 or C0.denominator < 101:
        raise PreconditionError(f"C0 must be 1/K with K >= 101, got {C0}")
    L = log_inv(delta, log_inv_delta)
    exact = _exact_delta(delta) if log_inv_delta is None else None
    K = C0.denominator
    log_K = math.log(K)
    u = L / log_K
    if u < 2 * (1 - 1e-12) or (exact is not None and not _at_most_power(exact, K, 2)):
        raise PreconditionError(f"delta > C0^2: no valid N (log_C0 delta = {u:.6g})")

    N = 0
    while 2 * 3 ** (N + 1) <= u * (1 + 1e-12):
        N += 1
    if exact is not None:
        while N > 0 and not _at_most_power(exact, K, 2 * 3 ** N):
            N -= 1
        while _at_most_power(exact, K, 2 * 3 ** (N + 1)):
            N += 1
        adjusted = not _at_least_power(exact, K, 3 ** (N + 1))
    else:
        adjusted = u > 3 * 3 ** N * (1 + 1e-12)
    if adjusted:
        K = math.ceil(math.exp(L / (3 * 3 ** N)) * (1 - 1e-15))
        if exact is not None:
            m = 3 ** (N + 1)
            while not _at_least_power(exact, K, m):
                K += 1
            while K > C0.denominator and _at_least_power(exact, K - 1, m):
                K -= 1
        log_K = math.log(K)
        logger.debug("🪜 delta falls in a ladder gap; C0 adjusted to 1/%d", K)

    half_exponents = [2 ** (N - j) * 3 ** j for j in range(N + 1)]
    log_inv_tau = [2 ** (N + 1 - j) * 3 ** j * log_K for j in range(N + 1)] + [3 ** (N + 1) * log_K]
    ladder = LadderParams(C0=Fraction(1, K), N=N, log_inv_tau=log_inv_tau, log_inv_delta=L, delta=exact,
                          half_exponents=half_exponents, adjusted=adjusted)
    verify_ladder(ladder)
    return ladder


def verify_ladder(ladder: LadderParams) -> None:
    """
    tau_{N+1} <= delta <= tau_N and tau_j^(1/2) = C0^(2^(N-j) 3^j), with exact rationals.
    The sandwich is compared on integers when the ladder carries an exact delta, in log space otherwise.
    """
    N = ladder.N
    for j, e in enumerate(ladder.half_exponents):
        if Fraction(3, 2) ** j * 2 ** N != e:
            raise PreconditionError(f"ladder exponent mismatch at j={j}")
    if ladder.delta is not None and ladder.strict:
        d, K = ladder.delta, ladder.K
        if not (_at_most_power(d, K, 2 * 3 ** N) and _at_least_power(d, K, 3 ** (N + 1))):
            raise PreconditionError(f"delta = {d} outside [tau_(N+1), tau_N] for N={N}, K={K}")
    elif ladder.log_inv_delta is not None:
        lo, hi = ladder.log_inv_tau[N], ladder.log_inv_tau[N + 1]
        L = ladder.log_inv_delta
        if not (lo * (1 - 1e-12) <= L <= hi * (1 + 1e-12)):
            raise PreconditionError(f"delta outside [tau_(N+1), tau_N] for N={N}")


def coarse_ladder(tau0, N: int) -> LadderParams:
    """Ladder with an explicit tau0 (not a power of C0), for lattice experiments."""
    tau0 = to_fraction(tau0)
    if not (0 < tau0 < 1):
        raise PreconditionError("tau0 must lie in (0, 1)")
    base = math.log(tau0.denominator) - math.log(tau0.numerator)
    return LadderParams(C0=tau0, N=N, log_inv_tau=[1.5 ** j * base for j in range(N + 2)], strict=False)


def circle_bound_log(delta=None, p: float = 5.0, C: float = 1.0, C0=Fraction(1, 128),
                     log_inv_delta: float | None = None) -> dict:
    """
    log of tau_0^(-1/2) prod_{j=0}^{N} D_p(tau_j^(1/2)), together with the tau_0 term and its
    (log K)^(1 - log_3 2) L^(log_3 2) cap.
    """
    ladder = choose_circle_ladder(delta, C0, log_inv_delta)
    tau0_term = ladder.log_inv_tau[0] / 2
    rungs = [theorem_bound_log(p=p, C=C, log_inv_delta=t / 2) for t in ladder.log_inv_tau[:ladder.N + 1]]
    L = ladder.log_inv_delta
    gamma = math.log(2) / math.log(3)
    cap = math.log(ladder.K) ** (1 - gamma) * L ** gamma
    return {"log_bound": tau0_term + math.fsum(rungs), "tau0_term": tau0_term, "tau0_cap": cap,
            "N": ladder.N, "K": ladder.K, "adjusted": ladder.adjusted}


def l6_interpolated_bound_log(log_inv_delta: float, log_A: float, c: float = 1.0, Cc: float = 1.0) -> dict:
    """
    min over tau in (0, 1/4] of c L^(1 - tau) + Cc tau log|A|: the exponent of
    min_tau exp(c (log 1/delta)^(1-tau)) |A|^(Cc tau) in excess of |A|^(1/2).
    """
    if log_A < math.log(2):
        raise PreconditionError("need |A| >= 2")
    if log_inv_delta <= 1:
        raise PreconditionError("need delta < 1/e")
    tau = TAU_GRID_MAX * np.arange(1, TAU_GRID_POINTS + 1) / TAU_GRID_POINTS
    values = c * log_inv_delta ** (1 - tau) + Cc * tau * log_A
    k = int(np.argmin(values))
    return {"excess": float(values[k]), "tau": float(tau[k])}


# =====================================
# Tables
# =====================================
def bounds_table(p_values, log2_inv_deltas, C: float = 1.0) -> list[dict]:
    """Rows (p, delta, exponent, sigma_p, alpha, log_bound, N_star) over the grid."""
    if not p_values or not log2_inv_deltas:
        raise PreconditionError("bounds table needs nonempty p and delta grids")
    rows = []
    for p in p_values:
        profile = exponent_profile(p)
        for k in log2_inv_deltas:
            L = k * math.log(2)
            rows.append({
                "p": p,
                "delta": f"2^-{k:g}",
                "exponent": profile.theorem_exponent,
                "sigma_p": profile.sigma_p,
                "alpha": profile.alpha,
                "log_bound": theorem_bound_log(p=p, C=C, log_inv_delta=L),
                "N_star": best_bound_over_depth(p=p, C=C, log_inv_delta=L)["N_star"],
            })
    logger.info("📊 bounds table: %d rows", len(rows))
    return rows


def bound_constants(p_values, log2_inv_deltas, C: float = 2.0, C0=Fraction(1, 128), kappa: float = 1.0) -> dict:
    """
    Smallest constants that make the three frozen comparisons hold over the grid:
      depth:  log bound at the chosen N - min over N  <= C' L^theta log L
      circle: circle_bound_log                       <= C'' L^theta (log L)^kappa
      tau0:   (1/2) log(1/tau_0)                     <= C''' L^(log_3 2)
    with L = log(1/delta) and theta = theorem_exponent(p).
    """
    if not p_values or not log2_inv_deltas:
        raise PreconditionError("bound constants need nonempty p and delta grids")
    gamma = math.log(2) / math.log(3)
    rows = []
    for p in p_values:
        theta = exponent_profile(p).theorem_exponent
        for k in log2_inv_deltas:
            L = k * math.log(2)
            depth = best_bound_over_depth(p=p, C=C, log_inv_delta=L)
            circle = circle_bound_log(p=p, C=C, C0=C0, log_inv_delta=L)
            if depth["log_bound_chosen"] is None:
                raise PreconditionError(f"no iteration depth for delta = 2^-{k:g}")
            rows.append({
                "p": p,
                "delta": f"2^-{k:g}",
                "depth": (depth["log_bound_chosen"] - depth["log_bound"]) / (L ** theta * math.log(L)),
                "circle": circle["log_bound"] / (L ** theta * math.log(L) ** kappa),
                "tau0": circle["tau0_term"] / L ** gamma,
                "N_chosen": depth["N_chosen"],
                "N_star": depth["N_star"],
                "ladder_N": circle["N"],
                "K": circle["K"],
            })
    out = {name: max(row[name] for row in rows) for name in ("depth", "circle", "tau0")}
    logger.info("🧮 bound constants: C'=%.6g C''=%.6g C'''=%.6g", out["depth"], out["circle"], out["tau0"])
    return {"depth_constant": out["depth"], "circle_constant": out["circle"], "tau0_constant": out["tau0"],
            "kappa": kappa, "rows": rows}
