# declab/commands/lattice_commands.py
# Lattice points on circles, S6 counts and exponential-sum norms.

import math

import click

from declab.commands.common import INT_LIST, config_option, finish, output_options
from declab.core.parallel import map_jobs
from declab.core.suite_config import R_SUITE
from declab.models.geometry_model import SquareRegion
from declab.models.lattice_model import ExpSumSpec
from declab.services.circle_lattice import enumerate_circle_points
from declab.services.correlations_expsum import (circle_s6_bound, correlation_result, cross_check,
                                                 expsum_lp_norm)

DEFAULT_R = ",".join(str(R) for R in R_SUITE)


@click.command("circle-points")
@config_option
@click.option("--R", "radii", type=INT_LIST, default=DEFAULT_R, show_default=True)
@output_options
def circle_points(radii, fmt, out, record, db):
    """All (x, y) with x^2 + y^2 = R, one row per point."""
    rows = []
    for lc in map_jobs(enumerate_circle_points, radii):
        rows.extend({"R": lc.R, "N": lc.N, "x": x, "y": y} for x, y in lc.points)
    finish("circle-points", rows, {"R": radii}, fmt, out, record, db, plot=("x", "y"))


@click.command("s6")
@config_option
@click.option("--R", "radii", type=INT_LIST, default=DEFAULT_R, show_default=True)
@click.option("--method", type=click.Choice(["hash", "dft", "brute"]), default="hash", show_default=True)
@click.option("--M", "M", type=int, default=None, help="DFT grid size (default 12 ceil(sqrt R) + 1).")
@click.option("--check/--no-check", default=True, show_default=True, help="Cross-check hash against dft.")
@output_options
def s6(radii, method, M, check, fmt, out, record, db):
    """Sixth additive moment S6 per circle; exits 3 when hash and dft disagree."""

    def job(R):
        lc = enumerate_circle_points(R)
        result = correlation_result(lc, method, M)
        if check:
            cross_check(lc, M)
        excess = math.log(result.S6 / lc.N ** 3) / math.log(lc.N) if lc.N >= 2 else None
        return {
            "R": R, "N": lc.N, "S6": result.S6, "S4": result.S4, "ratio_S6_N3": result.ratio_S6_N3,
            "e": excess, "circle_bound": circle_s6_bound(lc.N), "method": result.method, "M": result.M,
            "cross_check": "ok" if check else "skipped",
        }

    rows = map_jobs(job, radii)
    config = {"R": radii, "method": method, "M": M, "check": check}
    finish("s6", rows, config, fmt, out, record, db, plot=("R", "S6"))


@click.command("expsum")
@config_option
@click.option("--R", "radii", type=INT_LIST, default=DEFAULT_R, show_default=True)
@click.option("--p", type=float, default=6.0, show_default=True)
@click.option("--M", "M", type=int, default=None, help="Grid points per side.")
@click.option("--mode", type=click.Choice(["period", "normalized"]), default="period", show_default=True)
@click.option("--side", type=float, default=1.0, show_default=True, help="Square side in normalized mode.")
@output_options
def expsum(radii, p, M, mode, side, fmt, out, record, db):
    """Normalized L^p norms of sum_a e(a . z) over the lattice points of each circle."""
    rows = []
    for R in radii:
        lc = enumerate_circle_points(R)
        if M is not None:
            size = M
        elif mode == "period":
            size = 2 * math.ceil(p) * lc.max_coordinate + 1
        else:
            size = math.ceil(4 * side)
        square = SquareRegion(side=side) if mode == "normalized" else SquareRegion(center=(0.5, 0.5), side=1.0)
        norm = expsum_lp_norm(ExpSumSpec(points=lc, p=p, M=size, mode=mode, square=square))
        rows.append({"R": R, "N": lc.N, "p": p, "M": size, "mode": mode, "norm": norm, "sqrt_N": math.sqrt(lc.N)})
    config = {"R": radii, "p": p, "M": M, "mode": mode, "side": side}
    finish("expsum", rows, config, fmt, out, record, db, plot=("R", "norm"))
