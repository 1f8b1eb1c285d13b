# declab/commands/bounds_commands.py
# Bound tables and circle ladders.

import math

import click

from declab.commands.common import INT_LIST, RATIONAL, config_option, finish, output_options
from declab.core.suite_config import BOUNDS_LOG2_INV_DELTA, BOUNDS_P_GRID, LADDER_C0
from declab.services.bounds import bounds_table, choose_circle_ladder, log_inv
from declab.services.circle_lattice import ladder_validity


@click.command("bounds")
@config_option
@click.option("--p", "p_values", type=float, multiple=True, default=BOUNDS_P_GRID, show_default=True)
@click.option("--delta", "deltas", type=RATIONAL, multiple=True,
              default=[f"2^-{k}" for k in BOUNDS_LOG2_INV_DELTA], show_default=True)
@click.option("--C", "C", type=float, default=1.0, show_default=True, help="Absolute-constant stand-in.")
@output_options
def bounds(p_values, deltas, C, fmt, out, record, db):
    """Exponent profile and log-bound table over a (p, delta) grid."""
    log2_inv = [log_inv(d) / math.log(2) for d in deltas]
    # exact powers of two print as 2^-k
    log2_inv = [round(k) if abs(k - round(k)) < 1e-12 else k for k in log2_inv]
    rows = bounds_table(list(p_values), log2_inv, C)
    config = {"p": list(p_values), "delta": [str(d) for d in deltas], "C": C}
    finish("bounds", rows, config, fmt, out, record, db, plot=("p", "exponent"))


@click.command("ladder")
@config_option
@click.option("--delta", "deltas", type=RATIONAL, multiple=True, help="Scales to build ladders for.")
@click.option("--R", "radii", type=INT_LIST, default=None, help="Lattice radii: ladder validity for delta = R^-1/2.")
@click.option("--C0", "C0", type=RATIONAL, default=str(LADDER_C0), show_default=True)
@output_options
def ladder(deltas, radii, C0, fmt, out, record, db):
    """Circle parameter ladders tau_0..tau_{N+1}."""
    if not deltas and not radii:
        raise click.UsageError("give --delta or --R")
    rows = []
    for delta in deltas:
        lad = choose_circle_ladder(delta, C0)
        rows.append({
            "delta": str(delta), "C0": str(lad.C0), "K": lad.K, "N": lad.N, "adjusted": lad.adjusted,
            "log_inv_delta": lad.log_inv_delta, "log_inv_tau": lad.log_inv_tau,
            "half_exponents": lad.half_exponents,
        })
    for R in radii or []:
        rows.append({"R": R, **ladder_validity(R, C0)})
    config = {"delta": [str(d) for d in deltas], "R": radii or [], "C0": str(C0)}
    finish("ladder", rows, config, fmt, out, record, db, plot=("N", "K"))
