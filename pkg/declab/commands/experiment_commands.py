# declab/commands/experiment_commands.py
# Decoupling, bilinear and ball-inflation experiments over seeded density families.

import logging

import click

from declab.commands.common import INTERVAL, RATIONAL, config_option, finish, output_options
from declab.core.config import MAX_SPACING
from declab.core.parallel import map_jobs
from declab.core.suite_config import DEFAULT_SEED, FAMILY_DRAWS
from declab.models.experiment_model import BilinearSpec, ExperimentSpec
from declab.models.geometry_model import SquareRegion, WeightKind
from declab.services.decoupling_lab import (ball_inflation_ratio, bilinear_ratio, build_family,
                                            family_reports)

logger = logging.getLogger(__name__)


def _report_row(report, **context) -> dict:
    return {**context, "label": report.label, "lhs": report.lhs, "rhs": report.rhs, "ratio": report.ratio,
            "estimate": report.estimate, "envelopes": report.envelopes, "envelope_ok": report.envelope_ok}


# =====================================
# experiment
# =====================================
@click.command("experiment")
@config_option
@click.option("--delta", type=RATIONAL, default="1/16", show_default=True)
@click.option("--p", type=float, default=5.0, show_default=True)
@click.option("--family", default=f"random:{FAMILY_DRAWS}", show_default=True,
              help="zero | constant | random[:K] | atoms")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--grid-spacing", type=float, default=MAX_SPACING, show_default=True)
@click.option("--weight", type=click.Choice(["radial_w", "product_w_tilde", "bump_eta"]), default="radial_w")
@click.option("--comparison", is_flag=True, help="Allow p in [2, 6] outside (4, 6).")
@output_options
def experiment(delta, p, family, seed, grid_spacing, weight, comparison, fmt, out, record, db):
    """Decoupling ratios ||E g||_{L^p(B)} / (sum_J ||E_J g||^2_{L^p(w_B)})^(1/2), one row per member."""
    members = build_family(family, count=FAMILY_DRAWS, seed=seed, delta=delta)
    spec = ExperimentSpec(delta=delta, p=p, family=tuple(members), spacing=grid_spacing,
                          weight=WeightKind(variant=weight), comparison=comparison)
    reports = family_reports(spec)
    rows = [_report_row(r, delta=str(delta), p=p, family=family) | {"trivial_cap": r.diagnostics["trivial_cap"]}
            for r in reports]
    flagged = sum(1 for r in reports if r.envelope_ok is False)
    if flagged:
        logger.warning("⚠️ %d of %d ratios exceed the trivial bound", flagged, len(reports))
    config = {"delta": str(delta), "p": p, "family": family, "grid_spacing": grid_spacing, "weight": weight,
              "comparison": comparison}
    finish("experiment", rows, config, fmt, out, record, db, seed=seed, plot=("label", "ratio"))


# =====================================
# bilinear
# =====================================
@click.command("bilinear")
@config_option
@click.option("--delta", type=RATIONAL, default="1/16", show_default=True)
@click.option("--nu", type=RATIONAL, default="1/4", show_default=True)
@click.option("--b", type=int, default=1, show_default=True)
@click.option("--I", "I", type=INTERVAL, default="0:1/4", show_default=True)
@click.option("--I2", "I2", type=INTERVAL, default="1/2:3/4", show_default=True)
@click.option("--p", type=float, default=5.0, show_default=True)
@click.option("--family", default="constant", show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--grid-spacing", type=float, default=MAX_SPACING, show_default=True)
@click.option("--strict", is_flag=True, help="Enforce nu < 1/100.")
@output_options
def bilinear(delta, nu, b, I, I2, p, family, seed, grid_spacing, strict, fmt, out, record, db):
    """Empirical bilinear constants (ratio^(1/p)) for nu-separated I, I2."""
    spec = BilinearSpec(delta=delta, nu=nu, b=b, I=I, I2=I2, p=p, spacing=grid_spacing, strict=strict)
    members = build_family(family, count=FAMILY_DRAWS, seed=seed, delta=delta)
    reports = map_jobs(lambda g: bilinear_ratio(spec, g), members)
    context = {"delta": str(delta), "nu": str(nu), "b": b, "p": p}
    rows = [_report_row(r, **context) | {"log_cap": r.diagnostics["log_cap"]} for r in reports]
    config = {**context, "I": I.label(), "I2": I2.label(), "family": family, "grid_spacing": grid_spacing,
              "strict": strict}
    finish("bilinear", rows, config, fmt, out, record, db, seed=seed, plot=("label", "estimate"))


# =====================================
# ball-inflation
# =====================================
@click.command("ball-inflation")
@config_option
@click.option("--nu", type=RATIONAL, default="1/4", show_default=True)
@click.option("--b", type=int, default=1, show_default=True)
@click.option("--p", type=float, default=5.0, show_default=True)
@click.option("--I1", "I1", type=INTERVAL, default="0:1/4", show_default=True)
@click.option("--I2", "I2", type=INTERVAL, default="1/2:3/4", show_default=True)
@click.option("--center", type=(float, float), default=(0.0, 0.0), show_default=True, help="Centre of Delta'.")
@click.option("--family", default="constant", show_default=True)
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True)
@click.option("--grid-spacing", type=float, default=MAX_SPACING, show_default=True)
@output_options
def ball_inflation(nu, b, p, I1, I2, center, family, seed, grid_spacing, fmt, out, record, db):
    """Ball-inflation residual constants on Delta' of side nu^-2b."""
    Dp = SquareRegion(center=center, side=float(nu ** (-2 * b)))
    # random phases vary inside each child of scale nu^b
    members = build_family(family, count=FAMILY_DRAWS, seed=seed, delta=nu ** (b + 1))
    reports = map_jobs(lambda g: ball_inflation_ratio(b, nu, p, I1, I2, Dp, g, spacing=grid_spacing), members)
    context = {"nu": str(nu), "b": b, "p": p}
    rows = [_report_row(r, **context) for r in reports]
    config = {**context, "I1": I1.label(), "I2": I2.label(), "center": list(center), "family": family,
              "grid_spacing": grid_spacing}
    finish("ball-inflation", rows, config, fmt, out, record, db, seed=seed, plot=("label", "ratio"))
