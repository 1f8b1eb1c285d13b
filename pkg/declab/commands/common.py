# declab/commands/common.py
# Shared click parameter types, options and the output path used by every subcommand.

import json
from fractions import Fraction
from pathlib import Path

import click

from declab.core.config import VERSION
from declab.models.geometry_model import Interval
from declab.models.run_model import RunConfig
from declab.services.report_service import FORMATS, emit, provenance, write_atomic
from declab.services.report_store import append_run


# =====================================
# Parameter types
# =====================================
class RationalType(click.ParamType):
    """1/16, 0.0625, 1e-3 or 2^-8, kept exact."""

    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        text = str(value).strip()
        try:
            if "^" in text:
                base, power = text.split("^", 1)
                return Fraction(base) ** int(power)
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational number", param, ctx)


class IntervalType(click.ParamType):
    """lo:hi with rational endpoints, e.g. 0:1/4."""

    name = "interval"

    def convert(self, value, param, ctx):
        if isinstance(value, Interval):
            return value
        lo, sep, hi = str(value).partition(":")
        if not sep:
            self.fail(f"{value!r} is not of the form lo:hi", param, ctx)
        return Interval(lo=RATIONAL.convert(lo, param, ctx), hi=RATIONAL.convert(hi, param, ctx))


class IntListType(click.ParamType):
    """25 | 1,5,25 | 1..100 (inclusive)."""

    name = "int-list"

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return [int(v) for v in value]
        out = []
        try:
            for part in str(value).split(","):
                part = part.strip()
                if ".." in part:
                    lo, hi = part.split("..", 1)
                    out.extend(range(int(lo), int(hi) + 1))
                elif part:
                    out.append(int(part))
        except ValueError:
            self.fail(f"{value!r} is not an integer list", param, ctx)
        return out


RATIONAL = RationalType()
INTERVAL = IntervalType()
INT_LIST = IntListType()


# =====================================
# Shared options
# =====================================
def _load_config(ctx, param, value):
    # JSON keys become defaults, so explicit flags still win
    if value:
        data = json.loads(Path(value).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise click.BadParameter("config file must hold a JSON object", ctx=ctx, param=param)
        ctx.default_map = {**(ctx.default_map or {}), **{k.replace("-", "_"): v for k, v in data.items()}}
    return value


def config_option(f):
    return click.option("--config", type=click.Path(exists=True, dir_okay=False), is_eager=True,
                        expose_value=False, callback=_load_config,
                        help="JSON file with option defaults (flags override it).")(f)


def output_options(f):
    f = click.option("--db", default=None, help="SQLAlchemy URL for --record (else DECLAB_DB).")(f)
    f = click.option("--record", is_flag=True, help="Append the run to the report database.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout).")(f)
    f = click.option("--format", "fmt", type=click.Choice(FORMATS), default="json", show_default=True)(f)
    return f


# =====================================
# Output
# =====================================
def finish(command: str, rows: list, config: dict, fmt: str, out: str | None, record: bool, db: str | None,
           seed: int | None = None, plot: tuple[str, str] | None = None) -> None:
    run = RunConfig(subcommand=command, parameters=config, output_format=fmt, output_path=out, seed=seed)
    prov = provenance({"command": run.subcommand, **run.parameters}, run.seed)
    text = emit(rows, run.output_format, prov, plot)
    if run.output_path:
        write_atomic(text, run.output_path)
    else:
        click.echo(text, nl=False)
    if record:
        append_run(command, prov["config_hash"], VERSION, text, len(rows), url=db)
