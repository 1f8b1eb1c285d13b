# declab/main.py
# Command-line entry point: one click group, subcommands registered per area.

import json

import click
from pydantic import ValidationError

from declab import __version__
from declab.core.errors import DeclabError
from declab.core.logging_setup import configure_logging

# --- Commands ---
from declab.commands.bounds_commands import bounds, ladder
from declab.commands.envelope_commands import envelopes
from declab.commands.experiment_commands import ball_inflation, bilinear, experiment
from declab.commands.lattice_commands import circle_points, expsum, s6


class DeclabGroup(click.Group):
    """Maps library errors to the exit-code contract: 2 usage, 3 numerical, 4 resource guard."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except DeclabError as exc:
            click.echo(json.dumps(exc.to_dict()), err=True)
            ctx.exit(exc.exit_code)
        except ValidationError as exc:
            errors = [{"loc": list(e["loc"]), "msg": e["msg"]} for e in exc.errors()]
            click.echo(json.dumps({"error": "ValidationError", "message": str(exc), "errors": errors}), err=True)
            ctx.exit(2)
        except ValueError as exc:
            click.echo(json.dumps({"error": type(exc).__name__, "message": str(exc)}), err=True)
            ctx.exit(2)


@click.group(cls=DeclabGroup)
@click.version_option(__version__, prog_name="declab")
@click.option("--log-level", default=None, help="Logging level (default DECLAB_LOG_LEVEL or WARNING).")
def cli(log_level):
    """Numerical laboratory for l^2 L^p decoupling and lattice-circle correlations."""
    configure_logging(log_level.upper() if log_level else None)


cli.add_command(bounds)
cli.add_command(ladder)
cli.add_command(experiment)
cli.add_command(bilinear)
cli.add_command(ball_inflation)
cli.add_command(circle_points)
cli.add_command(s6)
cli.add_command(expsum)
cli.add_command(envelopes)


if __name__ == "__main__":
    cli()
