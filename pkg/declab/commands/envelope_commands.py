# declab/commands/envelope_commands.py
# List the active frozen envelopes or freeze a new measurement into a CSV.

import click

from declab.commands.common import config_option, finish, output_options
from declab.seed.seed_envelopes import freeze_envelope, load_envelopes


@click.command("envelopes")
@config_option
@click.option("--freeze", "name", default=None, help="Envelope name to freeze.")
@click.option("--value", type=float, default=None, help="Measured constant.")
@click.option("--rule", type=click.Choice(["upper", "lower", "stable"]), default="upper", show_default=True)
@click.option("--margin", type=float, default=0.05, show_default=True)
@click.option("--note", default="", help="Free-text provenance for the frozen row.")
@click.option("--table", type=click.Path(dir_okay=False), default=None,
              help="Envelope CSV to read or update (default: packaged table / DECLAB_ENVELOPES).")
@output_options
def envelopes(name, value, rule, margin, note, table, fmt, out, record, db):
    """Frozen regression envelopes."""
    if name is not None:
        if value is None or table is None:
            raise click.UsageError("--freeze needs --value and --table")
        freeze_envelope(name, value, table, margin=margin, rule=rule, note=note)
    current = load_envelopes(table, refresh=True)
    rows = [{"name": key, **entry} for key, entry in sorted(current.items())]
    config = {"freeze": name, "value": value, "rule": rule, "margin": margin, "table": table}
    finish("envelopes", rows, config, fmt, out, record, db)
