# declab/seed/seed_envelopes.py
# Loads the frozen envelope table from CSV, falling back to core/envelope_config.

import logging
import math
import os
from pathlib import Path

import pandas as pd

from declab.core.config import ENVELOPE_STABILITY, ENVELOPES_PATH
from declab.core.envelope_config import ENVELOPES

logger = logging.getLogger(__name__)

DEFAULT_CSV = Path(__file__).resolve().parent.parent / "data" / "envelopes.csv"
REQUIRED_COLUMNS = ["name", "value", "rule", "note"]
RULES = ("upper", "lower", "stable")

_cache: dict[str, dict] | None = None


def load_envelopes(path: str | os.PathLike | None = None, refresh: bool = False) -> dict[str, dict]:
    """
    Read envelopes as {name: {"value", "rule", "note"}}.
    CSV columns: name, value, rule, note. Unknown rules and unreadable rows are skipped.
    A "stable" row with an empty value is pending: it is stored with value None until first measured.
    """
    global _cache
    if path is None and _cache is not None and not refresh:
        return _cache

    csv_path = Path(path or ENVELOPES_PATH or DEFAULT_CSV)
    if not csv_path.exists():
        logger.warning("⚠️ %s not found, using programmatic envelopes", csv_path)
        table = load_envelopes_programmatic()
    else:
        try:
            df = pd.read_csv(csv_path, dtype={"name": str, "rule": str, "note": str})
            if not all(col in df.columns for col in REQUIRED_COLUMNS):
                logger.warning("❌ Envelope CSV columns %s not recognized (expected %s)",
                               list(df.columns), REQUIRED_COLUMNS)
                table = load_envelopes_programmatic()
            else:
                table = _rows_to_table(df)
                logger.info("📊 Loaded %d envelopes from %s", len(table), csv_path)
        except pd.errors.EmptyDataError:
            logger.warning("❌ Envelope CSV is empty, using programmatic envelopes")
            table = load_envelopes_programmatic()

    if path is None:
        _cache = table
    return table


def _rows_to_table(df: pd.DataFrame) -> dict[str, dict]:
    table = {}
    for index, row in df.iterrows():
        try:
            value = float(row["value"])
        except (TypeError, ValueError):
            logger.warning("⚠️ Skipping envelope row %d: value %r", index + 1, row["value"])
            continue
        rule = str(row["rule"]).strip()
        pending = rule == "stable" and math.isnan(value)
        if rule not in RULES or not (pending or math.isfinite(value)):
            logger.warning("⚠️ Skipping envelope row %d: rule %r", index + 1, rule)
            continue
        note = "" if pd.isna(row["note"]) else str(row["note"])
        table[str(row["name"]).strip()] = {"value": None if pending else value, "rule": rule, "note": note}
    return table


def load_envelopes_programmatic() -> dict[str, dict]:
    return {name: dict(entry) for name, entry in ENVELOPES.items()}


def check_envelope(name: str, measured: float, table: dict | None = None) -> bool | None:
    """
    True/False when `name` is frozen, None when no envelope has been frozen under that name
    (or the row is a pending "stable" row).
    """
    table = table if table is not None else load_envelopes()
    entry = table.get(name)
    if entry is None or entry["value"] is None:
        return None
    if entry["rule"] == "upper":
        return measured <= entry["value"]
    if entry["rule"] == "lower":
        return measured >= entry["value"]
    return _stable(measured, entry["value"])


def _stable(measured: float, frozen: float) -> bool:
    if frozen == 0:
        return measured == 0
    return abs(measured / frozen - 1) <= ENVELOPE_STABILITY


def freeze_envelope(name: str, measured: float, path: str | os.PathLike, margin: float = 0.05,
                    rule: str = "upper", note: str = "") -> dict:
    """
    Write `measured` (widened by `margin`) into the CSV at `path`, replacing any row with that name.
    "stable" rows store `measured` as is. Returns the stored entry.
    """
    if rule not in RULES:
        raise ValueError(f"unknown envelope rule {rule!r}")
    if rule == "stable":
        value = float(measured)
    else:
        factor = 1 + margin if rule == "upper" else 1 - margin
        value = measured * factor if measured >= 0 else measured / factor
    path = Path(path)

    if path.exists():
        df = pd.read_csv(path, dtype={"name": str, "rule": str, "note": str})
        df = df[df["name"] != name]
    else:
        df = pd.DataFrame(columns=REQUIRED_COLUMNS)
    entry = {"name": name, "value": value, "rule": rule, "note": note}
    df = pd.concat([df, pd.DataFrame([entry])], ignore_index=True).sort_values("name")
    df.to_csv(path, index=False, columns=REQUIRED_COLUMNS)
    logger.info("🧊 Froze envelope %s = %.10g (%s)", name, value, rule)

    global _cache
    _cache = None
    return {"value": value, "rule": rule, "note": note}


def regression_check(name: str, measured: float, path: str | os.PathLike | None = None) -> bool:
    """
    Compare `measured` against the "stable" row `name` (within ENVELOPE_STABILITY, relative).
    A missing or pending row is frozen at `measured` on first use and the check passes.
    """
    table = load_envelopes(path, refresh=path is not None)
    entry = table.get(name)
    if entry is not None and entry["value"] is not None:
        if entry["rule"] != "stable":
            return bool(check_envelope(name, measured, table))
        ok = _stable(measured, entry["value"])
        if not ok:
            logger.warning("❌ %s drifted: measured %.10g, frozen %.10g", name, measured, entry["value"])
        return ok
    note = entry["note"] if entry is not None else ""
    target = Path(path or ENVELOPES_PATH or DEFAULT_CSV)
    if not target.exists():
        pd.DataFrame([{"name": k, **v} for k, v in load_envelopes_programmatic().items()],
                     columns=REQUIRED_COLUMNS).to_csv(target, index=False)
    freeze_envelope(name, measured, target, rule="stable", note=note)
    return True
