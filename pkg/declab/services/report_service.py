# declab/services/report_service.py
# Output emitters (JSON, CSV, plot-data), provenance blocks and atomic file writes.

import hashlib
import io
import json
import logging
import math
import os
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
import pandas as pd
from pydantic import BaseModel

from declab.core.config import VERSION
from declab.core.errors import PreconditionError

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv", "plot-data")


# =====================================
# Plain values
# =====================================
def to_plain(value):
    """Recursively turn models, Fractions, numpy scalars and complex numbers into JSON-ready values."""
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump())
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_plain(float(value.real)), to_plain(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # JSON has no inf/nan
        return value if math.isfinite(value) else str(value)
    return value


# =====================================
# Provenance
# =====================================
def config_hash(config: dict) -> str:
    canonical = json.dumps(to_plain(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def provenance(config: dict, seed: int | None = None) -> dict:
    return {"version": VERSION, "config_hash": config_hash(config), "seed": seed}


# =====================================
# Emitters
# =====================================
def emit_json(rows: list, prov: dict) -> str:
    return json.dumps({"provenance": prov, "rows": to_plain(rows)}, sort_keys=True, indent=2) + "\n"


def emit_csv(rows: list, prov: dict) -> str:
    """One header line, then one line per row. Provenance rides in a leading '#' comment."""
    plain = [{k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in to_plain(r).items()} for r in rows]
    buffer = io.StringIO()
    buffer.write(f"# provenance: {json.dumps(prov, sort_keys=True)}\n")
    pd.DataFrame(plain).to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def emit_plot_data(rows: list, prov: dict, x: str, y: str) -> str:
    """Two whitespace-separated columns, `x` and `y`, for gnuplot-style tools."""
    lines = [f"# provenance: {json.dumps(prov, sort_keys=True)}", f"# {x} {y}"]
    for row in to_plain(rows):
        if x not in row or y not in row:
            raise PreconditionError(f"plot-data needs columns {x!r} and {y!r}")
        lines.append(f"{_plot_value(row[x])} {_plot_value(row[y])}")
    return "\n".join(lines) + "\n"


def _plot_value(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, str):
        try:
            return repr(float(Fraction(v)))
        except (ValueError, ZeroDivisionError):
            return v.replace(" ", "_")
    return repr(v)


def emit(rows: list, fmt: str, prov: dict, plot_columns: tuple[str, str] | None = None) -> str:
    if fmt == "json":
        return emit_json(rows, prov)
    if fmt == "csv":
        return emit_csv(rows, prov)
    if fmt == "plot-data":
        if plot_columns is None:
            raise PreconditionError("this command has no plot-data series")
        return emit_plot_data(rows, prov, *plot_columns)
    raise PreconditionError(f"unknown output format {fmt!r}; choose one of {FORMATS}")


def parse_json_report(text: str) -> dict:
    return json.loads(text)


# =====================================
# Files
# =====================================
def write_atomic(text: str, path: str | os.PathLike) -> Path:
    """Write through a temp file in the target directory, then rename over `path`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("💾 Wrote %s (%d bytes)", path, len(text))
    return path
