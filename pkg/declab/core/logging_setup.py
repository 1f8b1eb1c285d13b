# declab/core/logging_setup.py
# One-time logging configuration shared by the CLI and the tests.

import logging

from declab.core.config import LOG_LEVEL, VERBOSE

_configured = False


def configure_logging(level: str | None = None) -> None:
    """Attach a single stderr handler to the `declab` logger (idempotent)."""
    global _configured
    root = logging.getLogger("declab")
    chosen = "DEBUG" if VERBOSE else (level or LOG_LEVEL)
    root.setLevel(getattr(logging, chosen, logging.WARNING))
    if _configured:
        return
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(handler)
    _configured = True
