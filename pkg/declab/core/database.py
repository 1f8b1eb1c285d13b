# declab/core/database.py
# Engine and session helpers for the append-only run log.

from sqlalchemy import create_engine
from sqlmodel import Session, SQLModel

from declab.core.config import DATABASE_URL
from declab.core.errors import PreconditionError

_engines: dict = {}


def get_engine(url: str | None = None):
    """Return a cached sync engine for `url` (or DECLAB_DB). None when no database is configured."""
    url = url or DATABASE_URL
    if not url:
        return None
    if url not in _engines:
        # --- Engine + tables ---
        engine = create_engine(url, echo=False, future=True)
        from declab.models.run_model import RunRecord  # noqa: F401  registers the table
        SQLModel.metadata.create_all(engine)
        _engines[url] = engine
    return _engines[url]


def get_sync_session(url: str | None = None) -> Session:
    engine = get_engine(url)
    if engine is None:
        raise PreconditionError("No report database configured (set DECLAB_DB or pass --db)")
    return Session(engine)
