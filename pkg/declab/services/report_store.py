# declab/services/report_store.py
# Append-only run log in the report database.

import logging

from sqlmodel import select

from declab.core.database import get_sync_session
from declab.models.run_model import RunRecord

logger = logging.getLogger(__name__)


def append_run(command: str, config_hash: str, version: str, payload: str, row_count: int,
               url: str | None = None) -> RunRecord:
    """Insert one RunRecord. Existing records are never touched."""
    record = RunRecord(command=command, config_hash=config_hash, version=version,
                       row_count=row_count, payload=payload)
    with get_sync_session(url) as session:
        session.add(record)
        session.commit()
        session.refresh(record)
    logger.info("🗃️ Recorded %s run #%s (%d rows)", command, record.id, row_count)
    return record


def list_runs(command: str | None = None, url: str | None = None) -> list[RunRecord]:
    with get_sync_session(url) as session:
        query = select(RunRecord).order_by(RunRecord.id)
        if command:
            query = query.where(RunRecord.command == command)
        return list(session.exec(query).all())
