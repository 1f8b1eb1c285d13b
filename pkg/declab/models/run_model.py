# declab/models/run_model.py
# CLI run configuration and the append-only run log table.

from datetime import datetime, timezone
from typing import Literal, Optional

from pydantic import BaseModel
from sqlmodel import Field, SQLModel


class RunConfig(BaseModel):
    subcommand: str
    parameters: dict = {}
    output_format: Literal["json", "csv", "plot-data"] = "json"
    output_path: str | None = None
    seed: int | None = None


class RunRecord(SQLModel, table=True):
    id: Optional[int] = Field(default=None, primary_key=True)
    command: str = Field(index=True)
    config_hash: str = Field(index=True)
    version: str
    row_count: int = Field(default=0)
    payload: str                         # JSON body exactly as emitted
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
