# declab/models/field_model.py
# Complex samples of an extension operator or exponential sum on a uniform midpoint grid.

import json
import struct
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from declab.core.config import MAX_SPACING
from declab.core.errors import GridTooCoarseError, IntegrityError
from declab.models._types import Point
from declab.models.geometry_model import SquareRegion

NormMode = Literal["plain", "normalized", "weighted"]

# header: origin x, origin y, spacing x, spacing y (float64) then nx, ny (int64)
_HEADER = struct.Struct("<4d2q")


class SampledField(BaseModel):
    """
    values[i, j] is the sample at (origin[0] + i*spacing, origin[1] + j*spacing_y).
    Each sample stands for the cell of that size centred on it (midpoint rule).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    origin: Point
    spacing: float = Field(gt=0)
    spacing_y: float | None = None
    values: np.ndarray
    square: SquareRegion
    enforce_spacing: bool = True

    @field_validator("values", mode="before")
    @classmethod
    def _complex_2d(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if v.ndim != 2:
            raise ValueError("field values must be a 2-D array")
        v.flags.writeable = False
        return v

    def model_post_init(self, __context) -> None:
        if self.enforce_spacing and max(self.spacing, self.hy) > MAX_SPACING + 1e-12:
            raise GridTooCoarseError(f"grid spacing {max(self.spacing, self.hy)} exceeds {MAX_SPACING}")

    @property
    def hy(self) -> float:
        return self.spacing if self.spacing_y is None else self.spacing_y

    @property
    def nx(self) -> int:
        return self.values.shape[0]

    @property
    def ny(self) -> int:
        return self.values.shape[1]

    @property
    def cell_area(self) -> float:
        return self.spacing * self.hy

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (self.origin[0] + self.spacing * np.arange(self.nx),
                self.origin[1] + self.hy * np.arange(self.ny))

    def restrict(self, square: SquareRegion) -> np.ndarray:
        """Samples whose cell centre lies in `square` (cells are assumed aligned with it)."""
        xs, ys = self.axes()
        tol = 1e-9 * square.side
        mx = np.abs(xs - square.center[0]) <= square.half + tol
        my = np.abs(ys - square.center[1]) <= square.half + tol
        return self.values[np.ix_(mx, my)]

    # --- Serialisation ---
    def to_bytes(self) -> bytes:
        header = _HEADER.pack(self.origin[0], self.origin[1], self.spacing, self.hy, self.nx, self.ny)
        body = np.empty((self.nx, self.ny, 2), dtype="<f8")
        body[..., 0] = self.values.real
        body[..., 1] = self.values.imag
        return header + body.tobytes(order="C")

    @classmethod
    def from_bytes(cls, blob: bytes, square: SquareRegion) -> "SampledField":
        ox, oy, hx, hy, nx, ny = _HEADER.unpack_from(blob)
        body = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
        if body.size != 2 * nx * ny:
            raise IntegrityError("field body does not match its header")
        body = body.reshape(nx, ny, 2)
        return cls(origin=(ox, oy), spacing=hx, spacing_y=None if hy == hx else hy,
                   values=body[..., 0] + 1j * body[..., 1], square=square, enforce_spacing=False)

    def to_json(self) -> str:
        return json.dumps({
            "origin": list(self.origin), "spacing": self.spacing, "spacing_y": self.hy,
            "nx": self.nx, "ny": self.ny,
            "square": self.square.model_dump(mode="json"),
            "re": self.values.real.tolist(), "im": self.values.imag.tolist(),
        })
