"""Occupancy grids with a compact run-length wire encoding.

Cells are indexed (ix, iy) with iy increasing along +y; storage is a
numpy array of shape (height, width) so cells[iy, ix]. The origin pose
is the world position of the corner of cell (0, 0).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .geometry import Pose2


class CellState(IntEnum):
    UNKNOWN = 0
    FREE = 1
    OCCUPIED = 2


_RLE_CHAR = {CellState.UNKNOWN: "U", CellState.FREE: "F", CellState.OCCUPIED: "O"}
_RLE_STATE = {"U": CellState.UNKNOWN, "F": CellState.FREE, "O": CellState.OCCUPIED}
_RLE_TOKEN = re.compile(r"(\d+)([UFO])")


@dataclass(eq=False)
class GridMap:
    width: int
    height: int
    resolution: float
    origin: Pose2
    cells: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        if self.resolution <= 0 or not math.isfinite(self.resolution):
            raise ValueError(f"resolution must be positive, got {self.resolution!r}")
        if self.width < 0 or self.height < 0:
            raise ValueError("grid dimensions must be non-negative")
        self.cells = np.asarray(self.cells, dtype=np.uint8).reshape(self.height, self.width)
        if self.cells.size != self.width * self.height:
            raise ValueError("cell count does not match width*height")

    @classmethod
    def empty(cls, width: int, height: int, resolution: float, origin: Pose2) -> GridMap:
        cells = np.full((height, width), CellState.UNKNOWN, dtype=np.uint8)
        return cls(width, height, resolution, origin, cells)

    def in_bounds(self, ix: int, iy: int) -> bool:
        return 0 <= ix < self.width and 0 <= iy < self.height

    def state_at(self, ix: int, iy: int) -> CellState:
        """State of one cell; out-of-bounds cells read as UNKNOWN."""
        if not self.in_bounds(ix, iy):
            return CellState.UNKNOWN
        return CellState(self.cells[iy, ix])

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        return (
            int(math.floor((x - self.origin.x) / self.resolution)),
            int(math.floor((y - self.origin.y) / self.resolution)),
        )

    def cell_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (
            self.origin.x + (ix + 0.5) * self.resolution,
            self.origin.y + (iy + 0.5) * self.resolution,
        )

    def all_unknown(self) -> bool:
        return bool((self.cells == CellState.UNKNOWN).all())

    def copy(self) -> GridMap:
        return GridMap(self.width, self.height, self.resolution, self.origin, self.cells.copy())

    def encode_cells(self) -> str:
        """Run-length encode row-major cells as e.g. '12U3F1O'."""
        flat = self.cells.reshape(-1)
        if flat.size == 0:
            return ""
        out: list[str] = []
        boundaries = np.flatnonzero(np.diff(flat)) + 1
        start = 0
        for end in list(boundaries) + [flat.size]:
            out.append(f"{end - start}{_RLE_CHAR[CellState(flat[start])]}")
            start = end
        return "".join(out)

    def to_json(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "resolution": self.resolution,
            "origin": self.origin.to_json(),
            "cells": self.encode_cells(),
        }

    @classmethod
    def from_json(cls, data: dict) -> GridMap:
        width, height = data["width"], data["height"]
        flat = np.empty(width * height, dtype=np.uint8)
        pos = 0
        consumed = 0
        for match in _RLE_TOKEN.finditer(data["cells"]):
            count = int(match.group(1))
            flat[pos : pos + count] = _RLE_STATE[match.group(2)]
            pos += count
            consumed = match.end()
        if consumed != len(data["cells"]) or pos != width * height:
            raise ValueError("malformed run-length cell string")
        return cls(width, height, data["resolution"], Pose2.from_json(data["origin"]), flat)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridMap):
            return NotImplemented
        return (
            self.width == other.width
            and self.height == other.height
            and self.resolution == other.resolution
            and self.origin == other.origin
            and np.array_equal(self.cells, other.cells)
        )
