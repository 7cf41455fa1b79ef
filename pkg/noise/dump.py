"""Raw slice dump format.

Layout (little endian)::

    offset  size  field
    0       4     magic b"SHEN"
    4       4     d        uint32
    8       8     n_cells  uint64
    16      8     dx       float64
    24      8     dt       float64
    32      ...   values   float64, row-major, (slices, *grid.shape)

The slice count is implied by the payload length.
"""

import struct
from typing import Tuple

import numpy as np

from common.errors import DomainError

from .grid import Grid

MAGIC = b"SHEN"
HEADER = struct.Struct("<4sIQdd")
HEADER_SIZE = HEADER.size  # 32


def dump_bytes(grid: Grid, values: np.ndarray) -> bytes:
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.size % grid.size:
        raise DomainError(f"{values.size} values do not fill whole slices of {grid.size} cells")
    return HEADER.pack(MAGIC, grid.d, grid.n_cells, grid.dx, grid.dt) + values.tobytes(order="C")


def load_bytes(data: bytes) -> Tuple[Grid, np.ndarray]:
    if len(data) < HEADER_SIZE:
        raise DomainError("Dump shorter than its header")
    magic, d, n_cells, dx, dt = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DomainError(f"Bad dump magic {magic!r}")
    grid = Grid(int(d), int(n_cells), dx, dt)
    values = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE)
    return grid, values.reshape((-1, *grid.shape))
