"""Binary container and CSV dumps for fields and extension snapshots.

Container layout, little-endian:

    magic    4 bytes  b"FHFL"
    version  uint16
    dim      uint8
    has_y    uint8
    Lx       float64
    Nx       uint32
    T        float64
    Nt       uint32
    [M       uint32, then M float64 y nodes]    only when has_y
    samples  complex128 in C order over (x1[, x2][, y], t)
"""

import logging
import struct
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from .errors import StructuralError
from .fields import SpaceTimeField, SpaceTimeGrid

logger = logging.getLogger(__name__)

MAGIC = b"FHFL"
VERSION = 1
_HEADER = struct.Struct("<4sHBBdIdI")

PathLike = Union[str, Path]


def _pack_header(grid: SpaceTimeGrid, y_nodes: Optional[np.ndarray]) -> bytes:
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        grid.dim,
        0 if y_nodes is None else 1,
        grid.x_period_length,
        grid.x_points,
        grid.t_window_time,
        grid.t_points,
    )
    if y_nodes is not None:
        header += struct.pack("<I", y_nodes.size) + np.asarray(y_nodes, dtype="<f8").tobytes()
    return header


def write_field(path: PathLike, field: SpaceTimeField) -> Path:
    """Write a SpaceTimeField to the binary container."""
    path = Path(path)
    payload = np.ascontiguousarray(field.samples, dtype="<c16").tobytes()
    path.write_bytes(_pack_header(field.grid, None) + payload)
    logger.info(f"Wrote field {field.grid.shape} to {path}")
    return path


def write_snapshot(
    path: PathLike, grid: SpaceTimeGrid, y_nodes: np.ndarray, values: np.ndarray
) -> Path:
    """Write extension samples of shape (Nx,)*n + (M, Nt) with a y-axis header."""
    path = Path(path)
    expected = (grid.x_points,) * grid.dim + (y_nodes.size, grid.t_points)
    if values.shape != expected:
        raise StructuralError(f"snapshot shape {values.shape} does not match {expected}")
    payload = np.ascontiguousarray(values, dtype="<c16").tobytes()
    path.write_bytes(_pack_header(grid, np.asarray(y_nodes, dtype=float)) + payload)
    logger.info(f"Wrote extension snapshot {values.shape} to {path}")
    return path


def _read(path: PathLike) -> Tuple[SpaceTimeGrid, Optional[np.ndarray], np.ndarray]:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise StructuralError(f"{path}: truncated header")
    magic, version, dim, has_y, lx, nx, t_window, nt = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise StructuralError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise StructuralError(f"{path}: unsupported container version {version}")
    grid = SpaceTimeGrid(
        dim=dim, x_period_length=lx, x_points=nx, t_window_time=t_window, t_points=nt
    )
    offset = _HEADER.size
    y_nodes = None
    shape = grid.shape
    if has_y:
        (m,) = struct.unpack_from("<I", data, offset)
        offset += 4
        y_nodes = np.frombuffer(data, dtype="<f8", count=m, offset=offset).astype(float)
        offset += 8 * m
        shape = (nx,) * dim + (m, nt)
    count = int(np.prod(shape))
    if len(data) - offset != 16 * count:
        raise StructuralError(f"{path}: payload has {len(data) - offset} bytes, expected {16 * count}")
    values = np.frombuffer(data, dtype="<c16", count=count, offset=offset).reshape(shape)
    return grid, y_nodes, values.astype(complex)


def read_field(path: PathLike) -> SpaceTimeField:
    """Read a SpaceTimeField written by write_field."""
    grid, y_nodes, values = _read(path)
    if y_nodes is not None:
        raise StructuralError(f"{path}: container holds an extension snapshot, not a field")
    return SpaceTimeField(grid, samples=values)


def read_snapshot(path: PathLike) -> Tuple[SpaceTimeGrid, np.ndarray, np.ndarray]:
    """Read (grid, y_nodes, values) from an extension snapshot."""
    grid, y_nodes, values = _read(path)
    if y_nodes is None:
        raise StructuralError(f"{path}: container has no y-axis header")
    return grid, y_nodes, values


def field_frame(field: SpaceTimeField) -> pd.DataFrame:
    """Long-format table x1[, x2], t, re, im."""
    xs, t = field.grid.mesh()
    columns = {f"x{i + 1}": x.ravel() for i, x in enumerate(xs)}
    columns["t"] = t.ravel()
    columns["re"] = field.samples.real.ravel()
    columns["im"] = field.samples.imag.ravel()
    return pd.DataFrame(columns)


def dump_field_csv(path: PathLike, field: SpaceTimeField) -> Path:
    path = Path(path)
    field_frame(field).to_csv(path, index=False, float_format="%.17g")
    return path
