"""Compact binary container for gridded 2D double arrays.

Layout (little-endian throughout):

    offset  size  field
    0       8     magic  b"SQCGRID\\x00"
    8       4     u32    format version (currently 1)
    12      1     u8     kind: 0 = Wigner field, 1 = density kernel
    13      1     u8     basis label (0 or 1)
    14      1     u8     channel: 0 = none, 1 = damping, 2 = diffusion
    15      1     u8     reserved (0)
    16      8     f64    rate-time product gamma*t
    24      8     u64    n_rows
    32      8     u64    n_cols
    40      32    f64x4  row_min, row_max, col_min, col_max
    72      --    f64    values, row-major, n_rows*n_cols entries

For Wigner fields rows run along q and columns along p; for kernels both
axes are the shared position grid.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"SQCGRID\x00"
VERSION = 1
KIND_WIGNER = 0
KIND_KERNEL = 1

_CHANNEL_CODE = {None: 0, "damping": 1, "diffusion": 2}
_CHANNEL_NAME = {v: k for k, v in _CHANNEL_CODE.items()}

_HEADER = struct.Struct("<8sIBBBBdQQdddd")


@dataclass(frozen=True)
class GridRecord:
    kind: int
    basis: int
    channel: str | None
    time: float
    row_range: tuple[float, float]
    col_range: tuple[float, float]
    values: np.ndarray


def write_grid(path, values, *, kind, basis, channel, time, row_range, col_range) -> None:
    arr = np.ascontiguousarray(values, dtype="<f8")
    if arr.ndim != 2:
        raise ValueError("grid payload must be 2D")
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        kind,
        basis,
        _CHANNEL_CODE[channel],
        0,
        float(time),
        arr.shape[0],
        arr.shape[1],
        float(row_range[0]),
        float(row_range[1]),
        float(col_range[0]),
        float(col_range[1]),
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(arr.tobytes())


def read_grid(path) -> GridRecord:
    with open(path, "rb") as fh:
        raw = fh.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        (magic, version, kind, basis, channel, _res, time, n_rows, n_cols,
         r0, r1, c0, c1) = _HEADER.unpack(raw)
        if magic != MAGIC:
            raise ValueError(f"{path}: not a grid file (bad magic)")
        if version != VERSION:
            raise ValueError(f"{path}: unsupported format version {version}")
        payload = np.frombuffer(fh.read(8 * n_rows * n_cols), dtype="<f8")
    if payload.size != n_rows * n_cols:
        raise ValueError(f"{path}: truncated payload")
    values = payload.reshape(n_rows, n_cols).astype(np.float64)
    return GridRecord(
        kind=kind,
        basis=basis,
        channel=_CHANNEL_NAME[channel],
        time=time,
        row_range=(r0, r1),
        col_range=(c0, c1),
        values=values,
    )
