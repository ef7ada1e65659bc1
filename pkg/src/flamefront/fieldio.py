"""Binary field snapshots and plot-ready CSV emission.

Snapshot format: a 24-byte little-endian header (magic ``FLMF``, version
u32, N u64, L f64) followed by N float64 samples.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path
from typing import Sequence

import numpy as np

from .analysis import DIAGNOSTIC_COLUMNS, EnergyReport
from .spectral import Grid, RealField

__all__ = [
    "MAGIC",
    "FORMAT_VERSION",
    "save_field",
    "load_field",
    "field_to_csv",
    "write_diagnostics_csv",
]

MAGIC = b"FLMF"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQd")


def save_field(path: str | Path, field: RealField) -> None:
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, field.grid.N, field.grid.L)
    payload = np.ascontiguousarray(field.values, dtype="<f8").tobytes()
    Path(path).write_bytes(header + payload)


def load_field(path: str | Path, grid: Grid | None = None) -> RealField:
    """Read a snapshot; if a grid is supplied it must match the header."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated snapshot header")
    magic, version, n, length = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if values.size != n:
        raise ValueError(f"{path}: expected {n} samples, found {values.size}")
    file_grid = Grid(length, int(n))
    if grid is not None and grid != file_grid:
        raise ValueError(
            f"{path}: snapshot grid (L={length}, N={n}) does not match "
            f"expected (L={grid.L}, N={grid.N})"
        )
    return RealField(file_grid, values.astype(np.float64))


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def field_to_csv(path: str | Path, field: RealField) -> None:
    """Write (x, value) rows for plotting."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "value"])
        for x, v in zip(field.grid.x, field.values):
            writer.writerow([_fmt(x), _fmt(v)])


def write_diagnostics_csv(path: str | Path, reports: Sequence[EnergyReport]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(DIAGNOSTIC_COLUMNS)
        for report in reports:
            writer.writerow([_fmt(v) for v in report.row()])
