"""Diagnostics CSV writer and the binary field-snapshot format.

Snapshot layout (little-endian throughout):

    magic   4 bytes  b"V2DS"
    version u32      1
    N       u32
    t       f64
    count   u32      number of fields (5)
    per field: name as 8 ascii bytes (space padded), absolute offset u64
    payloads: raw f64, row-major N x N, order vx, vy, b11, b12, b22

CSV floats are printed with 17 significant digits so every f64 value
round-trips exactly; a snapshot followed by a restore reproduces the
state bit for bit, which makes checkpoint/resume runs identical to
uninterrupted ones.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .diagnostics import CSV_COLUMNS, DiagnosticsRecord
from .fields import State, SymTensorField, VelocityField
from .spectral import SpectralGrid

MAGIC = b"V2DS"
VERSION = 1
FIELD_ORDER = ("vx", "vy", "b11", "b12", "b22")

_HEAD = struct.Struct("<4sIIdI")
_ENTRY = struct.Struct("<8sQ")


class CorruptSnapshotError(RuntimeError):
    pass


def _state_arrays(state: State):
    return (
        state.v.x.values, state.v.y.values,
        state.B.b11.values, state.B.b12.values, state.B.b22.values,
    )


def write_snapshot(state: State, path) -> None:
    arrays = _state_arrays(state)
    N = state.grid.N
    header_size = _HEAD.size + len(FIELD_ORDER) * _ENTRY.size
    payload_size = 8 * N * N
    with open(path, "wb") as fh:
        fh.write(_HEAD.pack(MAGIC, VERSION, N, state.t, len(FIELD_ORDER)))
        for i, name in enumerate(FIELD_ORDER):
            fh.write(_ENTRY.pack(name.encode("ascii").ljust(8), header_size + i * payload_size))
        for arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def read_snapshot(path, grid: SpectralGrid | None = None) -> State:
    raw = Path(path).read_bytes()
    if len(raw) < _HEAD.size:
        raise CorruptSnapshotError(f"{path}: truncated header")
    magic, version, N, t, count = _HEAD.unpack_from(raw, 0)
    if magic != MAGIC:
        raise CorruptSnapshotError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise CorruptSnapshotError(f"{path}: unsupported version {version}")
    if count != len(FIELD_ORDER):
        raise CorruptSnapshotError(f"{path}: expected {len(FIELD_ORDER)} fields, found {count}")

    offsets = {}
    pos = _HEAD.size
    for _ in range(count):
        name_raw, offset = _ENTRY.unpack_from(raw, pos)
        pos += _ENTRY.size
        offsets[name_raw.decode("ascii").strip()] = offset
    missing = [n for n in FIELD_ORDER if n not in offsets]
    if missing:
        raise CorruptSnapshotError(f"{path}: missing fields {missing}")

    payload_size = 8 * N * N
    arrays = {}
    for name in FIELD_ORDER:
        start = offsets[name]
        if start + payload_size > len(raw):
            raise CorruptSnapshotError(f"{path}: field {name} payload out of bounds")
        arrays[name] = np.frombuffer(
            raw, dtype="<f8", count=N * N, offset=start
        ).reshape(N, N).copy()

    if grid is None:
        grid = SpectralGrid(N)
    elif grid.N != N:
        raise CorruptSnapshotError(f"{path}: snapshot is {N}x{N}, grid is {grid.N}x{grid.N}")
    return State(
        t=t,
        v=VelocityField.from_values(grid, arrays["vx"], arrays["vy"], project=False),
        B=SymTensorField.from_values(grid, arrays["b11"], arrays["b12"], arrays["b22"]),
    )


def checkpoint(state: State, path) -> None:
    write_snapshot(state, path)


def restore(path, grid: SpectralGrid | None = None) -> State:
    return read_snapshot(path, grid)


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


class DiagnosticsWriter:
    """Append-only CSV sink with the fixed diagnostics schema."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w", encoding="utf-8", newline="\n")
        self._fh.write(",".join(CSV_COLUMNS) + "\n")

    def __call__(self, record: DiagnosticsRecord, state: State | None = None) -> None:
        self._fh.write(",".join(format_float(v) for v in record.row()) + "\n")

    def close(self) -> None:
        self._fh.flush()
        self._fh.close()

    def __enter__(self) -> "DiagnosticsWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_diagnostics(path) -> dict[str, np.ndarray]:
    """Read a diagnostics CSV back into column arrays (exact schema only)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected schema {header}")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    data = np.array([[float(v) for v in row] for row in rows])
    if data.size == 0:
        data = data.reshape(0, len(CSV_COLUMNS))
    return {name: data[:, i] for i, name in enumerate(CSV_COLUMNS)}
