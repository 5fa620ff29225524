"""Binary checkpoints and CSV series.

Checkpoint layout (little endian): magic ``b"ELS1"``, ``u64 n``, ``f64 length``,
``f64 t``, then ``u`` as ``2*n*n`` row-major doubles and ``d`` as ``3*n*n``.
"""

from __future__ import annotations

import csv
import os
import struct

import numpy as np

from .spectral import Grid, State

MAGIC = b"ELS1"
_HEADER = struct.Struct("<4sQdd")


def encode_state(state: State) -> bytes:
    n = state.grid.n
    head = _HEADER.pack(MAGIC, n, state.grid.length, float(state.t))
    body = np.ascontiguousarray(state.u, dtype="<f8").tobytes() + \
        np.ascontiguousarray(state.d, dtype="<f8").tobytes()
    return head + body


def decode_state(blob: bytes) -> State:
    magic, n, length, t = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise ValueError(f"not an ELS1 checkpoint (magic {magic!r})")
    expected = _HEADER.size + 8 * 5 * n * n
    if len(blob) != expected:
        raise ValueError(f"checkpoint size {len(blob)} does not match n={n} (expected {expected})")
    data = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size).astype(float)
    u = data[: 2 * n * n].reshape(2, n, n)
    d = data[2 * n * n:].reshape(3, n, n)
    return State(u, d, t, Grid(n, length))


def write_checkpoint(path, state: State) -> None:
    os.makedirs(os.path.dirname(os.fspath(path)) or ".", exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(encode_state(state))


def read_checkpoint(path) -> State:
    with open(path, "rb") as fh:
        return decode_state(fh.read())


def fmt(value) -> str:
    """17 significant digits: doubles round-trip through the text."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return f"{float(value):.17g}"


class CsvSink:
    """Writes rows (tuples or objects with ``row()``) to a CSV file as they arrive."""

    def __init__(self, path, columns):
        os.makedirs(os.path.dirname(os.fspath(path)) or ".", exist_ok=True)
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(columns)
        self.rows = 0

    def append(self, row) -> None:
        if hasattr(row, "row"):
            row = row.row()
        self._writer.writerow([fmt(v) for v in row])
        self.rows += 1

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_csv(path) -> dict:
    """Columns of a CSV series as float arrays (non-numeric columns stay strings)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    cols = {}
    for i, name in enumerate(header):
        values = [r[i] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in values])
        except ValueError:
            cols[name] = values
    return cols
