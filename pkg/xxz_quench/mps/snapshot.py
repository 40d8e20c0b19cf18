"""
MPS Snapshot — Versioned binary checkpoint of an MpsState.

Layout (all little-endian):
    magic      8 bytes   b"XXZMPS\\0\\0"
    version    uint32
    n_sites    uint32
    per site   3 × uint32 dims (left, physical, right),
               then left·physical·right complex entries stored as
               interleaved (real, imag) float64 pairs in C order
    per bond   uint32 length, then that many float64 Schmidt weights

A load of a saved file reproduces the state bit-exactly, which is what the
resume path of the evolution relies on.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from xxz_quench.errors import SnapshotFormatError
from xxz_quench.mps.state import MpsState

logger = logging.getLogger(__name__)

MAGIC = b"XXZMPS\0\0"
FORMAT_VERSION = 1

_U32 = np.dtype("<u4")
_F64 = np.dtype("<f8")


def encode_snapshot(state: MpsState) -> bytes:
    """Serialize a state into the snapshot byte layout."""
    parts = [MAGIC, np.array([FORMAT_VERSION, state.n_sites], dtype=_U32).tobytes()]
    for tensor in state.site_tensors:
        parts.append(np.array(tensor.shape, dtype=_U32).tobytes())
        values = np.ascontiguousarray(tensor, dtype=np.complex128)
        parts.append(values.view(np.float64).astype(_F64).tobytes())
    for weights in state.bond_weights:
        parts.append(np.array([len(weights)], dtype=_U32).tobytes())
        parts.append(np.asarray(weights, dtype=_F64).tobytes())
    return b"".join(parts)


class _Reader:
    """Cursor over a snapshot buffer that fails loudly on truncation."""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, dtype: np.dtype, count: int) -> np.ndarray:
        size = dtype.itemsize * count
        if self.offset + size > len(self.data):
            raise SnapshotFormatError(
                f"Snapshot truncated at byte {self.offset} (needed {size} more bytes)"
            )
        values = np.frombuffer(self.data, dtype=dtype, count=count, offset=self.offset)
        self.offset += size
        return values


def decode_snapshot(data: bytes) -> MpsState:
    """
    Rebuild a state from snapshot bytes.

    Raises:
        SnapshotFormatError: On bad magic, unsupported version, truncated or
            trailing data.
    """
    if data[: len(MAGIC)] != MAGIC:
        raise SnapshotFormatError("Not an MPS snapshot (bad magic)")
    reader = _Reader(data)
    reader.offset = len(MAGIC)
    version, n_sites = (int(v) for v in reader.take(_U32, 2))
    if version != FORMAT_VERSION:
        raise SnapshotFormatError(f"Unsupported snapshot version {version}")

    tensors = []
    for _ in range(n_sites):
        shape = tuple(int(v) for v in reader.take(_U32, 3))
        count = shape[0] * shape[1] * shape[2]
        flat = reader.take(_F64, 2 * count).astype(np.float64)
        tensors.append(flat.view(np.complex128).reshape(shape).copy())

    weights = []
    for _ in range(max(n_sites - 1, 0)):
        (length,) = (int(v) for v in reader.take(_U32, 1))
        weights.append(reader.take(_F64, length).astype(np.float64).copy())

    if reader.offset != len(data):
        raise SnapshotFormatError(f"{len(data) - reader.offset} trailing bytes in snapshot")
    try:
        return MpsState(site_tensors=tensors, bond_weights=weights)
    except ValueError as exc:
        raise SnapshotFormatError(f"Inconsistent snapshot: {exc}") from exc


def save_snapshot(state: MpsState, path: str | Path) -> Path:
    """Write a state snapshot; returns the path written."""
    path = Path(path)
    path.write_bytes(encode_snapshot(state))
    logger.info("MPS snapshot written: %s (%d sites)", path, state.n_sites)
    return path


def load_snapshot(path: str | Path) -> MpsState:
    """Read a state snapshot written by save_snapshot()."""
    return decode_snapshot(Path(path).read_bytes())
