"""EMB1 codec: the binary vector-store format consumed downstream.

Layout, all little-endian: magic ``EMB1``, u32 dim, u32 count, then per
record u16 key length, UTF-8 key bytes, dim float32 values.  Write order
is preserved; float32 payloads round-trip bit-exactly.
"""

from __future__ import annotations

import struct
from typing import IO

import numpy as np

from .errors import ExportError

MAGIC = b"EMB1"
_HEADER = struct.Struct("<II")
_KEYLEN = struct.Struct("<H")


def write_emb1(sink: IO[bytes], dim: int, entries: list[tuple[str, np.ndarray]]) -> None:
    sink.write(MAGIC)
    sink.write(_HEADER.pack(dim, len(entries)))
    for key, vector in entries:
        raw_key = key.encode("utf-8")
        if len(raw_key) > 0xFFFF:
            raise ExportError(f"key too long for u16 length field: {key[:40]!r}...")
        vector = np.ascontiguousarray(vector, dtype="<f4")
        if vector.shape != (dim,):
            raise ExportError(
                f"vector for {key!r} has shape {vector.shape}, expected ({dim},)"
            )
        sink.write(_KEYLEN.pack(len(raw_key)))
        sink.write(raw_key)
        sink.write(vector.tobytes())


def read_emb1(source: IO[bytes]) -> tuple[int, list[tuple[str, np.ndarray]]]:
    """Inverse of write_emb1; used by the exporter's own tests."""
    if source.read(4) != MAGIC:
        raise ExportError("not an EMB1 file (bad magic)")
    dim, count = _HEADER.unpack(source.read(_HEADER.size))
    entries: list[tuple[str, np.ndarray]] = []
    for _ in range(count):
        (key_len,) = _KEYLEN.unpack(source.read(_KEYLEN.size))
        key = source.read(key_len).decode("utf-8")
        payload = source.read(4 * dim)
        if len(payload) != 4 * dim:
            raise ExportError(f"truncated vector payload for {key!r}")
        entries.append((key, np.frombuffer(payload, dtype="<f4").copy()))
    return dim, entries
