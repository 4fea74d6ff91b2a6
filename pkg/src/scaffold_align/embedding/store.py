"""Binary embedding store with bit-exact float32 round trips.

File layout (little-endian): magic ``EMB1``, u32 dim, u32 count, then per
record a u16 key length, the UTF-8 key, and dim float32 values.  Keys are
``kind\\x1Fdialogue_id\\x1Findex`` with the index segment omitted for
problem/solution texts.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator

import numpy as np

from ..corpus import Corpus
from ..errors import MissingKeyError, StoreError

MAGIC = b"EMB1"
_SEP = "\x1f"

KIND_MESSAGE = "message"
KIND_PROBLEM = "problem"
KIND_SOLUTION = "solution"
_KINDS = (KIND_MESSAGE, KIND_PROBLEM, KIND_SOLUTION)


@dataclass(frozen=True)
class TextKey:
    """Address of one text in a corpus: a message, problem, or solution."""

    kind: str
    dialogue_id: str
    index: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown text kind {self.kind!r}")
        if (self.kind == KIND_MESSAGE) != (self.index is not None):
            raise ValueError("message keys need an index; anchor keys must not have one")
        if _SEP in self.dialogue_id:
            raise ValueError("dialogue_id may not contain the key separator \\x1f")

    def to_string(self) -> str:
        if self.index is None:
            return f"{self.kind}{_SEP}{self.dialogue_id}"
        return f"{self.kind}{_SEP}{self.dialogue_id}{_SEP}{self.index}"

    @classmethod
    def from_string(cls, raw: str) -> "TextKey":
        parts = raw.split(_SEP)
        if len(parts) == 2:
            return cls(kind=parts[0], dialogue_id=parts[1])
        if len(parts) == 3:
            return cls(kind=parts[0], dialogue_id=parts[1], index=int(parts[2]))
        raise ValueError(f"malformed text key {raw!r}")


def corpus_text_items(corpus: Corpus) -> Iterator[tuple[TextKey, str]]:
    """Yield (key, text) for every embeddable text, in corpus order.

    Per dialogue: problem, solution, then messages in index order.
    """
    for d in corpus:
        yield TextKey(KIND_PROBLEM, d.dialogue_id), d.problem_statement
        yield TextKey(KIND_SOLUTION, d.dialogue_id), d.solution
        for m in d.messages:
            yield TextKey(KIND_MESSAGE, d.dialogue_id, m.index), m.text


class EmbeddingStore:
    """Mapping from text keys to fixed-dimension float32 vectors."""

    def __init__(self, dim: int):
        if dim < 1:
            raise StoreError(f"store dim must be >= 1, got {dim}")
        self.dim = dim
        self._entries: dict[str, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: TextKey | str) -> bool:
        return self._key_string(key) in self._entries

    @staticmethod
    def _key_string(key: TextKey | str) -> str:
        return key.to_string() if isinstance(key, TextKey) else key

    def put(self, key: TextKey | str, vector: np.ndarray) -> None:
        vec = np.asarray(vector, dtype=np.float32)
        if vec.shape != (self.dim,):
            raise StoreError(
                f"vector for key {self._key_string(key)!r} has shape {vec.shape}, expected ({self.dim},)"
            )
        if not np.all(np.isfinite(vec)):
            raise StoreError(f"vector for key {self._key_string(key)!r} has non-finite entries")
        self._entries[self._key_string(key)] = vec

    def get(self, key: TextKey | str) -> np.ndarray:
        vec = self._entries.get(self._key_string(key))
        if vec is None:
            if isinstance(key, str):
                key = TextKey.from_string(key)
            raise MissingKeyError(key.kind, key.dialogue_id, key.index)
        return vec

    def keys(self) -> list[str]:
        return list(self._entries)

    def items(self) -> Iterator[tuple[str, np.ndarray]]:
        return iter(self._entries.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmbeddingStore):
            return NotImplemented
        if self.dim != other.dim or set(self._entries) != set(other._entries):
            return False
        return all(
            np.array_equal(vec.view(np.uint32), other._entries[k].view(np.uint32))
            for k, vec in self._entries.items()
        )


def write_store(store: EmbeddingStore, sink: IO[bytes] | str | Path) -> None:
    """Serialize a store; float32 payloads are written verbatim."""
    if isinstance(sink, (str, Path)):
        with open(sink, "wb") as fh:
            write_store(store, fh)
        return
    sink.write(MAGIC)
    sink.write(struct.pack("<II", store.dim, len(store)))
    for key, vec in store.items():
        raw = key.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise StoreError(f"key too long for u16 length prefix: {key[:40]!r}...")
        sink.write(struct.pack("<H", len(raw)))
        sink.write(raw)
        sink.write(vec.astype("<f4", copy=False).tobytes())


def read_store(source: IO[bytes] | str | Path) -> EmbeddingStore:
    """Read a store back; inverse of :func:`write_store`, bit-exact."""
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return read_store(fh)
    header = source.read(4)
    if header != MAGIC:
        raise StoreError(f"bad magic: expected {MAGIC!r}, got {header!r}")
    meta = source.read(8)
    if len(meta) != 8:
        raise StoreError("truncated header")
    dim, count = struct.unpack("<II", meta)
    store = EmbeddingStore(dim=dim)
    for i in range(count):
        len_raw = source.read(2)
        if len(len_raw) != 2:
            raise StoreError(f"truncated record {i + 1} of {count} (key length)")
        (key_len,) = struct.unpack("<H", len_raw)
        key_raw = source.read(key_len)
        if len(key_raw) != key_len:
            raise StoreError(f"truncated record {i + 1} of {count} (key)")
        key = key_raw.decode("utf-8")
        payload = source.read(4 * dim)
        if len(payload) != 4 * dim:
            raise StoreError(f"truncated record {i + 1} of {count} (key {key!r})")
        if key in store._entries:
            raise StoreError(f"duplicate key {key!r}")
        store._entries[key] = np.frombuffer(payload, dtype="<f4").copy()
    return store


def build_store(corpus: Corpus, embed_fn, dim: int) -> EmbeddingStore:
    """Embed every corpus text with ``embed_fn(text) -> vector``."""
    store = EmbeddingStore(dim=dim)
    for key, text in corpus_text_items(corpus):
        store.put(key, embed_fn(text))
    return store
