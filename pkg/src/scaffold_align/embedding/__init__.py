"""Embedding providers, cosine similarity, and the binary vector store."""

from __future__ import annotations

import numpy as np

from .hashing import HashingTextEmbedder, deterministic_embed, fnv1a64, tokenize
from .http import http_embed
from .store import (
    KIND_MESSAGE,
    KIND_PROBLEM,
    KIND_SOLUTION,
    EmbeddingStore,
    TextKey,
    build_store,
    corpus_text_items,
    read_store,
    write_store,
)

__all__ = [
    "HashingTextEmbedder",
    "deterministic_embed",
    "tokenize",
    "fnv1a64",
    "http_embed",
    "EmbeddingStore",
    "TextKey",
    "build_store",
    "corpus_text_items",
    "read_store",
    "write_store",
    "KIND_MESSAGE",
    "KIND_PROBLEM",
    "KIND_SOLUTION",
    "cosine_similarity",
    "NORM_FLOOR",
]

# Vectors with L2 norm below this are treated as zero (empty texts);
# their cosine against anything is 0 by convention, not NaN.
NORM_FLOOR = 1e-12


def cosine_similarity(a, b) -> float:
    """Cosine of the angle between two equal-length vectors.

    Accumulates in float64 regardless of input dtype so float32 payloads
    score identically across SIMD/scalar code paths.  Returns 0.0 when
    either norm falls below ``NORM_FLOOR``.
    """
    va = np.asarray(a, dtype=np.float64)
    vb = np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape or va.ndim != 1:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    norm_a = float(np.sqrt(np.dot(va, va)))
    norm_b = float(np.sqrt(np.dot(vb, vb)))
    if norm_a < NORM_FLOOR or norm_b < NORM_FLOOR:
        return 0.0
    return float(np.dot(va, vb) / (norm_a * norm_b))
