"""Deterministic hash-based text embedder.

Stands in for a sentence-transformer wherever reproducibility matters
more than semantics (tests, CI, synthetic corpora).  The construction is
pinned bit-for-bit:

* tokens: lowercase the text, split on any non-alphanumeric scalar,
  with alphanumeric pinned to the ASCII class [0-9a-z] so the rule
  cannot drift with Unicode table revisions;
* token hash h: FNV-1a-64 over the token's UTF-8 bytes;
* token vector entry j: splitmix64(h XOR j), mapped to [-1, 1) via
  ((s >> 11) / 2**53) * 2 - 1;
* text vector: sum of token vectors with multiplicity, accumulated
  sequentially in float64 in token order, L2-normalized, then rounded
  once to float32.  No tokens -> the zero vector.

Every arithmetic step is exact or IEEE-defined, so identical (text, dim)
inputs produce identical float32 bits on any platform.
"""

from __future__ import annotations

import re

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1

_SM_GAMMA = np.uint64(0x9E3779B97F4B7C15)
_SM_MULT1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_MULT2 = np.uint64(0x94D049BB133111EB)

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric scalars."""
    return [t for t in _TOKEN_SPLIT.split(text.lower()) if t]


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _splitmix64_array(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer applied elementwise to a uint64 array."""
    z = (x + _SM_GAMMA).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _SM_MULT1
    z = (z ^ (z >> np.uint64(27))) * _SM_MULT2
    return z ^ (z >> np.uint64(31))


def _token_vector(h: int, dim: int) -> np.ndarray:
    """Pseudo-random direction for one token, entries in [-1, 1)."""
    idx = np.uint64(h) ^ np.arange(dim, dtype=np.uint64)
    s = _splitmix64_array(idx)
    # (s >> 11) has 53 bits; the division and affine map are exact in float64.
    return ((s >> np.uint64(11)).astype(np.float64) / 2.0**53) * 2.0 - 1.0


class HashingTextEmbedder(TransformerMixin, BaseEstimator):
    """Stateless sklearn-style transformer from texts to unit vectors.

    Parameters
    ----------
    dim : int, default=384
        Output dimensionality; must be >= 1.

    ``transform`` maps an iterable of strings to an (n_texts, dim)
    float32 array.  There is nothing to fit; ``fit`` validates ``dim``
    and returns ``self`` so the transformer drops into pipelines.
    """

    def __init__(self, dim: int = 384):
        self.dim = dim

    def _check_dim(self) -> int:
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        return self.dim

    def fit(self, X=None, y=None):
        self._check_dim()
        return self

    def transform(self, X) -> np.ndarray:
        dim = self._check_dim()
        rows = [self.embed(text) for text in X]
        if not rows:
            return np.zeros((0, dim), dtype=np.float32)
        return np.stack(rows)

    def embed(self, text: str) -> np.ndarray:
        """Embed one text; returns a float32 vector of length ``dim``."""
        dim = self._check_dim()
        cached_dim, cache = self.__dict__.get("_token_cache", (None, None))
        if cached_dim != dim:
            cache = {}
            self._token_cache = (dim, cache)
        acc = np.zeros(dim, dtype=np.float64)
        for token in tokenize(text):
            vec = cache.get(token)
            if vec is None:
                vec = _token_vector(fnv1a64(token.encode("utf-8")), dim)
                if len(cache) < 100_000:
                    cache[token] = vec
            acc += vec
        norm = float(np.sqrt(np.dot(acc, acc)))
        if norm == 0.0:
            return np.zeros(dim, dtype=np.float32)
        return (acc / norm).astype(np.float32)


def deterministic_embed(text: str, dim: int) -> np.ndarray:
    """Functional form of :class:`HashingTextEmbedder` for one-off calls."""
    return HashingTextEmbedder(dim=dim).embed(text)
