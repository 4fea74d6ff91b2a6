"""Encoder backends behind one tiny interface.

An encoder has ``.dim``, ``.resolved_name``, and ``.encode(texts) ->
float32 array of shape (len(texts), dim)``.  Output is passed through
to the store unmodified: no normalization, no truncation.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

from .errors import ModelLoadError

DEFAULT_MODEL = "all-MiniLM-L6-v2"
_DEBUG_PATTERN = re.compile(r"^debug-hash-(\d+)$")


class DebugHashEncoder:
    """Offline stand-in: text-seeded Gaussian vectors, no semantics.

    Exists so the export pipeline is testable without model weights or
    network access.  Deterministic across runs and platforms.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ModelLoadError(f"debug encoder dim must be >= 1, got {dim}")
        self.dim = dim
        self.resolved_name = f"debug-hash-{dim}"

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dim), dtype=np.float32)
        for i, text in enumerate(texts):
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            seed = int.from_bytes(digest[:8], "little")
            rng = np.random.default_rng(seed)
            out[i] = rng.standard_normal(self.dim).astype(np.float32)
        return out


class SentenceTransformerEncoder:
    """Real model via sentence-transformers; requires weights on disk."""

    def __init__(self, model_name: str, device: str | None):
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise ModelLoadError(
                "sentence-transformers is not installed; "
                "pip install 'embed-export[model]' or use a debug-hash-N model"
            ) from exc
        try:
            self._model = SentenceTransformer(model_name, device=device)
        except Exception as exc:  # hub/IO errors vary by version
            raise ModelLoadError(f"cannot load model {model_name!r}: {exc}") from exc
        self.dim = int(self._model.get_sentence_embedding_dimension())
        self.resolved_name = model_name

    def encode(self, texts: list[str]) -> np.ndarray:
        vectors = self._model.encode(
            texts,
            convert_to_numpy=True,
            normalize_embeddings=False,
            show_progress_bar=False,
        )
        return np.asarray(vectors, dtype=np.float32)


def load_encoder(model_name: str, device: str | None = None):
    match = _DEBUG_PATTERN.match(model_name)
    if match:
        return DebugHashEncoder(dim=int(match.group(1)))
    return SentenceTransformerEncoder(model_name, device)
