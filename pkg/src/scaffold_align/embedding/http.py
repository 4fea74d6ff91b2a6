"""HTTP client for live embedding services.

Protocol: POST ``{"texts": [...]}`` as JSON, response ``{"vectors":
[[...], ...]}`` with one vector per text, order preserved.  Requests go
out in batches; each failed batch is retried twice with exponential
backoff before the whole call errors.
"""

from __future__ import annotations

import json
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .._threads import resolve_threads
from ..errors import EmbeddingHttpError


def _post_batch(endpoint: str, texts: list[str], timeout: float, retries: int, backoff: float) -> list[np.ndarray]:
    payload = json.dumps({"texts": texts}).encode("utf-8")
    last_error: Exception | None = None
    for attempt in range(retries + 1):
        if attempt:
            time.sleep(backoff * 2 ** (attempt - 1))
        request = urllib.request.Request(
            endpoint, data=payload, headers={"Content-Type": "application/json"}, method="POST"
        )
        try:
            with urllib.request.urlopen(request, timeout=timeout) as response:
                body = response.read()
            break
        except (urllib.error.URLError, OSError) as exc:
            last_error = exc
    else:
        raise EmbeddingHttpError(f"embedding request failed after {retries + 1} attempts: {last_error}")

    try:
        obj = json.loads(body)
        vectors = obj["vectors"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise EmbeddingHttpError(f"malformed embedding response: {exc}") from exc
    if not isinstance(vectors, list) or len(vectors) != len(texts):
        got = len(vectors) if isinstance(vectors, list) else type(vectors).__name__
        raise EmbeddingHttpError(f"response arity mismatch: sent {len(texts)} texts, got {got} vectors")
    return [np.asarray(v, dtype=np.float32) for v in vectors]


def http_embed(
    endpoint: str,
    texts: list[str],
    batch_size: int = 64,
    max_inflight: int = 4,
    timeout: float = 30.0,
    retries: int = 2,
    backoff: float = 0.5,
) -> list[np.ndarray]:
    """Embed ``texts`` via a remote service; order is preserved.

    Up to ``max_inflight`` batches are posted concurrently (further
    capped by ``SCAFFOLD_ALIGN_THREADS``); results are reassembled in
    input order.  All vectors must share one dimension.
    """
    if not texts:
        raise EmbeddingHttpError("texts must be a non-empty list")
    if batch_size < 1:
        raise EmbeddingHttpError(f"batch_size must be >= 1, got {batch_size}")
    batches = [texts[i : i + batch_size] for i in range(0, len(texts), batch_size)]
    workers = max(1, min(max_inflight, resolve_threads(default=max_inflight), len(batches)))

    if workers == 1:
        results = [_post_batch(endpoint, b, timeout, retries, backoff) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _post_batch(endpoint, b, timeout, retries, backoff), batches))

    vectors = [vec for batch in results for vec in batch]
    dims = {v.shape for v in vectors}
    if len(dims) > 1:
        raise EmbeddingHttpError(f"response vectors disagree on dimension: {sorted(d[0] for d in dims)}")
    if vectors and vectors[0].ndim != 1:
        raise EmbeddingHttpError("response vectors must be flat arrays of numbers")
    return vectors
