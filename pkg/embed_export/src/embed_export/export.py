"""Export job: corpus JSONL -> EMB1 store + sidecar metadata."""

from __future__ import annotations

import hashlib
import io
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .corpus import read_corpus, text_items
from .emb1 import write_emb1
from .encoders import DEFAULT_MODEL, load_encoder
from .errors import ExportError

log = logging.getLogger("embed_export")


@dataclass(frozen=True)
class ExportJob:
    corpus_path: str
    output_path: str
    model_name: str = DEFAULT_MODEL
    batch_size: int = 64
    device: str | None = None

    def __post_init__(self):
        if self.batch_size < 1:
            raise ExportError(f"batch_size must be >= 1, got {self.batch_size}")


def _atomic_write(path: Path, payload: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as sink:
            sink.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export(job: ExportJob) -> dict:
    """Run the job; returns the sidecar metadata that was written."""
    dialogues = read_corpus(job.corpus_path)
    items = text_items(dialogues)
    encoder = load_encoder(job.model_name, job.device)

    entries = []
    n_batches = (len(items) + job.batch_size - 1) // job.batch_size
    for b in range(n_batches):
        batch = items[b * job.batch_size : (b + 1) * job.batch_size]
        vectors = encoder.encode([text for _, text in batch])
        if vectors.shape != (len(batch), encoder.dim):
            raise ExportError(
                f"encoder returned shape {vectors.shape}, expected ({len(batch)}, {encoder.dim})"
            )
        entries.extend((key, vectors[i]) for i, (key, _) in enumerate(batch))
        log.info("batch %d/%d: embedded %d texts", b + 1, n_batches, len(batch))

    out_path = Path(job.output_path)
    buf = io.BytesIO()
    write_emb1(buf, encoder.dim, entries)
    _atomic_write(out_path, buf.getvalue())

    corpus_sha = hashlib.sha256(Path(job.corpus_path).read_bytes()).hexdigest()
    metadata = {
        "model": encoder.resolved_name,
        "dim": encoder.dim,
        "entries": len(entries),
        "dialogues": len(dialogues),
        "batch_size": job.batch_size,
        "corpus_sha256": corpus_sha,
        "format": "EMB1",
    }
    meta_path = out_path.with_name(out_path.name + ".meta.json")
    _atomic_write(meta_path, (json.dumps(metadata, indent=2) + "\n").encode("utf-8"))
    log.info("wrote %s (%d vectors, dim %d) and %s",
             out_path, len(entries), encoder.dim, meta_path)
    return metadata
