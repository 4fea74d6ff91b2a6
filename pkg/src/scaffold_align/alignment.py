"""Per-message alignment records: the table every analysis consumes.

Each message becomes one row carrying its role, temporal position,
length, and cosine alignments to the dialogue's two task anchors (the
problem statement and the reference solution), plus the per-dialogue
problem-to-solution baseline.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._threads import resolve_threads
from .corpus import Corpus, Dialogue, relative_position
from .embedding import EmbeddingStore, TextKey, cosine_similarity
from .errors import CorpusError

ANCHORS = ("problem", "solution")

CSV_HEADER = [
    "dialogue_id",
    "tutor_id",
    "index",
    "role",
    "rel_position",
    "msg_length",
    "sim_problem",
    "sim_solution",
    "qs_baseline",
]


@dataclass(frozen=True)
class AlignmentRecord:
    """One message joined with its temporal and semantic features."""

    dialogue_id: str
    tutor_id: str
    index: int
    role: str
    rel_position: float
    msg_length: int
    sim_problem: float
    sim_solution: float
    qs_baseline: float


@dataclass(frozen=True)
class DensityHistogram:
    """Equal-width density histogram of one similarity column."""

    edges: np.ndarray        # bins + 1 ascending edges
    counts: np.ndarray       # raw counts per bin
    densities: np.ndarray    # counts / (total * bin_width)
    anchor: str
    role: str


def _require_vector(store: EmbeddingStore, key: TextKey) -> np.ndarray:
    return store.get(key)  # raises MissingKeyError when absent


def _dialogue_records(dialogue: Dialogue, store: EmbeddingStore) -> list[AlignmentRecord]:
    problem_vec = _require_vector(store, TextKey("problem", dialogue.dialogue_id))
    solution_vec = _require_vector(store, TextKey("solution", dialogue.dialogue_id))
    qs_baseline = cosine_similarity(problem_vec, solution_vec)
    total = dialogue.n_messages
    records = []
    for message in dialogue.messages:
        msg_vec = _require_vector(store, TextKey("message", dialogue.dialogue_id, message.index))
        records.append(
            AlignmentRecord(
                dialogue_id=dialogue.dialogue_id,
                tutor_id=dialogue.tutor_id,
                index=message.index,
                role=message.role,
                rel_position=relative_position(message.index, total),
                msg_length=len(message.text),
                sim_problem=cosine_similarity(msg_vec, problem_vec),
                sim_solution=cosine_similarity(msg_vec, solution_vec),
                qs_baseline=qs_baseline,
            )
        )
    return records


def compute_alignment(corpus: Corpus, store: EmbeddingStore, threads: int | None = None) -> list[AlignmentRecord]:
    """One record per message, in corpus order.

    Dialogues may be processed on a thread pool (capped by
    ``SCAFFOLD_ALIGN_THREADS``); the output order is the corpus order
    regardless of schedule.
    """
    workers = resolve_threads(default=threads if threads is not None else 1)
    dialogues = list(corpus)
    if workers > 1 and len(dialogues) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_dialogue = list(pool.map(lambda d: _dialogue_records(d, store), dialogues))
    else:
        per_dialogue = [_dialogue_records(d, store) for d in dialogues]
    return [record for chunk in per_dialogue for record in chunk]


def similarity_column(records: Sequence[AlignmentRecord], anchor: str) -> np.ndarray:
    if anchor not in ANCHORS:
        raise ValueError(f"anchor must be one of {ANCHORS}, got {anchor!r}")
    field = "sim_problem" if anchor == "problem" else "sim_solution"
    return np.array([getattr(r, field) for r in records], dtype=np.float64)


def role_density(
    records: Sequence[AlignmentRecord],
    anchor: str,
    role: str,
    bins: int = 50,
    value_range: tuple[float, float] = (-0.2, 1.0),
) -> DensityHistogram:
    """Density histogram of one anchor's similarity for one role.

    Out-of-range values are clamped into the edge bins so every record
    counts; densities therefore integrate to exactly 1.
    """
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    low, high = value_range
    if not low < high:
        raise ValueError(f"range low must be < high, got {value_range}")
    subset = [r for r in records if r.role == role]
    if not subset:
        raise CorpusError(f"no records with role {role!r}")
    values = np.clip(similarity_column(subset, anchor), low, high)
    counts, edges = np.histogram(values, bins=bins, range=(low, high))
    width = (high - low) / bins
    densities = counts / (len(subset) * width)
    return DensityHistogram(edges=edges, counts=counts, densities=densities, anchor=anchor, role=role)


def _format_float(x: float) -> str:
    return f"{x:.9g}"


def write_records_csv(records: Iterable[AlignmentRecord], sink) -> None:
    """Write records as CSV; floats carry 9 significant digits."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            write_records_csv(records, fh)
        return
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.dialogue_id,
                r.tutor_id,
                r.index,
                r.role,
                _format_float(r.rel_position),
                r.msg_length,
                _format_float(r.sim_problem),
                _format_float(r.sim_solution),
                _format_float(r.qs_baseline),
            ]
        )


def records_csv_text(records: Iterable[AlignmentRecord]) -> str:
    buf = io.StringIO()
    write_records_csv(records, buf)
    return buf.getvalue()


def write_density_csv(hist: DensityHistogram, sink) -> None:
    """Write a density histogram as a plot-ready CSV."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            write_density_csv(hist, fh)
        return
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["bin_left", "bin_right", "count", "density"])
    for i in range(len(hist.counts)):
        writer.writerow(
            [
                _format_float(float(hist.edges[i])),
                _format_float(float(hist.edges[i + 1])),
                int(hist.counts[i]),
                _format_float(float(hist.densities[i])),
            ]
        )


def read_records_csv(source) -> list[AlignmentRecord]:
    """Parse a records CSV produced by :func:`write_records_csv`."""
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return read_records_csv(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise CorpusError(f"unexpected records CSV header: {header}")
    records = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise CorpusError(f"records CSV row has {len(row)} fields, expected {len(CSV_HEADER)}")
        records.append(
            AlignmentRecord(
                dialogue_id=row[0],
                tutor_id=row[1],
                index=int(row[2]),
                role=row[3],
                rel_position=float(row[4]),
                msg_length=int(row[5]),
                sim_problem=float(row[6]),
                sim_solution=float(row[7]),
                qs_baseline=float(row[8]),
            )
        )
    return records
