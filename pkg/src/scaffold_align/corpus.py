"""Question-anchored dialogue corpora: parsing, validation, summaries.

A corpus is a UTF-8 JSONL file, one dialogue per line:

    {"dialogue_id": str, "tutor_id": str, "problem_statement": str,
     "solution": str, "messages": [{"index": int, "role": "tutor"|"student",
     "text": str}, ...]}

Blank lines are ignored.  Parsing is all-or-nothing: any malformed line
rejects the whole input with its line number.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import CorpusError, CorpusParseError

ROLES = ("tutor", "student")

_REQUIRED_DIALOGUE_FIELDS = ("dialogue_id", "tutor_id", "problem_statement", "solution", "messages")
_REQUIRED_MESSAGE_FIELDS = ("index", "role", "text")


@dataclass(frozen=True)
class Message:
    """One turn of a dialogue; ``index`` is the 1-based rank within it."""

    index: int
    role: str
    text: str


@dataclass(frozen=True)
class Dialogue:
    """One tutoring session anchored to a single problem."""

    dialogue_id: str
    tutor_id: str
    problem_statement: str
    solution: str
    messages: tuple[Message, ...]

    @property
    def n_messages(self) -> int:
        return len(self.messages)


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of dialogues with unique ids."""

    dialogues: tuple[Dialogue, ...]

    def __len__(self) -> int:
        return len(self.dialogues)

    def __iter__(self) -> Iterator[Dialogue]:
        return iter(self.dialogues)

    @property
    def message_count(self) -> int:
        return sum(d.n_messages for d in self.dialogues)

    def tutor_ids(self) -> list[str]:
        """Unique tutor ids in first-appearance order."""
        seen: dict[str, None] = {}
        for d in self.dialogues:
            seen.setdefault(d.tutor_id, None)
        return list(seen)


@dataclass(frozen=True)
class CorpusSummary:
    """Descriptive statistics over a corpus (see ``summarize``)."""

    dialogue_count: int
    message_count: int
    tutor_message_share: float
    messages_per_dialogue: dict[str, float]
    message_length_chars: dict[str, float]
    problems_per_tutor_mean: float

    def to_dict(self) -> dict:
        return {
            "dialogue_count": self.dialogue_count,
            "message_count": self.message_count,
            "tutor_message_share": self.tutor_message_share,
            "messages_per_dialogue": dict(self.messages_per_dialogue),
            "message_length_chars": dict(self.message_length_chars),
            "problems_per_tutor_mean": self.problems_per_tutor_mean,
        }


def relative_position(n: int, total: int) -> float:
    """Progression of message ``n`` within a dialogue of ``total`` messages.

    Returns n/total in (0, 1]; the last message always maps to 1.0.
    """
    if total < 1:
        raise ValueError(f"total messages must be >= 1, got {total}")
    if not 1 <= n <= total:
        raise ValueError(f"sequence rank {n} outside 1..{total}")
    return n / total


def _parse_message(obj: dict, lineno: int, pos: int) -> Message:
    if not isinstance(obj, dict):
        raise CorpusParseError(lineno, f"message {pos} is not an object")
    for key in _REQUIRED_MESSAGE_FIELDS:
        if key not in obj:
            raise CorpusParseError(lineno, f"message {pos} missing field {key!r}")
    index, role, text = obj["index"], obj["role"], obj["text"]
    if not isinstance(index, int) or isinstance(index, bool):
        raise CorpusParseError(lineno, f"message {pos} field 'index' must be an integer")
    if role not in ROLES:
        raise CorpusParseError(lineno, f"message {pos} has unknown role {role!r}")
    if not isinstance(text, str):
        raise CorpusParseError(lineno, f"message {pos} field 'text' must be a string")
    return Message(index=index, role=role, text=text)


def _parse_dialogue(line: str, lineno: int) -> Dialogue:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusParseError(lineno, f"malformed JSON: {exc.msg}") from exc
    if not isinstance(obj, dict):
        raise CorpusParseError(lineno, "record is not a JSON object")
    for key in _REQUIRED_DIALOGUE_FIELDS:
        if key not in obj:
            raise CorpusParseError(lineno, f"missing field {key!r}")
    for key in ("dialogue_id", "tutor_id", "problem_statement", "solution"):
        if not isinstance(obj[key], str):
            raise CorpusParseError(lineno, f"field {key!r} must be a string")
    if not obj["problem_statement"]:
        raise CorpusParseError(lineno, "field 'problem_statement' must be non-empty")
    if not obj["solution"]:
        raise CorpusParseError(lineno, "field 'solution' must be non-empty")
    raw_messages = obj["messages"]
    if not isinstance(raw_messages, list) or not raw_messages:
        raise CorpusParseError(lineno, "field 'messages' must be a non-empty array")
    messages = tuple(_parse_message(m, lineno, i + 1) for i, m in enumerate(raw_messages))
    indices = [m.index for m in messages]
    if indices != list(range(1, len(messages) + 1)):
        raise CorpusParseError(
            lineno,
            f"message indices must be exactly 1..{len(messages)} in order, got {indices}",
        )
    return Dialogue(
        dialogue_id=obj["dialogue_id"],
        tutor_id=obj["tutor_id"],
        problem_statement=obj["problem_statement"],
        solution=obj["solution"],
        messages=messages,
    )


def parse_corpus(source: str | bytes | IO[str] | IO[bytes] | Iterable[str]) -> Corpus:
    """Parse a JSONL corpus from a string, bytes, or line iterable.

    Input order is preserved.  The whole input is rejected on the first
    malformed line, duplicate dialogue_id, or broken message numbering.
    """
    if isinstance(source, bytes):
        lines: Iterable[str] = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        lines = io.StringIO(source)
    else:
        lines = source  # file object or iterable of lines; bytes lines are decoded below

    dialogues: list[Dialogue] = []
    seen_ids: set[str] = set()
    for lineno, line in enumerate(lines, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        if not line.strip():
            continue
        dialogue = _parse_dialogue(line, lineno)
        if dialogue.dialogue_id in seen_ids:
            raise CorpusParseError(lineno, f"duplicate dialogue_id {dialogue.dialogue_id!r}")
        seen_ids.add(dialogue.dialogue_id)
        dialogues.append(dialogue)
    return Corpus(dialogues=tuple(dialogues))


def load_corpus(path: str | Path) -> Corpus:
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_corpus(fh)


def serialize_corpus(corpus: Corpus) -> str:
    """Render a corpus back to canonical JSONL (stable key order)."""
    out = []
    for d in corpus.dialogues:
        obj = {
            "dialogue_id": d.dialogue_id,
            "tutor_id": d.tutor_id,
            "problem_statement": d.problem_statement,
            "solution": d.solution,
            "messages": [{"index": m.index, "role": m.role, "text": m.text} for m in d.messages],
        }
        out.append(json.dumps(obj, ensure_ascii=False))
    return "\n".join(out) + ("\n" if out else "")


def validate_corpus(corpus: Corpus) -> list[str]:
    """Return human-readable warnings for legal-but-suspect content.

    Empty message text is allowed by the schema but worth surfacing: its
    embedding is the zero vector and its similarities are pinned to 0.
    """
    warnings = []
    for d in corpus.dialogues:
        for m in d.messages:
            if not m.text:
                warnings.append(f"dialogue {d.dialogue_id!r} message {m.index}: empty text")
    return warnings


def filter_min_messages(corpus: Corpus, min_messages: int) -> Corpus:
    """Keep only dialogues with at least ``min_messages`` messages."""
    if min_messages <= 1:
        return corpus
    return Corpus(dialogues=tuple(d for d in corpus.dialogues if d.n_messages >= min_messages))


def _median_low(values: list) -> float:
    """Median using the lower-middle element for even counts."""
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _mean(values: list) -> float:
    return sum(values) / len(values)


def _population_sd(values: list) -> float:
    mu = _mean(values)
    return math.sqrt(sum((v - mu) ** 2 for v in values) / len(values))


def summarize(corpus: Corpus) -> CorpusSummary:
    """Descriptive statistics over all dialogues and messages.

    Message length counts Unicode scalar values (``len`` of the text);
    medians use the lower-middle element for even counts; the length SD
    is the population SD (divisor n), matching the standardization
    convention used by the modeling layer.
    """
    if not corpus.dialogues:
        raise CorpusError("cannot summarize an empty corpus")
    counts = [d.n_messages for d in corpus.dialogues]
    lengths = []
    tutor_messages = 0
    for d in corpus.dialogues:
        for m in d.messages:
            lengths.append(len(m.text))
            if m.role == "tutor":
                tutor_messages += 1
    total = sum(counts)
    return CorpusSummary(
        dialogue_count=len(corpus.dialogues),
        message_count=total,
        tutor_message_share=tutor_messages / total,
        messages_per_dialogue={
            "mean": _mean(counts),
            "median": _median_low(counts),
            "min": min(counts),
            "max": max(counts),
        },
        message_length_chars={
            "mean": _mean(lengths),
            "median": _median_low(lengths),
            "sd": _population_sd(lengths),
        },
        problems_per_tutor_mean=len(corpus.dialogues) / len(corpus.tutor_ids()),
    )
