"""Reader for the shared corpus JSONL schema.

One JSON object per line:
``{"dialogue_id", "tutor_id", "problem_statement", "solution",
"messages": [{"index", "role", "text"}, ...]}``; blank lines ignored.
Only what the exporter needs is kept: ids and the embeddable texts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusSchemaError

# key segments joined by the unit separator, matching the store format:
# anchors have no index segment, messages do
KEY_SEP = "\x1f"
ROLES = ("tutor", "student")


@dataclass(frozen=True)
class DialogueTexts:
    dialogue_id: str
    problem_statement: str
    solution: str
    messages: tuple[tuple[int, str], ...]  # (index, text), index order


def _require(obj: dict, field: str, kind: type, line_no: int):
    if field not in obj:
        raise CorpusSchemaError(f"line {line_no}: missing field {field!r}")
    value = obj[field]
    if not isinstance(value, kind):
        raise CorpusSchemaError(
            f"line {line_no}: field {field!r} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def read_corpus(path: str | Path) -> list[DialogueTexts]:
    path = Path(path)
    if not path.is_file():
        raise CorpusSchemaError(f"corpus file not found: {path}")
    dialogues: list[DialogueTexts] = []
    seen_ids: set[str] = set()
    for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusSchemaError(f"line {line_no}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise CorpusSchemaError(f"line {line_no}: expected a JSON object")

        dialogue_id = _require(obj, "dialogue_id", str, line_no)
        _require(obj, "tutor_id", str, line_no)
        problem = _require(obj, "problem_statement", str, line_no)
        solution = _require(obj, "solution", str, line_no)
        raw_messages = _require(obj, "messages", list, line_no)

        if dialogue_id in seen_ids:
            raise CorpusSchemaError(f"line {line_no}: duplicate dialogue_id {dialogue_id!r}")
        if KEY_SEP in dialogue_id:
            raise CorpusSchemaError(f"line {line_no}: dialogue_id contains reserved byte 0x1f")
        seen_ids.add(dialogue_id)

        messages = []
        seen_idx: set[int] = set()
        for m in raw_messages:
            if not isinstance(m, dict):
                raise CorpusSchemaError(f"line {line_no}: message entries must be objects")
            index = _require(m, "index", int, line_no)
            role = _require(m, "role", str, line_no)
            text = _require(m, "text", str, line_no)
            if role not in ROLES:
                raise CorpusSchemaError(f"line {line_no}: unknown role {role!r}")
            if index in seen_idx:
                raise CorpusSchemaError(f"line {line_no}: duplicate message index {index}")
            seen_idx.add(index)
            messages.append((index, text))
        messages.sort(key=lambda pair: pair[0])

        dialogues.append(
            DialogueTexts(
                dialogue_id=dialogue_id,
                problem_statement=problem,
                solution=solution,
                messages=tuple(messages),
            )
        )
    if not dialogues:
        raise CorpusSchemaError(f"corpus is empty: {path}")
    return dialogues


def text_items(dialogues: list[DialogueTexts]) -> list[tuple[str, str]]:
    """(key, text) for every embeddable text, in corpus order.

    Per dialogue: problem anchor, solution anchor, then messages.  Key
    format is the store contract: ``kind<US>dialogue_id[<US>index]``.
    """
    items: list[tuple[str, str]] = []
    for d in dialogues:
        items.append((f"problem{KEY_SEP}{d.dialogue_id}", d.problem_statement))
        items.append((f"solution{KEY_SEP}{d.dialogue_id}", d.solution))
        for index, text in d.messages:
            items.append((f"message{KEY_SEP}{d.dialogue_id}{KEY_SEP}{index}", text))
    return items
