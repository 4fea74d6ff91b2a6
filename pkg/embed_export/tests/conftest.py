import json

import pytest

_DIALOGUES = [
    {
        "dialogue_id": "fix-001",
        "tutor_id": "tut-1",
        "problem_statement": "Solve 2x + 1 = 7.",
        "solution": "x equals 3.",
        "messages": [
            {"index": 1, "role": "tutor", "text": "What do you subtract first?"},
            {"index": 2, "role": "student", "text": "Subtract 1 from both sides."},
            {"index": 3, "role": "tutor", "text": "Right, then divide by 2."},
        ],
    },
    {
        "dialogue_id": "fix-002",
        "tutor_id": "tut-2",
        "problem_statement": "What is 30% of 50?",
        "solution": "15",
        "messages": [
            {"index": 1, "role": "tutor", "text": "Convert the percent to a fraction."},
            {"index": 2, "role": "student", "text": ""},
            {"index": 3, "role": "tutor", "text": "Take your time."},
            {"index": 4, "role": "student", "text": "0.3 times 50 is 15."},
        ],
    },
]


@pytest.fixture()
def corpus_file(tmp_path):
    path = tmp_path / "corpus.jsonl"
    path.write_text(
        "".join(json.dumps(d) + "\n" for d in _DIALOGUES), encoding="utf-8"
    )
    return path
