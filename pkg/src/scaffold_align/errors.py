"""Exception hierarchy shared across the package.

Each error family carries the process exit code the CLI maps it to, so
automation can rely on stable codes: 2 = bad input, 3 = embedding store,
4 = network, 5 = modeling.
"""


class ScaffoldAlignError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class CorpusError(ScaffoldAlignError):
    """Malformed or inconsistent corpus input."""

    exit_code = 2


class CorpusParseError(CorpusError):
    """A specific line of a JSONL corpus failed to parse or validate."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class StoreError(ScaffoldAlignError):
    """Embedding store is unreadable, inconsistent, or incomplete."""

    exit_code = 3


class MissingKeyError(StoreError):
    """A text key required by the corpus is absent from the store."""

    def __init__(self, kind: str, dialogue_id: str, index: int | None = None):
        where = f"{kind}, dialogue {dialogue_id!r}"
        if index is not None:
            where += f", message {index}"
        super().__init__(f"embedding store has no vector for ({where})")
        self.kind = kind
        self.dialogue_id = dialogue_id
        self.index = index


class EmbeddingHttpError(ScaffoldAlignError):
    """HTTP embedding provider failed after retries, or replied malformed."""

    exit_code = 4


class ModelingError(ScaffoldAlignError):
    """Model design or fitting failed (rank deficiency, degeneracy, ...)."""

    exit_code = 5


class DegenerateColumnError(ModelingError):
    """A design column has zero variance and cannot be standardized."""

    def __init__(self, column: str, message: str | None = None):
        super().__init__(message or f"predictor column {column!r} has zero variance")
        self.column = column
