"""Exporter error types, each mapped to a process exit code."""


class ExportError(Exception):
    exit_code = 1


class CorpusSchemaError(ExportError):
    """Corpus line violates the shared JSONL schema."""

    exit_code = 2


class ModelLoadError(ExportError):
    """Encoder backend missing or the named model cannot be loaded."""

    exit_code = 3
