"""Batch embedding exporter for dialogue corpora (EMB1 store output)."""

from .corpus import DialogueTexts, read_corpus, text_items
from .emb1 import read_emb1, write_emb1
from .encoders import DEFAULT_MODEL, DebugHashEncoder, load_encoder
from .errors import CorpusSchemaError, ExportError, ModelLoadError
from .export import ExportJob, export

__version__ = "0.1.0"

__all__ = [
    "CorpusSchemaError",
    "DEFAULT_MODEL",
    "DebugHashEncoder",
    "DialogueTexts",
    "ExportError",
    "ExportJob",
    "ModelLoadError",
    "export",
    "load_encoder",
    "read_corpus",
    "read_emb1",
    "text_items",
    "write_emb1",
    "__version__",
]
