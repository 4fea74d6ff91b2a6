"""scaffold-align: alignment trajectories and mixed-model inference for tutoring dialogues."""

from .alignment import (
    ANCHORS,
    CSV_HEADER,
    AlignmentRecord,
    DensityHistogram,
    compute_alignment,
    read_records_csv,
    role_density,
    similarity_column,
    write_density_csv,
    write_records_csv,
)
from .corpus import (
    Corpus,
    CorpusSummary,
    Dialogue,
    Message,
    filter_min_messages,
    load_corpus,
    parse_corpus,
    relative_position,
    serialize_corpus,
    summarize,
    validate_corpus,
)
from .embedding import (
    EmbeddingStore,
    HashingTextEmbedder,
    TextKey,
    build_store,
    corpus_text_items,
    cosine_similarity,
    deterministic_embed,
    http_embed,
    read_store,
    write_store,
)
from .errors import (
    CorpusError,
    CorpusParseError,
    DegenerateColumnError,
    EmbeddingHttpError,
    MissingKeyError,
    ModelingError,
    ScaffoldAlignError,
    StoreError,
)
from .temporal import (
    NadarayaWatsonRegressor,
    TrajectoryCurve,
    smooth_trajectory,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "ANCHORS",
    "CSV_HEADER",
    "AlignmentRecord",
    "Corpus",
    "CorpusError",
    "CorpusParseError",
    "CorpusSummary",
    "DegenerateColumnError",
    "DensityHistogram",
    "Dialogue",
    "EmbeddingHttpError",
    "EmbeddingStore",
    "HashingTextEmbedder",
    "Message",
    "MissingKeyError",
    "ModelingError",
    "NadarayaWatsonRegressor",
    "ScaffoldAlignError",
    "StoreError",
    "TextKey",
    "TrajectoryCurve",
    "build_store",
    "compute_alignment",
    "corpus_text_items",
    "cosine_similarity",
    "deterministic_embed",
    "filter_min_messages",
    "http_embed",
    "load_corpus",
    "parse_corpus",
    "read_records_csv",
    "read_store",
    "relative_position",
    "role_density",
    "serialize_corpus",
    "similarity_column",
    "smooth_trajectory",
    "summarize",
    "validate_corpus",
    "write_density_csv",
    "write_records_csv",
    "write_store",
    "write_trajectory_csv",
]
