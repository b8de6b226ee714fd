from .tokenizer import Token, tokenize
from .matcher import KERNEL, Candidate, MatchIndex, detect_spans
from .context import (
    AnnotationExample,
    ContextModel,
    EntitySpan,
    FineTuneMetrics,
    annotate_document,
    disambiguate,
    embed_context,
    fine_tune,
    load_model,
    save_model,
    train_unsupervised,
)

__all__ = [
    "Token",
    "tokenize",
    "KERNEL",
    "Candidate",
    "MatchIndex",
    "detect_spans",
    "AnnotationExample",
    "ContextModel",
    "EntitySpan",
    "FineTuneMetrics",
    "annotate_document",
    "disambiguate",
    "embed_context",
    "fine_tune",
    "load_model",
    "save_model",
    "train_unsupervised",
]
