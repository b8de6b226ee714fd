"""Context-vector model: embedding, disambiguation, unsupervised training,
and annotation-driven fine-tuning."""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .matcher import MatchIndex, detect_spans
from .tokenizer import tokenize

DEFAULT_DIMENSION = 300
DEFAULT_WINDOW = 9
DEFAULT_LEARNING_RATE = 0.01
DEFAULT_SIMILARITY_THRESHOLD = 0.3

STATUS_UNAMBIGUOUS = "unambiguous"
STATUS_DISAMBIGUATED = "disambiguated"
STATUS_REJECTED = "rejected"


@dataclass
class EntitySpan:
    start: int
    end: int
    token_range: tuple
    concept_id: str
    code: object  # CodeId, None while undecided
    confidence: float
    status: str
    surface: str = ""


@dataclass
class AnnotationExample:
    doc_id: str
    start: int
    end: int
    surface: str
    concept_id: str
    correct: bool
    annotator_id: str = ""


@dataclass
class ContextModel:
    dimension: int = DEFAULT_DIMENSION
    window: int = DEFAULT_WINDOW
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD
    learning_rate: float = DEFAULT_LEARNING_RATE
    seed: int = 0
    word_vectors: dict = field(default_factory=dict)
    concept_vectors: dict = field(default_factory=dict)
    concept_counts: dict = field(default_factory=dict)
    dictionary_hash: str = ""

    def word_vector(self, token, create=False):
        v = self.word_vectors.get(token)
        if v is None and create:
            v = _seeded_vector(token, self.seed, self.dimension)
            self.word_vectors[token] = v
        return v


def _seeded_vector(token, seed, dim):
    # Per-token deterministic seed, stable across processes.
    digest = hashlib.sha256(("%d:%s" % (seed, token)).encode()).digest()
    rng = np.random.RandomState(int.from_bytes(digest[:4], "big"))
    return rng.uniform(-0.5 / dim, 0.5 / dim, dim)


def _cosine(a, b):
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def embed_context(word_tokens, first, last, model, create=False):
    """Average word vector of up to `window` word tokens each side of the
    span, excluding the span itself. Zero vector when nothing is known."""
    w = model.window
    ctx_indices = list(range(max(0, first - w), first)) + list(
        range(last + 1, min(len(word_tokens), last + 1 + w))
    )
    vecs = []
    for i in ctx_indices:
        v = model.word_vector(word_tokens[i].normalized, create=create)
        if v is not None:
            vecs.append(v)
    if not vecs:
        return np.zeros(model.dimension)
    return np.mean(vecs, axis=0)


def disambiguate(candidate, context_vec, model):
    """Pick the concept whose vector is most cosine-similar to the context.

    Accepts at or above the similarity threshold; ties and the no-vector
    case fall back to the lexicographically smallest concept id, rejected
    unless the threshold is non-positive similarity-compatible.
    """
    best_id, best_sim = None, None
    for cid in candidate.concept_ids:  # already sorted
        vec = model.concept_vectors.get(cid)
        if vec is None:
            continue
        sim = _cosine(vec, context_vec)
        if best_sim is None or sim > best_sim:
            best_id, best_sim = cid, sim
    if best_id is None:
        # No concept has a learned vector: nothing to compare against.
        best_id, best_sim = candidate.concept_ids[0], 0.0
        status = STATUS_REJECTED
    else:
        status = (
            STATUS_DISAMBIGUATED if best_sim >= model.similarity_threshold else STATUS_REJECTED
        )
    return EntitySpan(
        start=candidate.start,
        end=candidate.end,
        token_range=(candidate.first_token, candidate.last_token),
        concept_id=best_id,
        code=None,
        confidence=(best_sim + 1.0) / 2.0,
        status=status,
    )


def annotate_document(text, dictionary, model=None, index=None):
    """Tokenize, detect, disambiguate; accepted spans sorted by offset."""
    tokens = tokenize(text)
    word_tokens = [t for t in tokens if t.is_word]
    candidates = detect_spans(tokens, dictionary, index=index)
    accepted = []
    for cand in candidates:
        if not cand.ambiguous:
            span = EntitySpan(
                start=cand.start,
                end=cand.end,
                token_range=(cand.first_token, cand.last_token),
                concept_id=cand.concept_ids[0],
                code=None,
                confidence=1.0,
                status=STATUS_UNAMBIGUOUS,
            )
        else:
            if model is None:
                continue
            ctx = embed_context(word_tokens, cand.first_token, cand.last_token, model)
            span = disambiguate(cand, ctx, model)
            if span.status == STATUS_REJECTED:
                continue
        span.surface = text[span.start : span.end]
        accepted.append(span)
    accepted.sort(key=lambda s: s.start)
    return accepted


def _update_concept(model, concept_id, ctx):
    count = model.concept_counts.get(concept_id, 0) + 1
    model.concept_counts[concept_id] = count
    eta = 1.0 / count  # inverse-count decay: running mean of contexts
    old = model.concept_vectors.get(concept_id)
    if old is None:
        old = np.zeros(model.dimension)
    model.concept_vectors[concept_id] = (1.0 - eta) * old + eta * ctx


def train_unsupervised(corpus, dictionary, model):
    """Self-supervised pass: every unambiguous detection pulls its concept
    vector toward the span's context embedding; word vectors drift toward
    their own window contexts at the configured learning rate."""
    index = MatchIndex(dictionary)
    lr = model.learning_rate
    for text in corpus:
        tokens = tokenize(text)
        word_tokens = [t for t in tokens if t.is_word]
        for t in word_tokens:
            model.word_vector(t.normalized, create=True)
        for cand in detect_spans(tokens, dictionary, index=index):
            if cand.ambiguous:
                continue
            ctx = embed_context(word_tokens, cand.first_token, cand.last_token, model)
            _update_concept(model, cand.concept_ids[0], ctx)
        for i, t in enumerate(word_tokens):
            ctx = embed_context(word_tokens, i, i, model)
            if np.any(ctx):
                w = model.word_vectors[t.normalized]
                model.word_vectors[t.normalized] = (1.0 - lr) * w + lr * ctx
    return model


@dataclass
class FineTuneMetrics:
    precision: float
    recall: float
    f1: float
    n_train: int
    n_test: int
    rejected: list = field(default_factory=list)


def fine_tune(annotations, dictionary, model, documents, seed=0, test_fraction=0.2):
    """Update dictionary and vectors from human marks; score on a held-out
    split.

    correct=True adds the surface as a synonym and pulls the concept vector
    toward the annotation's context; correct=False pushes it away.
    Annotations naming unknown concepts are reported and skipped.
    """
    valid, rejected = [], []
    for ann in annotations:
        if ann.concept_id in dictionary.by_id and ann.doc_id in documents:
            valid.append(ann)
        else:
            rejected.append(ann)

    rng = np.random.RandomState(seed)
    order = rng.permutation(len(valid))
    n_test = int(round(len(valid) * test_fraction))
    test = [valid[i] for i in order[:n_test]]
    train = [valid[i] for i in order[n_test:]]

    for ann in train:
        tokens = tokenize(documents[ann.doc_id])
        word_tokens = [t for t in tokens if t.is_word]
        covered = [
            i for i, t in enumerate(word_tokens) if t.start >= ann.start and t.end <= ann.end
        ]
        if not covered:
            continue
        first, last = covered[0], covered[-1]
        ctx = embed_context(word_tokens, first, last, model, create=True)
        if ann.correct:
            dictionary.add_synonym(ann.concept_id, ann.surface)
            _update_concept(model, ann.concept_id, ctx)
        else:
            old = model.concept_vectors.get(ann.concept_id)
            if old is not None and np.any(ctx):
                model.concept_vectors[ann.concept_id] = old - model.learning_rate * ctx

    tp = fp = fn = 0
    index = MatchIndex(dictionary)
    for ann in test:
        spans = annotate_document(documents[ann.doc_id], dictionary, model, index=index)
        hit = any(
            s.concept_id == ann.concept_id and s.start < ann.end and ann.start < s.end
            for s in spans
        )
        if ann.correct and hit:
            tp += 1
        elif ann.correct and not hit:
            fn += 1
        elif not ann.correct and hit:
            fp += 1
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    metrics = FineTuneMetrics(precision, recall, f1, len(train), len(test), rejected)
    return dictionary, model, metrics


def save_model(model, path):
    """Persist to a JSON container; save -> load -> save is byte-identical."""
    payload = {
        "dimension": model.dimension,
        "window": model.window,
        "similarity_threshold": model.similarity_threshold,
        "learning_rate": model.learning_rate,
        "seed": model.seed,
        "dictionary_hash": model.dictionary_hash,
        "word_vectors": {k: list(v) for k, v in model.word_vectors.items()},
        "concept_vectors": {k: list(v) for k, v in model.concept_vectors.items()},
        "concept_counts": model.concept_counts,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, separators=(",", ":"))


def load_model(path):
    with open(path, encoding="utf-8") as f:
        payload = json.load(f)
    return ContextModel(
        dimension=payload["dimension"],
        window=payload["window"],
        similarity_threshold=payload["similarity_threshold"],
        learning_rate=payload["learning_rate"],
        seed=payload["seed"],
        dictionary_hash=payload["dictionary_hash"],
        word_vectors={k: np.array(v) for k, v in payload["word_vectors"].items()},
        concept_vectors={k: np.array(v) for k, v in payload["concept_vectors"].items()},
        concept_counts={k: int(v) for k, v in payload["concept_counts"].items()},
    )
