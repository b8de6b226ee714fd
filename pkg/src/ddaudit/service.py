"""Human-in-the-loop validation service: sampled validation tasks,
correct/incorrect marks, inter-annotator agreement, exclusion list, and
annotation export for fine-tuning."""

import random
from dataclasses import dataclass, field

from . import stats
from .audit import A_NP, P_A, P_NA
from .nerl import AnnotationExample

MARK_CORRECT = "correct"
MARK_INCORRECT = "incorrect"
MARK_SKIPPED = "skipped"
MARKS = (MARK_CORRECT, MARK_INCORRECT, MARK_SKIPPED)

DATASETS = (P_A, P_NA, "A_NP-review")


class ServiceError(ValueError):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class ValidationTask:
    task_id: str
    dataset: str
    admission_id: str
    code: object
    concept_id: str
    excerpt: str
    span_start: object = None
    span_end: object = None
    span_text: str = ""


@dataclass
class ValidationSession:
    session_id: str
    annotator_id: str
    dataset: str
    tasks: list
    marks: dict = field(default_factory=dict)  # task_id -> mark
    added_annotations: list = field(default_factory=list)
    finalized: bool = False

    def task_ids(self):
        return {t.task_id for t in self.tasks}


class AnnotationService:
    """In-memory service state for one audit run.

    partition records plus per-admission DD excerpts come from the
    pipeline; concept_of maps a code to the concept id that predicted it.
    """

    def __init__(self, records, excerpts, concept_of=None):
        self.records = records
        self.excerpts = excerpts  # admission_id -> DD body
        self.concept_of = concept_of or {}
        self.sessions = {}
        self._next_session = 1

    def _dataset_records(self, dataset):
        if dataset not in DATASETS:
            raise ServiceError("bad_dataset", "unknown dataset %r" % dataset)
        bucket = A_NP if dataset == "A_NP-review" else dataset
        return [r for r in self.records if r.bucket == bucket]

    def create_session(self, dataset, annotator_id, per_code_cap=10, seed=0):
        """Up to per_code_cap uniformly sampled records per code,
        deterministic under the seed."""
        rng = random.Random(seed)
        by_code = {}
        for r in self._dataset_records(dataset):
            by_code.setdefault(r.code, []).append(r)
        tasks = []
        session_id = str(self._next_session)
        self._next_session += 1
        for code in sorted(by_code, key=lambda c: c.canonical):
            recs = sorted(by_code[code], key=lambda r: r.admission_id)
            sample = recs if len(recs) <= per_code_cap else rng.sample(recs, per_code_cap)
            sample.sort(key=lambda r: r.admission_id)
            for r in sample:
                excerpt = self.excerpts.get(r.admission_id, "")
                span = min(r.spans, key=lambda s: s.start) if r.spans else None
                tasks.append(
                    ValidationTask(
                        task_id="%s-%s-%s" % (dataset, code.canonical, r.admission_id),
                        dataset=dataset,
                        admission_id=r.admission_id,
                        code=code,
                        concept_id=self.concept_of.get(code, ""),
                        excerpt=excerpt,
                        span_start=span.start if span else None,
                        span_end=span.end if span else None,
                        span_text=span.surface if span else "",
                    )
                )
        session = ValidationSession(session_id, annotator_id, dataset, tasks)
        self.sessions[session_id] = session
        return session

    def _session(self, session_id):
        session = self.sessions.get(session_id)
        if session is None:
            raise ServiceError("unknown_session", "no session %r" % session_id)
        return session

    def submit_mark(self, session_id, task_id, mark):
        session = self._session(session_id)
        if session.finalized:
            raise ServiceError("finalized", "session %s is finalized" % session_id)
        if mark not in MARKS:
            raise ServiceError("bad_mark", "mark must be one of %r" % (MARKS,))
        if task_id not in session.task_ids():
            raise ServiceError("unknown_task", "task %r not in session" % task_id)
        session.marks[task_id] = mark  # last write wins until finalization
        return session

    def add_annotation(self, session_id, annotation):
        session = self._session(session_id)
        if session.finalized:
            raise ServiceError("finalized", "session %s is finalized" % session_id)
        session.added_annotations.append(annotation)
        return session

    def finalize(self, session_id):
        self._session(session_id).finalized = True

    def agreement(self, id_a, id_b):
        """Cohen's kappa over jointly non-skipped tasks plus each session's
        fraction marked correct."""
        a, b = self._session(id_a), self._session(id_b)
        if not (a.finalized and b.finalized):
            raise ServiceError("not_finalized", "both sessions must be finalized")
        shared = a.task_ids() & b.task_ids()
        if not shared:
            raise ServiceError("disjoint_tasks", "sessions share no tasks")
        paired = [
            (a.marks[t] == MARK_CORRECT, b.marks[t] == MARK_CORRECT)
            for t in sorted(shared)
            if a.marks.get(t, MARK_SKIPPED) != MARK_SKIPPED
            and b.marks.get(t, MARK_SKIPPED) != MARK_SKIPPED
        ]
        if not paired:
            raise ServiceError("no_joint_marks", "no jointly non-skipped tasks")
        kappa = stats.cohens_kappa([x for x, _ in paired], [y for _, y in paired])

        def pct(session):
            marked = [m for m in session.marks.values() if m != MARK_SKIPPED]
            return sum(m == MARK_CORRECT for m in marked) / len(marked) if marked else 0.0

        return kappa, pct(a), pct(b)

    def failing_codes(self, threshold=0.5, datasets=(P_A, P_NA)):
        """Codes whose pooled fraction-correct over finalized sessions falls
        below the threshold; codes sampled but never marked fail too."""
        tallies = {}
        for session in self.sessions.values():
            if not session.finalized:
                continue
            for task in session.tasks:
                if task.dataset not in datasets:
                    continue
                correct, total = tallies.get(task.code, (0, 0))
                mark = session.marks.get(task.task_id, MARK_SKIPPED)
                if mark == MARK_SKIPPED:
                    tallies.setdefault(task.code, (correct, total))
                    continue
                tallies[task.code] = (correct + (mark == MARK_CORRECT), total + 1)
        failing, unvalidated = set(), set()
        for code, (correct, total) in tallies.items():
            if total == 0:
                failing.add(code)
                unvalidated.add(code)
            elif correct / total < threshold:
                failing.add(code)
        return failing, unvalidated

    def export_annotations(self):
        """Marks and added spans as fine-tuning examples, in a stable order."""
        out = []
        for sid in sorted(self.sessions, key=int):
            session = self.sessions[sid]
            if not session.finalized:
                continue
            for task in session.tasks:
                mark = session.marks.get(task.task_id, MARK_SKIPPED)
                if mark == MARK_SKIPPED or task.span_start is None:
                    continue
                out.append(
                    AnnotationExample(
                        doc_id=task.admission_id,
                        start=task.span_start,
                        end=task.span_end,
                        surface=task.span_text,
                        concept_id=task.concept_id,
                        correct=mark == MARK_CORRECT,
                        annotator_id=session.annotator_id,
                    )
                )
            out.extend(session.added_annotations)
        return out
