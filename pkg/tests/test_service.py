import pytest
from fastapi.testclient import TestClient

from ddaudit.audit import PartitionRecord
from ddaudit.icd9 import parse_code
from ddaudit.nerl import AnnotationExample, EntitySpan
from ddaudit.service import (
    MARK_CORRECT,
    MARK_INCORRECT,
    MARK_SKIPPED,
    AnnotationService,
    ServiceError,
)
from ddaudit.webapp import create_app

A, B, C = (parse_code(x) for x in ["4019", "4280", "0389"])


def span(start, end, text="htn"):
    return EntitySpan(start, end, (0, 0), "C_HTN", None, 1.0, "unambiguous", surface=text)


def make_service(n_per_code=15):
    records = []
    excerpts = {}
    for i in range(n_per_code):
        adm = "adm%03d" % i
        excerpts[adm] = "1. essential hypertension\n2. heart failure"
        records.append(PartitionRecord(adm, A, "P_A", [span(3, 25, "essential hypertension")]))
        records.append(PartitionRecord(adm, B, "P_NA", [span(29, 42, "heart failure")]))
        records.append(PartitionRecord(adm, C, "A_NP"))
    return AnnotationService(records, excerpts, concept_of={A: "C_HTN", B: "C_CHF"})


def test_create_session_caps_and_determinism():
    service = make_service()
    s1 = service.create_session("P_A", "ann1", per_code_cap=10, seed=42)
    assert len(s1.tasks) == 10  # 15 records capped at 10
    s2 = make_service().create_session("P_A", "ann1", per_code_cap=10, seed=42)
    assert [t.admission_id for t in s1.tasks] == [t.admission_id for t in s2.tasks]
    small = service.create_session("A_NP-review", "ann1", per_code_cap=20, seed=0)
    assert len(small.tasks) == 15  # only 15 exist
    assert all(t.span_start is None for t in small.tasks)


def test_session_sampling_never_exceeds_cap():
    service = make_service(30)
    for seed in range(5):
        s = service.create_session("P_NA", "a", per_code_cap=7, seed=seed)
        per_code = {}
        for t in s.tasks:
            per_code[t.code] = per_code.get(t.code, 0) + 1
        assert all(v <= 7 for v in per_code.values())


def test_marks_last_write_wins_and_finalize():
    service = make_service()
    s = service.create_session("P_A", "a", seed=1)
    tid = s.tasks[0].task_id
    service.submit_mark(s.session_id, tid, MARK_CORRECT)
    service.submit_mark(s.session_id, tid, MARK_INCORRECT)
    assert s.marks[tid] == MARK_INCORRECT
    service.finalize(s.session_id)
    with pytest.raises(ServiceError, match="finalized"):
        service.submit_mark(s.session_id, tid, MARK_CORRECT)
    with pytest.raises(ServiceError):
        service.submit_mark(s.session_id, "nope", MARK_CORRECT)


def _two_marked_sessions(service, disagree_on=2):
    a = service.create_session("P_A", "a", per_code_cap=10, seed=5)
    b = service.create_session("P_A", "b", per_code_cap=10, seed=5)
    for i, task in enumerate(a.tasks):
        service.submit_mark(a.session_id, task.task_id, MARK_CORRECT)
        mark = MARK_INCORRECT if i < disagree_on else MARK_CORRECT
        service.submit_mark(b.session_id, task.task_id, mark)
    service.finalize(a.session_id)
    service.finalize(b.session_id)
    return a, b


def test_agreement_symmetric_and_skips():
    service = make_service()
    a = service.create_session("P_A", "a", per_code_cap=10, seed=5)
    b = service.create_session("P_A", "b", per_code_cap=10, seed=5)
    marks = [MARK_CORRECT, MARK_INCORRECT, MARK_CORRECT, MARK_CORRECT, MARK_SKIPPED]
    for task, m in zip(a.tasks, marks * 2):
        service.submit_mark(a.session_id, task.task_id, m)
    for task in b.tasks:
        service.submit_mark(b.session_id, task.task_id, MARK_CORRECT)
    with pytest.raises(ServiceError, match="finalized"):
        service.agreement(a.session_id, b.session_id)
    service.finalize(a.session_id)
    service.finalize(b.session_id)
    k_ab, pa, pb = service.agreement(a.session_id, b.session_id)
    k_ba, pb2, pa2 = service.agreement(b.session_id, a.session_id)
    assert k_ab == pytest.approx(k_ba)
    assert (pa, pb) == (pa2, pb2)
    assert pb == 1.0
    assert pa == pytest.approx(6 / 8)  # skips excluded from percent-correct


def test_agreement_perfect():
    service = make_service()
    a, b = _two_marked_sessions(service, disagree_on=0)
    # identical marks but all-correct marginals -> p_e = 1, undefined
    from ddaudit.stats import UndefinedStatistic

    with pytest.raises(UndefinedStatistic):
        service.agreement(a.session_id, b.session_id)


def test_failing_codes():
    service = make_service()
    s = service.create_session("P_A", "a", per_code_cap=10, seed=0)
    for i, task in enumerate(s.tasks):
        mark = MARK_CORRECT if i < 2 else MARK_INCORRECT
        service.submit_mark(s.session_id, task.task_id, mark)
    service.finalize(s.session_id)
    failing, unvalidated = service.failing_codes(0.5)
    assert A in failing and not unvalidated
    # Monotone in threshold.
    f_low, _ = service.failing_codes(0.1)
    f_high, _ = service.failing_codes(0.9)
    assert f_low <= f_high

    # Sampled but entirely skipped -> failing with unvalidated flag.
    service2 = make_service()
    s2 = service2.create_session("P_NA", "a", per_code_cap=3, seed=0)
    for task in s2.tasks:
        service2.submit_mark(s2.session_id, task.task_id, MARK_SKIPPED)
    service2.finalize(s2.session_id)
    failing, unvalidated = service2.failing_codes()
    assert B in failing and B in unvalidated


def test_export_annotations():
    service = make_service()
    s = service.create_session("P_A", "a", per_code_cap=2, seed=0)
    service.submit_mark(s.session_id, s.tasks[0].task_id, MARK_CORRECT)
    service.submit_mark(s.session_id, s.tasks[1].task_id, MARK_SKIPPED)
    service.add_annotation(
        s.session_id,
        AnnotationExample("adm000", 3, 25, "essential hypertension", "C_HTN", True, "a"),
    )
    service.finalize(s.session_id)
    out = service.export_annotations()
    assert len(out) == 2  # one marked task + one added span; skip excluded
    assert out[0].correct is True
    assert out[0].doc_id == s.tasks[0].admission_id


def test_export_only_skips_is_empty():
    service = make_service()
    s = service.create_session("P_A", "a", per_code_cap=2, seed=0)
    for t in s.tasks:
        service.submit_mark(s.session_id, t.task_id, MARK_SKIPPED)
    service.finalize(s.session_id)
    assert service.export_annotations() == []


# --- wire API --------------------------------------------------------------


@pytest.fixture
def client():
    return TestClient(create_app(make_service()))


def test_api_session_flow(client):
    r = client.post(
        "/api/v1/sessions",
        json={"dataset": "P_A", "annotator_id": "a", "per_code_cap": 5, "seed": 1},
    )
    assert r.status_code == 200
    body = r.json()
    sid = body["session_id"]
    assert len(body["tasks"]) == 5
    task = body["tasks"][0]
    assert task["excerpt"][task["span_start"] : task["span_end"]] == task["span_text"]

    r = client.post("/api/v1/sessions/%s/marks" % sid, json={"task_id": task["task_id"], "mark": "correct"})
    assert r.json()["ok"] is True
    r = client.get("/api/v1/sessions/%s/tasks" % sid)
    assert r.json()["marks"][task["task_id"]] == "correct"

    r = client.post(
        "/api/v1/sessions/%s/annotations" % sid,
        json={
            "admission_id": "adm000",
            "span_start": 3,
            "span_end": 25,
            "span_text": "essential hypertension",
            "concept_id": "C_HTN",
            "correct": True,
        },
    )
    assert r.json()["ok"] is True
    assert client.post("/api/v1/sessions/%s/finalize" % sid).json()["ok"] is True
    r = client.post("/api/v1/sessions/%s/marks" % sid, json={"task_id": task["task_id"], "mark": "correct"})
    assert r.status_code == 400
    assert r.json()["error"] == "finalized"


def test_api_agreement_and_failing(client):
    ids = []
    for annotator in ("a", "b"):
        r = client.post(
            "/api/v1/sessions",
            json={"dataset": "P_A", "annotator_id": annotator, "per_code_cap": 10, "seed": 2},
        )
        body = r.json()
        ids.append(body["session_id"])
        for i, task in enumerate(body["tasks"]):
            mark = "incorrect" if (annotator == "b" and i < 3) or i >= 8 else "correct"
            client.post(
                "/api/v1/sessions/%s/marks" % body["session_id"],
                json={"task_id": task["task_id"], "mark": mark},
            )
        client.post("/api/v1/sessions/%s/finalize" % body["session_id"])
    r = client.get("/api/v1/agreement", params={"a": ids[0], "b": ids[1]})
    assert r.status_code == 200
    assert -1.0 <= r.json()["kappa"] <= 1.0
    r = client.get("/api/v1/failing-codes", params={"threshold": 0.95})
    assert "4019" in r.json()["failing"]


def test_api_document_endpoint(client):
    r = client.get("/api/v1/documents/adm000/dd")
    assert r.status_code == 200
    body = r.json()
    assert "hypertension" in body["excerpt"]
    assert body["spans"]
    assert client.get("/api/v1/documents/nope/dd").status_code == 400


def test_api_unknown_session(client):
    assert client.get("/api/v1/sessions/99/tasks").status_code == 404
