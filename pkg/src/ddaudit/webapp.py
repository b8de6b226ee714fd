"""HTTP wire API (/api/v1) over the annotation service, plus static /ui."""

import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .nerl import AnnotationExample
from .service import AnnotationService, ServiceError


class CreateSessionBody(BaseModel):
    dataset: str
    annotator_id: str
    per_code_cap: int = 10
    seed: int = 0


class MarkBody(BaseModel):
    task_id: str
    mark: str


class AnnotationBody(BaseModel):
    admission_id: str
    span_start: int
    span_end: int
    span_text: str
    concept_id: str
    correct: bool
    annotator_id: str = ""


def _task_json(task):
    return {
        "task_id": task.task_id,
        "dataset": task.dataset,
        "admission_id": task.admission_id,
        "code": task.code.canonical,
        "code_display": task.code.display,
        "concept_id": task.concept_id,
        "excerpt": task.excerpt,
        "span_start": task.span_start,
        "span_end": task.span_end,
        "span_text": task.span_text,
    }


def create_app(service: AnnotationService, ui_dir=None):
    app = FastAPI(title="ddaudit annotation service")

    @app.exception_handler(ServiceError)
    async def service_error_handler(request: Request, exc: ServiceError):
        status = 404 if exc.code in ("unknown_session", "unknown_task") else 400
        return JSONResponse(status_code=status, content={"error": exc.code, "message": exc.message})

    @app.post("/api/v1/sessions")
    def create_session(body: CreateSessionBody):
        session = service.create_session(
            body.dataset, body.annotator_id, per_code_cap=body.per_code_cap, seed=body.seed
        )
        return {
            "session_id": session.session_id,
            "dataset": session.dataset,
            "tasks": [_task_json(t) for t in session.tasks],
        }

    @app.get("/api/v1/sessions/{session_id}/tasks")
    def get_tasks(session_id: str):
        session = service._session(session_id)
        return {
            "session_id": session.session_id,
            "finalized": session.finalized,
            "tasks": [_task_json(t) for t in session.tasks],
            "marks": dict(session.marks),
        }

    @app.post("/api/v1/sessions/{session_id}/marks")
    def post_mark(session_id: str, body: MarkBody):
        service.submit_mark(session_id, body.task_id, body.mark)
        return {"ok": True, "task_id": body.task_id, "mark": body.mark}

    @app.post("/api/v1/sessions/{session_id}/annotations")
    def post_annotation(session_id: str, body: AnnotationBody):
        service.add_annotation(
            session_id,
            AnnotationExample(
                doc_id=body.admission_id,
                start=body.span_start,
                end=body.span_end,
                surface=body.span_text,
                concept_id=body.concept_id,
                correct=body.correct,
                annotator_id=body.annotator_id,
            ),
        )
        return {"ok": True}

    @app.post("/api/v1/sessions/{session_id}/finalize")
    def finalize(session_id: str):
        service.finalize(session_id)
        return {"ok": True, "session_id": session_id}

    @app.get("/api/v1/agreement")
    def agreement(a: str, b: str):
        kappa, pct_a, pct_b = service.agreement(a, b)
        return {"kappa": kappa, "percent_correct_a": pct_a, "percent_correct_b": pct_b}

    @app.get("/api/v1/failing-codes")
    def failing_codes(threshold: float = 0.5):
        failing, unvalidated = service.failing_codes(threshold)
        return {
            "threshold": threshold,
            "failing": sorted(c.canonical for c in failing),
            "unvalidated": sorted(c.canonical for c in unvalidated),
        }

    @app.get("/api/v1/documents/{admission_id}/dd")
    def document_dd(admission_id: str):
        if admission_id not in service.excerpts:
            raise ServiceError("unknown_document", "no DD excerpt for %s" % admission_id)
        spans = []
        for r in service.records:
            if r.admission_id == admission_id:
                for s in r.spans:
                    spans.append(
                        {
                            "start": s.start,
                            "end": s.end,
                            "concept_id": s.concept_id,
                            "code": r.code.canonical,
                        }
                    )
        return {"admission_id": admission_id, "excerpt": service.excerpts[admission_id], "spans": spans}

    if ui_dir and os.path.isdir(ui_dir):
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
