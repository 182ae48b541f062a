"""HTTP front for the annotation service.

Endpoints:
  POST /v1/annotators/{id}/register
  GET  /v1/annotators/{id}/next
  POST /v1/tasks/{task_id}/verdict   {annotator_id, verdict: {kind, index?}}
  GET  /v1/stats/agreement
  GET  /v1/export/prm

Errors come back as a machine-readable {code, message} object with a 4xx
status. The service itself serializes writes, so the app can run under any
ASGI server without extra locking.
"""

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .annotation import AnnotationService
from .errors import (
    AlreadySubmitted,
    IndexOutOfRange,
    NotAssigned,
    UnknownAnnotator,
)
from .labeling import Verdict

_ERROR_STATUS = {
    "unknown_annotator": 404,
    "not_assigned": 409,
    "already_submitted": 409,
    "index_out_of_range": 422,
    "invalid_verdict": 422,
}


class ApiError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def create_app(service: AnnotationService) -> FastAPI:
    app = FastAPI(title="first-mistake annotation service")
    app.state.service = service

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=_ERROR_STATUS.get(exc.code, 400),
                            content={"code": exc.code, "message": exc.message})

    @app.post("/v1/annotators/{annotator_id}/register")
    def register(annotator_id: str):
        profile = service.register_annotator(annotator_id)
        return profile.to_json()

    @app.get("/v1/annotators/{annotator_id}/next")
    def next_task(annotator_id: str):
        try:
            task = service.next_task(annotator_id)
        except UnknownAnnotator as exc:
            raise ApiError("unknown_annotator", str(exc))
        profile = service.annotators[annotator_id]
        body = {"annotator": profile.to_json()}
        body["task"] = task.public_view() if task else None
        return body

    @app.post("/v1/tasks/{task_id}/verdict")
    async def submit_verdict(task_id: str, request: Request):
        payload = await request.json()
        try:
            annotator_id = payload["annotator_id"]
            verdict = Verdict.from_json(payload["verdict"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiError("invalid_verdict", f"bad verdict payload: {exc}")
        try:
            profile = service.submit_verdict(task_id, annotator_id, verdict)
        except UnknownAnnotator as exc:
            raise ApiError("unknown_annotator", str(exc))
        except NotAssigned as exc:
            raise ApiError("not_assigned", str(exc))
        except AlreadySubmitted as exc:
            raise ApiError("already_submitted", str(exc))
        except IndexOutOfRange as exc:
            raise ApiError("index_out_of_range", str(exc))
        return {"accepted": True, "annotator": profile.to_json()}

    @app.get("/v1/stats/agreement")
    def agreement():
        return service.agreement_stats()

    @app.get("/v1/export/prm")
    def export_prm():
        examples, report = service.export_prm_dataset()
        return {
            "report": report,
            "examples": [
                {
                    "problem_id": ex.problem.id,
                    "sample_id": ex.sample_id,
                    "steps": [s.text for s in ex.trace.steps],
                    "labels": [1 if b else 0 for b in ex.labels.labels],
                    "provenance": ex.labels.provenance,
                }
                for ex in examples
            ],
        }

    return app


def serve(store_dir: str, host: str = "127.0.0.1", port: int = 8321):
    import uvicorn

    app = create_app(AnnotationService(store_dir))
    uvicorn.run(app, host=host, port=port, log_level="warning")
