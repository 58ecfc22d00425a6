"""HTTP JSON API over the session store.

Seven endpoints: create/read sessions, what-if previews, budget
mutations, release finalization/retrieval, and the disclosure-risk
curve. Every payload carries schema_version; every error has the shape
{code, message, field_path?}.

What-if exploration is served without debiting the budget. That is a
deliberate trusted-curator stance: epsilon experimentation leaks
information in principle, and deployments with untrusted curators
should gate these endpoints accordingly.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .errors import PlannerError
from .sessions import (
    DEFAULT_FRAMES,
    SCHEMA_VERSION,
    SessionStore,
    risk_curve_payload,
    session_payload,
)

STATUS_BY_CODE = {
    "not_found": 404,
    "state": 409,
    "finalized": 409,
    "internal": 500,
}


class CreateSessionRequest(BaseModel):
    dataset: str
    queries: list[dict]
    total_budget: float
    seed: int = 0


class WhatifRequest(BaseModel):
    query: str
    epsilon: float | None = None
    frames: int = Field(default=DEFAULT_FRAMES, ge=1)


class BudgetMutation(BaseModel):
    action: str
    query: str | None = None
    value: float | None = None
    mode: str | None = None
    total: float | None = None


def _error_response(code: str, message: str, field_path: str | None = None):
    body = {"code": code, "message": message}
    if field_path is not None:
        body["field_path"] = field_path
    return JSONResponse(status_code=STATUS_BY_CODE.get(code, 400), content=body)


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="dp-planner", version=SCHEMA_VERSION)

    @app.exception_handler(PlannerError)
    async def planner_error(request: Request, exc: PlannerError):
        return _error_response(exc.code, exc.message, exc.field_path)

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        loc = ".".join(str(p) for p in first.get("loc", ()) if p != "body")
        return _error_response("invalid_spec", first.get("msg", "invalid request"), loc or None)

    @app.exception_handler(Exception)
    async def internal_error(request: Request, exc: Exception):
        return _error_response("internal", f"{type(exc).__name__}: {exc}")

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest):
        session = store.create_session(
            req.dataset, req.queries, req.total_budget, req.seed
        )
        return session_payload(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_payload(store.get(session_id))

    @app.post("/sessions/{session_id}/whatif")
    def whatif(session_id: str, req: WhatifRequest):
        return store.whatif(session_id, req.query, req.epsilon, req.frames)

    @app.patch("/sessions/{session_id}/budget")
    def update_budget(session_id: str, mutation: BudgetMutation):
        session = store.update_budget(
            session_id, mutation.model_dump(exclude_none=True)
        )
        return session_payload(session)

    @app.post("/sessions/{session_id}/release")
    def finalize(session_id: str):
        document, already = store.finalize(session_id)
        return {
            "schema_version": SCHEMA_VERSION,
            "already_finalized": already,
            "document": document,
        }

    @app.get("/sessions/{session_id}/release")
    def get_release(session_id: str):
        return store.get_release(session_id)

    @app.get("/sessions/{session_id}/risk-curve")
    def get_risk_curve(session_id: str):
        return risk_curve_payload(store.get(session_id))

    return app
