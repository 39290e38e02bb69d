"""HTTP/JSON facade over the registry, reports and persistence.

All mutating requests funnel through one writer lock: apply the command,
fsync its journal entry, publish the new store, then answer. Reads serve the
latest published store snapshot without blocking the writer. Error bodies are
always `{"error": {"code": …, "message": …}}` with the registry's stable
error codes.
"""

from __future__ import annotations

import os
import threading
from contextlib import asynccontextmanager
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Any, Optional, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import codec, reporting
from .domain import (
    DEFAULT_PASSING_THRESHOLD,
    AcademicYear,
    Doctorant,
    DoctorateForm,
    LifecycleStatus,
)
from .errors import (
    AlreadyClosed,
    CompetitionClosed,
    DomainError,
    DuplicateOpenSupervision,
    InvalidTransition,
    MalformedPayload,
    PersistenceError,
    SequenceConflict,
    UnknownCompetition,
    UnknownDoctorant,
    UnknownSupervisor,
)
from .persistence import StoreEngine
from .registry import DoctorantFilter, Store, query_doctorants

DATA_DIR_ENV = "DOKTORANT_DATA_DIR"

_NOT_FOUND = (UnknownDoctorant, UnknownSupervisor, UnknownCompetition)
_CONFLICT = (
    InvalidTransition,
    DuplicateOpenSupervision,
    SequenceConflict,
    AlreadyClosed,
    CompetitionClosed,
)


def http_status(error: DomainError) -> int:
    """Total mapping: unknown entity 404, state conflict 409, persistence 500,
    every other precondition/validation failure 400."""
    if isinstance(error, _NOT_FOUND):
        return 404
    if isinstance(error, _CONFLICT):
        return 409
    if isinstance(error, PersistenceError):
        return 500
    return 400


def _error_response(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


@dataclass
class ServiceConfig:
    listen_addr: str = "127.0.0.1:8077"
    data_dir: Union[str, Path] = "./data"
    passing_threshold: Decimal = DEFAULT_PASSING_THRESHOLD


# -- resource views -------------------------------------------------------------

def dossier_view(d: Doctorant, passing_threshold: Decimal) -> dict[str, Any]:
    doc = codec.doctorant_to_doc(d)
    for exam_doc, exam in zip(doc["exams"], d.exams):
        exam_doc["passed"] = exam.passes(passing_threshold)
    return doc


def _parse_filter(
    status: Optional[str],
    form: Optional[str],
    year: Optional[str],
    supervisor: Optional[str],
    name: Optional[str],
) -> DoctorantFilter:
    try:
        parsed_status = LifecycleStatus(status) if status else None
    except ValueError:
        raise MalformedPayload(f"status: unknown value {status!r}") from None
    try:
        parsed_form = DoctorateForm(form) if form else None
    except ValueError:
        raise MalformedPayload(f"form: unknown value {form!r}") from None
    parsed_year = AcademicYear.parse(year) if year else None
    return DoctorantFilter(
        status=parsed_status,
        form=parsed_form,
        academic_year=parsed_year,
        supervisor_id=supervisor or None,
        name=name or None,
    )


def _report_response(report: reporting.Report, format: Optional[str]) -> Response:
    fmt = (format or "json").lower()
    payload = reporting.export_table(report, fmt)  # raises MalformedPayload on bad format
    media = "text/csv; charset=utf-8" if fmt == "csv" else "application/json; charset=utf-8"
    return Response(content=payload, media_type=media)


async def _json_body(request: Request) -> dict[str, Any]:
    try:
        body = await request.json()
    except Exception:
        raise MalformedPayload("request body must be a JSON object") from None
    if not isinstance(body, dict):
        raise MalformedPayload("request body must be a JSON object")
    return body


def _merge_path_id(body: dict[str, Any], key: str, value: str) -> dict[str, Any]:
    if key in body and body[key] != value:
        raise MalformedPayload(f"{key} in body conflicts with URL path")
    return {**body, key: value}


def create_app(
    data_dir: Union[str, Path],
    passing_threshold: Decimal = DEFAULT_PASSING_THRESHOLD,
    ui_dir: Optional[Union[str, Path]] = None,
) -> FastAPI:
    """Build the service; the engine is opened on startup, snapshot on shutdown."""

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        engine = StoreEngine(data_dir)
        app.state.engine = engine
        app.state.write_lock = threading.Lock()
        app.state.passing_threshold = passing_threshold
        try:
            yield
        finally:
            engine.close(snapshot=True)

    app = FastAPI(title="doktorant registry", lifespan=lifespan)

    @app.exception_handler(DomainError)
    async def on_domain_error(_: Request, exc: DomainError):
        return _error_response(exc.code, str(exc), http_status(exc))

    @app.exception_handler(StarletteHTTPException)
    async def on_http_error(_: Request, exc: StarletteHTTPException):
        code = {404: "NotFound", 405: "MethodNotAllowed"}.get(exc.status_code, "HttpError")
        return _error_response(code, str(exc.detail), exc.status_code)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(_: Request, exc: RequestValidationError):
        return _error_response("MalformedPayload", str(exc), 400)

    def execute(cmd: str, payload: dict[str, Any]):
        with app.state.write_lock:
            return app.state.engine.execute(cmd, payload)

    def store() -> Store:
        return app.state.engine.store

    def view(d: Doctorant) -> dict[str, Any]:
        return dossier_view(d, app.state.passing_threshold)

    def updated_dossier(outcome) -> dict[str, Any]:
        return view(outcome.store.doctorants[outcome.entity_id])

    # -- doctorants ------------------------------------------------------------

    @app.post("/api/doctorants", status_code=201)
    async def register_doctorant(request: Request):
        outcome = execute("register_doctorant", await _json_body(request))
        return updated_dossier(outcome)

    @app.get("/api/doctorants")
    def list_doctorants(
        status: Optional[str] = None,
        form: Optional[str] = None,
        year: Optional[str] = None,
        supervisor: Optional[str] = None,
        name: Optional[str] = None,
    ):
        filter = _parse_filter(status, form, year, supervisor, name)
        return [view(d) for d in query_doctorants(store(), filter)]

    @app.get("/api/doctorants/{doctorant_id}")
    def get_doctorant(doctorant_id: str):
        d = store().doctorants.get(doctorant_id)
        if d is None:
            raise UnknownDoctorant(doctorant_id)
        return view(d)

    @app.get("/api/doctorants/{doctorant_id}/topics")
    def get_topics(doctorant_id: str):
        d = store().doctorants.get(doctorant_id)
        if d is None:
            raise UnknownDoctorant(doctorant_id)
        return [codec.topic_to_doc(t) for t in d.topics]

    def _dossier_command(cmd: str):
        async def handler(doctorant_id: str, request: Request):
            body = _merge_path_id(await _json_body(request), "id", doctorant_id)
            return updated_dossier(execute(cmd, body))

        return handler

    app.post("/api/doctorants/{doctorant_id}/enroll")(_dossier_command("enroll"))
    app.post("/api/doctorants/{doctorant_id}/dismiss")(_dossier_command("dismiss"))
    app.post("/api/doctorants/{doctorant_id}/defense")(_dossier_command("record_defense"))
    app.post("/api/doctorants/{doctorant_id}/topics")(_dossier_command("change_topic"))
    app.post("/api/doctorants/{doctorant_id}/exams")(_dossier_command("record_exam"))
    app.post("/api/doctorants/{doctorant_id}/activities")(_dossier_command("add_activity"))
    app.post("/api/doctorants/{doctorant_id}/documents")(_dossier_command("attach_document"))

    @app.post("/api/doctorants/{doctorant_id}/supervisors")
    async def assign_supervisor(doctorant_id: str, request: Request):
        body = _merge_path_id(await _json_body(request), "doctorant_id", doctorant_id)
        return updated_dossier(execute("assign_supervisor", body))

    @app.post("/api/doctorants/{doctorant_id}/supervisors/{supervisor_id}/end")
    async def end_supervision(doctorant_id: str, supervisor_id: str, request: Request):
        body = _merge_path_id(await _json_body(request), "doctorant_id", doctorant_id)
        body = _merge_path_id(body, "supervisor_id", supervisor_id)
        return updated_dossier(execute("end_supervision", body))

    # -- supervisors and competitions -------------------------------------------

    @app.get("/api/supervisors")
    def list_supervisors():
        items = sorted(store().supervisors.values(), key=lambda s: s.id)
        return [codec.supervisor_to_doc(s) for s in items]

    @app.post("/api/supervisors", status_code=201)
    async def register_supervisor(request: Request):
        outcome = execute("register_supervisor", await _json_body(request))
        return codec.supervisor_to_doc(outcome.store.supervisors[outcome.entity_id])

    @app.get("/api/competitions")
    def list_competitions():
        items = sorted(store().competitions.values(), key=lambda c: c.id)
        return [codec.competition_to_doc(c) for c in items]

    @app.post("/api/competitions", status_code=201)
    async def create_competition(request: Request):
        outcome = execute("create_competition", await _json_body(request))
        return codec.competition_to_doc(outcome.store.competitions[outcome.entity_id])

    @app.post("/api/competitions/{competition_id}/close")
    def close_competition(competition_id: str):
        outcome = execute("close_competition", {"competition_id": competition_id})
        return codec.competition_to_doc(outcome.store.competitions[outcome.entity_id])

    # -- reports -----------------------------------------------------------------

    @app.get("/api/reports/ministry")
    def report_ministry(year: str, format: Optional[str] = None):
        return _report_response(reporting.ministry_report(store(), year), format)

    @app.get("/api/reports/individual-plan/{doctorant_id}")
    def report_individual_plan(doctorant_id: str, format: Optional[str] = None):
        report = reporting.individual_plan(store(), doctorant_id, app.state.passing_threshold)
        return _report_response(report, format)

    @app.get("/api/reports/supervisor-load")
    def report_supervisor_load(format: Optional[str] = None):
        return _report_response(reporting.supervisor_load(store()), format)

    @app.get("/api/reports/activity/{doctorant_id}")
    def report_activity(doctorant_id: str, year: str, format: Optional[str] = None):
        report = reporting.annual_activity_report(store(), doctorant_id, year)
        return _report_response(report, format)

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def resolve_data_dir(configured: Union[str, Path]) -> Path:
    """The DOKTORANT_DATA_DIR environment variable overrides configuration."""
    return Path(os.environ.get(DATA_DIR_ENV) or configured)


def parse_listen_addr(addr: str) -> tuple[str, int]:
    host, _, port_text = addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"listen address must be HOST:PORT, got {addr!r}")
    return host, int(port_text)


def serve(config: ServiceConfig) -> None:
    """Run until shutdown; writes a snapshot on clean exit."""
    import uvicorn

    host, port = parse_listen_addr(config.listen_addr)
    data_dir = resolve_data_dir(config.data_dir)
    ui_env = os.environ.get("DOKTORANT_UI_DIR")
    app = create_app(data_dir, config.passing_threshold, ui_dir=ui_env)
    uvicorn.run(app, host=host, port=port, log_level="info")
