"""JSON-over-HTTP service wrapping the analysis engine.

Every error, including auth and validation failures, uses one envelope:
{"code": ..., "message": ..., "detail": ...}. Mutating endpoints go through
the engine's serialized mutation path; reads serve the published snapshot.
"""

from __future__ import annotations

import os
import tempfile

from fastapi import Body, FastAPI, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .engine import AnalysisEngine
from .events import ConfigError, Event, Window, format_timestamp, parse_timestamp
from .filters import FilterSyntaxError
from .frames import rankings_digest
from .ranking import ClientRanking, EmployeeRanking, FactorConfig


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None) -> None:
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


def _event_dict(event: Event) -> dict:
    return event.to_record() | {"key": event.key}


def _client_dict(ranking: ClientRanking) -> dict:
    return {
        "client_id": ranking.client_id,
        "score": float(ranking.score),
        "score_exact": str(ranking.score),
        "factors": [
            {
                "factor_id": s.factor_id,
                "performance": s.performance,
                "severity": s.severity,
                "explanation": s.explanation,
                "skipped": s.skipped,
            }
            for s in ranking.factor_scores
        ],
        "weights": {fid: str(w) for fid, w in ranking.weights},
    }


def _employee_dict(ranking: EmployeeRanking) -> dict:
    return {
        "employee_id": ranking.employee_id,
        "score": float(ranking.score),
        "score_exact": str(ranking.score),
        "contributing_client": ranking.contributing_client,
        "mode": ranking.mode,
    }


def _parse_window_param(raw: str | None) -> Window | None:
    if raw is None or raw == "":
        return None
    try:
        return Window.parse(raw)
    except (ValueError, ConfigError) as exc:
        raise ApiError(400, "bad_window", str(exc)) from exc


def _parse_event_payload(records: list) -> list[Event]:
    events = []
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise ApiError(400, "bad_payload", "event records must be objects", {"index": index})
        try:
            events.append(
                Event(
                    timestamp=parse_timestamp(str(record["timestamp"])),
                    employee_id=str(record["employee_id"]),
                    client_id=str(record["client_id"]),
                    action=str(record["action"]),
                    source_system=str(record.get("source_system", "default")),
                )
            )
        except KeyError as exc:
            raise ApiError(
                400, "bad_payload", f"event record missing field {exc.args[0]!r}", {"index": index}
            ) from exc
        except ValueError as exc:
            raise ApiError(400, "bad_payload", str(exc), {"index": index}) from exc
    return events


def create_app(engine: AnalysisEngine) -> FastAPI:
    app = FastAPI(title="fraudlens service", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            {"code": exc.code, "message": exc.message, "detail": exc.detail},
            status_code=exc.status,
        )

    @app.exception_handler(FilterSyntaxError)
    async def handle_filter_error(request: Request, exc: FilterSyntaxError) -> JSONResponse:
        return JSONResponse(
            {"code": "filter_syntax", "message": str(exc), "detail": {"position": exc.position}},
            status_code=400,
        )

    @app.exception_handler(ConfigError)
    async def handle_config_error(request: Request, exc: ConfigError) -> JSONResponse:
        return JSONResponse(
            {"code": "invalid_config", "message": str(exc), "detail": None}, status_code=422
        )

    @app.exception_handler(RequestValidationError)
    async def handle_validation(request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            {"code": "validation", "message": "invalid request", "detail": exc.errors()},
            status_code=422,
        )

    def check_token(request: Request) -> None:
        token = engine.config.api_token
        if token is None:
            return
        if request.headers.get("authorization") != f"Bearer {token}":
            raise ApiError(401, "unauthorized", "missing or invalid bearer token")

    @app.middleware("http")
    async def auth_middleware(request: Request, call_next):
        try:
            check_token(request)
        except ApiError as exc:
            return JSONResponse(
                {"code": exc.code, "message": exc.message, "detail": exc.detail},
                status_code=exc.status,
            )
        return await call_next(request)

    @app.get("/api/rankings/clients")
    def rankings_clients(window: str | None = Query(default=None)) -> dict:
        interval = _parse_window_param(window)
        if interval is None:
            snap = engine.snapshot
            clients, digest = snap.clients, snap.rankings_digest
            span = snap.window
        else:
            ranked_clients, ranked_employees = engine.rank_for_window(interval)
            clients = ranked_clients
            digest = rankings_digest(ranked_clients, ranked_employees)
            span = interval
        return {
            "window": {"start": format_timestamp(span.start), "end": format_timestamp(span.end)}
            if span
            else None,
            "digest": digest,
            "config_digest": engine.config.digest(),
            "clients": [_client_dict(r) for r in clients],
        }

    @app.get("/api/rankings/employees")
    def rankings_employees() -> dict:
        snap = engine.snapshot
        return {
            "digest": snap.rankings_digest,
            "employees": [_employee_dict(r) for r in snap.employees],
        }

    @app.get("/api/clients/{client_id}/series")
    def client_series(client_id: str) -> dict:
        try:
            raw, dedup = engine.client_series(client_id)
        except KeyError:
            raise ApiError(404, "not_found", f"unknown client {client_id!r}") from None
        return {
            "client_id": client_id,
            "raw": [_event_dict(e) for e in raw],
            "dedup": [_event_dict(e) for e in dedup],
            "raw_count": len(raw.events),
            "dedup_count": len(dedup.events),
        }

    @app.get("/api/clients/{client_id}/layouts")
    def client_layouts(client_id: str) -> dict:
        try:
            return engine.client_layouts(client_id)
        except KeyError:
            raise ApiError(404, "not_found", f"unknown client {client_id!r}") from None

    @app.get("/api/layouts/layered")
    def layered(client: str | None = Query(default=None)) -> dict:
        try:
            return engine.layered(client).to_dict()
        except KeyError:
            raise ApiError(404, "not_found", f"unknown client {client!r}") from None

    @app.get("/api/layouts/stacked-bars")
    def stacked_bars(k: int = Query(default=10, ge=1)) -> dict:
        return engine.stacked(k).to_dict()

    @app.get("/api/frames")
    def frames() -> dict:
        return engine.snapshot.manifest.to_dict()

    @app.get("/api/frames/{index}")
    def frame(index: int) -> Response:
        try:
            svg = engine.frame_svg(index)
        except IndexError:
            raise ApiError(404, "not_found", f"no frame {index}") from None
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/api/config/factors")
    def get_factors() -> dict:
        return {
            "config_digest": engine.config.digest(),
            "factors": [
                {
                    "factor_id": cfg.factor_id,
                    "rank_position": cfg.rank_position,
                    "thresholds": dict(cfg.thresholds),
                    "enabled": cfg.enabled,
                }
                for cfg in engine.config.factors
            ],
        }

    @app.put("/api/config/factors")
    def put_factors(payload: list = Body(...)) -> dict:
        factors = []
        for index, item in enumerate(payload):
            if not isinstance(item, dict):
                raise ApiError(422, "invalid_config", "factor entries must be objects", {"index": index})
            try:
                factors.append(
                    FactorConfig(
                        factor_id=str(item["factor_id"]),
                        rank_position=int(item["rank_position"]),
                        thresholds=dict(item.get("thresholds", {})),
                        enabled=bool(item.get("enabled", True)),
                    )
                )
            except KeyError as exc:
                raise ApiError(
                    422, "invalid_config", f"factor entry missing {exc.args[0]!r}", {"index": index}
                ) from exc
        snapshot = engine.update_config(engine.config.with_factors(factors))
        return {
            "config_digest": snapshot.config_digest,
            "manifest_digest": snapshot.manifest.digest,
        }

    @app.post("/api/clients/{client_id}/status")
    def set_status(client_id: str, payload: dict = Body(...)) -> dict:
        status = payload.get("status")
        actor = payload.get("actor", "auditor")
        if not isinstance(status, str):
            raise ApiError(400, "bad_request", "payload must carry a status string")
        try:
            ranking = engine.set_status(client_id, status, str(actor))
        except KeyError:
            raise ApiError(404, "not_found", f"unknown client {client_id!r}") from None
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc)) from exc
        snap = engine.snapshot
        return {
            "client_id": client_id,
            "status": status,
            "ranking": _client_dict(ranking) if ranking else None,
            "rankings_digest": snap.rankings_digest,
            "manifest_digest": snap.manifest.digest,
        }

    @app.post("/api/ingest")
    def ingest(payload: dict = Body(...)) -> dict:
        records = payload.get("events")
        if not isinstance(records, list):
            raise ApiError(400, "bad_payload", "payload must carry an events array")
        events = _parse_event_payload(records)
        return engine.ingest(events)

    @app.get("/api/events")
    def query_events(
        filter: str = Query(default=""),
        page: int = Query(default=0, ge=0),
        page_size: int | None = Query(default=None, ge=1),
    ) -> dict:
        return engine.query(filter, page, page_size)

    @app.get("/api/export")
    def export(
        filter: str = Query(default=""),
        format: str = Query(default="csv"),
    ) -> Response:
        if format not in ("csv", "jsonl"):
            raise ApiError(400, "bad_request", f"unknown export format {format!r}")
        handle, path = tempfile.mkstemp(suffix=f".{format}")
        os.close(handle)
        try:
            engine.export(path, filter, format)
            with open(path, "rb") as fh:
                body = fh.read()
        finally:
            os.unlink(path)
        media = "text/csv" if format == "csv" else "application/x-ndjson"
        return Response(
            content=body,
            media_type=media,
            headers={"Content-Disposition": f'attachment; filename="events.{format}"'},
        )

    return app
