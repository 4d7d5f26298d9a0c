"""HTTP/JSON face of the gate service.

Thin translation layer: routes parse transport details, the GateService
holds every rule. Field names in request and response bodies are part of
the wire contract consumed by the operator console.
"""

from __future__ import annotations

from dataclasses import asdict

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel
from starlette.concurrency import run_in_threadpool
from starlette.middleware.cors import CORSMiddleware

from ..imgio import ImageDecodeError
from .service import (
    ACCUMULATING,
    BadDirection,
    BadRange,
    DECIDED,
    GateService,
    InvalidPlate,
    MissingOperator,
    UnknownGate,
)
from .store import AccessEntry, GateEvent

LONG_POLL_S = 25.0


def event_json(event: GateEvent) -> dict:
    """Wire form of an event; optional fields appear only when set."""
    out = {
        "event_id": event.event_id,
        "ts": event.ts,
        "gate_id": event.gate_id,
        "direction": event.direction,
        "plate": event.plate,
        "decision": event.decision,
        "confidence": event.confidence,
        "frame_ref": event.frame_ref,
    }
    if event.operator_id is not None:
        out["operator_id"] = event.operator_id
    if event.reason is not None:
        out["reason"] = event.reason
    return out


def entry_json(entry: AccessEntry) -> dict:
    out = asdict(entry)
    out["allowed_days"] = list(entry.allowed_days) if entry.allowed_days is not None else None
    out["allowed_hours"] = list(entry.allowed_hours) if entry.allowed_hours is not None else None
    return out


class EntryBody(BaseModel):
    plate: str
    list_kind: str
    valid_from: int | None = None
    valid_to: int | None = None
    allowed_days: list[str] | None = None
    allowed_hours: list[str] | None = None
    note: str = ""


class OpenBody(BaseModel):
    operator_id: str
    reason: str = ""
    direction: str = "IN"


def create_app(service: GateService) -> FastAPI:
    app = FastAPI(title="plategate", docs_url=None, redoc_url=None)
    # The operator console is served as static files from elsewhere, so the
    # API must answer cross-origin requests. No credentials are involved.
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.exception_handler(UnknownGate)
    async def _unknown_gate(request: Request, exc: UnknownGate):
        return error(404, f"unknown gate {exc.args[0]!r}")

    @app.exception_handler(ImageDecodeError)
    async def _bad_image(request: Request, exc: ImageDecodeError):
        return error(400, str(exc))

    @app.exception_handler(BadDirection)
    async def _bad_direction(request: Request, exc: BadDirection):
        return error(422, str(exc))

    @app.exception_handler(MissingOperator)
    async def _missing_operator(request: Request, exc: MissingOperator):
        return error(422, str(exc))

    @app.exception_handler(InvalidPlate)
    async def _invalid_plate(request: Request, exc: InvalidPlate):
        return error(422, str(exc))

    @app.exception_handler(BadRange)
    async def _bad_range(request: Request, exc: BadRange):
        return error(400, str(exc))

    # -- frames ------------------------------------------------------------

    @app.post("/gates/{gate_id}/frames")
    async def post_frame(gate_id: str, request: Request, direction: str = Query(...)):
        data = await request.body()
        state, event = await run_in_threadpool(
            service.ingest_frame, gate_id, direction, data)
        if state == DECIDED:
            return {"state": DECIDED, "event": event_json(event)}
        return {"state": ACCUMULATING}

    # -- events (long poll) ------------------------------------------------

    @app.get("/events")
    async def get_events(since: int = 0):
        events = await run_in_threadpool(service.wait_events, since, LONG_POLL_S)
        return {"events": [event_json(e) for e in events]}

    # -- lists -------------------------------------------------------------

    @app.post("/lists")
    def post_list(body: EntryBody):
        try:
            entry = AccessEntry(
                plate=body.plate,
                list_kind=body.list_kind,
                valid_from=body.valid_from,
                valid_to=body.valid_to,
                allowed_days=tuple(body.allowed_days) if body.allowed_days is not None else None,
                allowed_hours=tuple(body.allowed_hours) if body.allowed_hours is not None else None,
                note=body.note,
            )
        except ValueError as exc:
            return error(422, str(exc))
        stored = service.upsert_entry(entry)
        return {"entry": entry_json(stored)}

    @app.get("/lists")
    def get_lists():
        return {"entries": [entry_json(e) for e in service.list_entries()]}

    @app.delete("/lists/{list_kind}/{plate}")
    def delete_list(list_kind: str, plate: str):
        return {"removed": service.remove_entry(list_kind, plate)}

    # -- manual open -------------------------------------------------------

    @app.post("/gates/{gate_id}/open")
    def post_open(gate_id: str, body: OpenBody):
        event = service.manual_open(gate_id, body.operator_id, body.reason,
                                    direction=body.direction)
        return {"event": event_json(event)}

    # -- reports and occupancy ---------------------------------------------

    @app.get("/reports/traffic")
    def get_traffic(
        from_ms: int = Query(0, alias="from"),
        to_ms: int | None = Query(None, alias="to"),
        gate_id: str | None = None,
        plate: str | None = None,
        decision: str | None = None,
    ):
        to_val = to_ms if to_ms is not None else service.clock()
        rows = service.report(from_ms, to_val, gate_id=gate_id or None,
                              plate=plate or None, decision=decision or None)
        return {"rows": [asdict(r) for r in rows]}

    @app.get("/occupancy")
    def get_occupancy():
        state = service.occupancy()
        return {"count": state.count, "plates": sorted(state.inside),
                "anomalies": state.anomalies}

    @app.get("/health")
    def get_health():
        return {"status": "ok", "gates": list(service.config.gates)}

    return app
