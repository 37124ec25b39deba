"""Single-endpoint HTTP service: OCR document or direction text in, .ics out.

The service is stateless. The rule catalog and time defaults load once at
startup and are immutable afterwards; a catalog that fails to load prevents
startup entirely rather than serving degraded answers.
"""

from __future__ import annotations

import json
from datetime import date, datetime, timezone

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .catalog import Ruleset, default_ruleset
from .errors import InterpretationFailure, MalformedInput, ScheduleError
from .ics import CalendarMeta
from .pipeline import label_from_ocr, label_from_text, run_pipeline
from .schedule import TimeDefaults

MAX_BODY_BYTES = 1024 * 1024


def _bad_request(reason: str) -> JSONResponse:
    return JSONResponse(status_code=400, content={"error": "malformed_body", "reason": reason})


def create_app(
    ruleset: Ruleset | None = None,
    time_defaults: TimeDefaults | None = None,
    frozen_dtstamp: datetime | None = None,
) -> FastAPI:
    """Build the service with its immutable configuration."""
    rs = ruleset if ruleset is not None else default_ruleset()
    cfg = time_defaults if time_defaults is not None else TimeDefaults()

    app = FastAPI(title="memorais", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "ruleset_version": rs.version}

    @app.post("/v1/reminders")
    async def reminders(request: Request) -> Response:
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            return JSONResponse(
                status_code=413,
                content={"error": "payload_too_large", "limit_bytes": MAX_BODY_BYTES},
            )
        try:
            payload = json.loads(body)
        except json.JSONDecodeError as exc:
            return _bad_request(f"invalid JSON: {exc}")
        if not isinstance(payload, dict):
            return _bad_request("body must be a JSON object")
        unknown = set(payload) - {"ocr", "text", "anchor_date"}
        if unknown:
            return _bad_request(f"unknown field(s): {', '.join(sorted(unknown))}")
        has_ocr = "ocr" in payload
        has_text = "text" in payload
        if has_ocr == has_text:
            return _bad_request("exactly one of 'ocr' or 'text' is required")

        anchor = date.today()
        if "anchor_date" in payload:
            if not isinstance(payload["anchor_date"], str):
                return _bad_request("anchor_date must be a YYYY-MM-DD string")
            try:
                anchor = date.fromisoformat(payload["anchor_date"])
            except ValueError:
                return _bad_request(f"bad anchor_date {payload['anchor_date']!r}")

        try:
            if has_text:
                if not isinstance(payload["text"], str):
                    return _bad_request("text must be a string")
                label = label_from_text(payload["text"])
            else:
                if not isinstance(payload["ocr"], list):
                    return _bad_request("ocr must be an array")
                label = label_from_ocr(
                    json.dumps(payload["ocr"]), "generic_json", source_id="<request>"
                )
        except MalformedInput as exc:
            return _bad_request(str(exc))

        dtstamp = frozen_dtstamp if frozen_dtstamp is not None else datetime.now(timezone.utc)
        try:
            doc = run_pipeline(label, rs, cfg, anchor, CalendarMeta(dtstamp=dtstamp))
        except InterpretationFailure as exc:
            return JSONResponse(
                status_code=422,
                content={
                    "error": "interpretation_failure",
                    "normalized_text": exc.normalized_text,
                    "partial_matches": [list(m) for m in exc.partial_matches],
                },
            )
        except ScheduleError as exc:
            return JSONResponse(
                status_code=422,
                content={"error": "schedule_error", "reason": str(exc)},
            )

        return Response(
            content=doc.data,
            media_type="text/calendar",
            headers={"Content-Disposition": 'attachment; filename="reminders.ics"'},
        )

    return app
