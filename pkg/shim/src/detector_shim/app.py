"""Wire-protocol surface: POST /detect and GET /healthz.

The request body is parsed by hand so errors map to the protocol's status
codes (400 malformed, 413 oversize) and, critically, the text reaches the
model without any Unicode normalization. Normalizing here would silently
erase the substitutions this service exists to measure.
"""

from __future__ import annotations

import hashlib
import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from .model import DetectorModel

DEFAULT_MAX_CHARS = 50_000


def create_app(model: DetectorModel, max_chars: int = DEFAULT_MAX_CHARS) -> FastAPI:
    app = FastAPI(title="detector-shim", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.post("/detect")
    async def detect(request: Request) -> JSONResponse:
        raw = await request.body()
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            return JSONResponse({"error": "body must be UTF-8 JSON"}, status_code=400)
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            return JSONResponse(
                {"error": "body must be an object with a string 'text'"}, status_code=400
            )
        text = payload["text"]
        if len(text) > max_chars:
            return JSONResponse(
                {"error": f"text exceeds {max_chars} characters"}, status_code=413
            )
        echo = hashlib.sha256(text.encode("utf-8")).hexdigest()
        try:
            prob = model.prob_machine(text)
        except Exception as exc:  # surfaced as a diagnostic, not a crash
            return JSONResponse({"error": f"model failure: {exc}"}, status_code=500)
        return JSONResponse({"prob_machine": prob, "echo_sha256": echo})

    return app
