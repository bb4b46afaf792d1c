"""HTTP session API over the sampling engine.

Endpoints map onto the studio workflow: parse a request, open a session
(glyph + depth), Start/Refresh (generate), Continue (edit), browse history.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import (
    EndpointTimeout,
    EndpointUnreachable,
    MissingTrajectory,
    OverlappingRegions,
    SchemaViolation,
    SchemaViolationAfterRetries,
    WordcraftError,
)
from ..model import checkpoint_digest, model_from_checkpoint
from ..prompt import (
    UserRequest,
    config_from_env,
    expand_bundle,
    llm_decompose,
    parse_structured,
    serialize,
)
from ..sampler import SamplerEngine
from .sessions import SessionManager
from .store import ArtifactStore, content_type


def _error_payload(exc):
    payload = {"error": type(exc).__name__, "detail": str(exc)}
    if hasattr(exc, "position"):
        payload["position"] = exc.position
        payload["expected"] = exc.expected
    if hasattr(exc, "path"):
        payload["path"] = exc.path
    if hasattr(exc, "cells"):
        payload["cells"] = [list(c) for c in exc.cells[:32]]
    return payload


def create_app(config, checkpoint_bytes=None):
    store = ArtifactStore(config.store_dir)
    if checkpoint_bytes is None:
        with open(config.checkpoint_path, "rb") as fh:
            checkpoint_bytes = fh.read()
    model, _ = model_from_checkpoint(checkpoint_bytes)
    engine = SamplerEngine(model)
    fonts = {}
    for name, path in config.font_paths.items():
        with open(path, "rb") as fh:
            fonts[name] = fh.read()
    manager = SessionManager(store, engine, fonts)
    digest = checkpoint_digest(checkpoint_bytes)

    app = FastAPI(title="wordcraft", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=list(config.cors_origins),
        allow_methods=["*"], allow_headers=["*"])
    app.state.manager = manager
    app.state.store = store

    @app.exception_handler(WordcraftError)
    async def _wordcraft_error(request: Request, exc: WordcraftError):
        if isinstance(exc, OverlappingRegions):
            status = 409
        elif isinstance(exc, (EndpointUnreachable, EndpointTimeout,
                              SchemaViolationAfterRetries)):
            status = 502
        else:
            status = 400
        return JSONResponse(status_code=status, content=_error_payload(exc))

    # --- parsing ---------------------------------------------------------

    @app.post("/parse")
    def parse(body: dict):
        query = body.get("query", "")
        use_llm = bool(body.get("use_llm", False))
        if use_llm:
            bundle = llm_decompose(UserRequest(query=query),
                                   config_from_env(config.llm))
            bundle = expand_bundle(bundle)
        else:
            bundle = parse_structured(query)
        return json.loads(serialize(bundle))

    # --- sessions ----------------------------------------------------------

    @app.post("/sessions")
    def create_session(body: dict):
        document = body.get("document")
        if document is None:
            raise SchemaViolation("document", "missing")
        doc = manager.create_session(document, body.get("font"))
        return {
            "session_id": doc["id"],
            "glyph_png": f"/artifacts/{doc['artifacts']['glyph_png']}",
            "depth_png": f"/artifacts/{doc['artifacts']['depth_png']}",
        }

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        doc = manager.get_session(sid)
        if doc is None:
            return JSONResponse(status_code=404,
                                content={"error": "UnknownSession"})
        return doc

    @app.post("/sessions/{sid}/generate")
    def generate(sid: str, body: dict):
        try:
            doc, results = manager.generate(
                sid,
                seed=body.get("seed"),
                regions_payload=body.get("regions"),
                steps=body.get("steps"),
                count=body.get("count", 1),
                transparent=body.get("transparent", False))
        except KeyError:
            return JSONResponse(status_code=404,
                                content={"error": "UnknownSession"})
        entries = [{
            "image_url": f"/sessions/{sid}/images/{e['index']}",
            "history_index": e["index"],
            "seed": e["params"]["seed"],
        } for e in results]
        first = entries[0]
        return {**first, "results": entries}

    @app.post("/sessions/{sid}/edit")
    def edit(sid: str, body: dict):
        try:
            doc, entry = manager.edit(
                sid,
                regions_payload=body.get("regions"),
                region_prompts=body.get("region_prompts") or [],
                history_index=body.get("history_index"),
                seed=body.get("seed"),
                transparent=body.get("transparent", False))
        except KeyError:
            return JSONResponse(status_code=404,
                                content={"error": "UnknownSession"})
        return {
            "image_url": f"/sessions/{sid}/images/{entry['index']}",
            "history_index": entry["index"],
            "seed": entry["params"]["seed"],
        }

    @app.get("/sessions/{sid}/images/{n}")
    def get_image(sid: str, n: int):
        doc = manager.get_session(sid)
        if doc is None or not 0 <= n < len(doc["history"]):
            return JSONResponse(status_code=404, content={"error": "NotFound"})
        data = store.get(doc["history"][n]["image"])
        return Response(content=data, media_type="image/png")

    @app.get("/artifacts/{key}")
    def get_artifact(key: str):
        if not store.has(key):
            return JSONResponse(status_code=404, content={"error": "NotFound"})
        return Response(content=store.get(key), media_type=content_type(key))

    @app.get("/fonts")
    def list_fonts():
        return {"fonts": sorted(fonts.keys())}

    @app.get("/health")
    def health():
        return {"status": "ok", "checkpoint_digest": digest}

    return app
