"""HTTP/WebSocket wire layer.

One websocket per session carries the command stream: text frames are JSON
commands, binary frames carry audio chunks (2-byte big-endian header length,
JSON header, PCM payload). Every record the session produces is pushed back
as a JSON event frame. Bulk payloads (artifact PNGs, gallery thumbnails,
snapshots) are plain GET endpoints. See PROTOCOL.md for the frozen message
shapes.
"""

import json
import struct

from fastapi import FastAPI, HTTPException, Query, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, Response
from starlette.concurrency import run_in_threadpool

from .canvas.raster import rasterize
from .config import ServiceConfig
from .errors import SketchLoopError, UnknownArtifact, UnknownEntry, UnknownSession
from .providers.base import ProviderRole
from .providers.mock import ProviderSet, build_mock_providers
from .session import Session, SessionManager

AUDIO_HEADER_STRUCT = struct.Struct(">H")


def build_providers(config: ServiceConfig) -> ProviderSet:
    if config.provider_mode == "mock":
        return build_mock_providers()
    from .providers.http import HttpImageProvider, HttpTextProvider, HttpTranscriber

    return ProviderSet(
        transcriber=HttpTranscriber(config.providers[ProviderRole.TRANSCRIBE]),
        insight=HttpTextProvider(config.providers[ProviderRole.INSIGHT_TEXT]),
        chat_text=HttpTextProvider(config.providers[ProviderRole.CHAT_TEXT]),
        chat_image=HttpImageProvider(config.providers[ProviderRole.CHAT_IMAGE]),
    )


def decode_audio_frame(frame: bytes) -> tuple[dict, bytes]:
    if len(frame) < 2:
        raise SketchLoopError("binary frame too short")
    (header_len,) = AUDIO_HEADER_STRUCT.unpack(frame[:2])
    if len(frame) < 2 + header_len:
        raise SketchLoopError("binary frame header truncated")
    header = json.loads(frame[2 : 2 + header_len].decode("utf-8"))
    return header, frame[2 + header_len :]


def encode_audio_frame(header: dict, samples: bytes) -> bytes:
    raw = json.dumps(header).encode("utf-8")
    return AUDIO_HEADER_STRUCT.pack(len(raw)) + raw + samples


def create_app(config: ServiceConfig | None = None,
               providers: ProviderSet | None = None,
               data_dir: str | None = None,
               static_dir: str | None = None) -> FastAPI:
    config = config or ServiceConfig.load()
    providers = providers or build_providers(config)
    manager = SessionManager(config, providers, data_dir=data_dir)

    app = FastAPI(title="sketchloop", version="0.1.0")
    app.state.manager = manager

    def check_token(request: Request) -> None:
        if config.api_token and request.headers.get("x-api-token") != config.api_token:
            raise HTTPException(status_code=401, detail="invalid api token")

    def get_session(session_id: str) -> Session:
        try:
            return manager.get(session_id)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=exc.message) from exc

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "sessions": len(manager.ids())}

    @app.post("/sessions")
    def create_session(request: Request):
        check_token(request)
        session = manager.create()
        return {"session_id": session.session_id,
                "canvas_width": config.canvas_width,
                "canvas_height": config.canvas_height}

    @app.get("/sessions/{session_id}/snapshot")
    def snapshot(session_id: str, request: Request):
        check_token(request)
        return JSONResponse(get_session(session_id).snapshot_dict())

    @app.get("/sessions/{session_id}/events")
    def events(session_id: str, request: Request, since: int = Query(0)):
        check_token(request)
        session = get_session(session_id)
        return {"events": [r.to_dict() for r in session.log.records[since:]]}

    @app.get("/sessions/{session_id}/insight")
    def insight(session_id: str, request: Request):
        check_token(request)
        session = get_session(session_id)
        return {"insight": session.insight_panel_view(),
                "transcript": session.speech.transcript.to_dict()}

    @app.get("/sessions/{session_id}/artifacts/{artifact_id}.png")
    def artifact_png(session_id: str, artifact_id: str, request: Request):
        check_token(request)
        session = get_session(session_id)
        try:
            art = session.artifacts.get(artifact_id)
        except UnknownArtifact as exc:
            raise HTTPException(status_code=404, detail=exc.message) from exc
        return Response(content=art.raster.data, media_type="image/png")

    @app.get("/sessions/{session_id}/canvas.png")
    def canvas_png(session_id: str, request: Request, scale: float = Query(1.0)):
        check_token(request)
        session = get_session(session_id)
        try:
            with session.lock:
                raster = rasterize(session.doc, scale, store=session.artifacts)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return Response(content=raster.data, media_type="image/png")

    @app.get("/sessions/{session_id}/gallery")
    def gallery_index(session_id: str, request: Request):
        check_token(request)
        return get_session(session_id).gallery.index_dict()

    @app.get("/sessions/{session_id}/gallery/{entry_id}/thumbnail.png")
    def gallery_thumbnail(session_id: str, entry_id: str, request: Request):
        check_token(request)
        session = get_session(session_id)
        try:
            entry = session.gallery.get(entry_id)
        except UnknownEntry as exc:
            raise HTTPException(status_code=404, detail=exc.message) from exc
        return Response(content=entry.thumbnail.data, media_type="image/png")

    @app.websocket("/sessions/{session_id}/ws")
    async def session_ws(websocket: WebSocket, session_id: str):
        if config.api_token and websocket.query_params.get("token") != config.api_token:
            await websocket.close(code=4401)
            return
        try:
            session = manager.get(session_id)
        except UnknownSession:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        try:
            while True:
                message = await websocket.receive()
                if message.get("type") == "websocket.disconnect":
                    break
                if message.get("bytes") is not None:
                    try:
                        header, samples = decode_audio_frame(message["bytes"])
                    except (SketchLoopError, ValueError) as exc:
                        await websocket.send_json({"type": "protocol_error", "message": str(exc)})
                        continue
                    # provider calls may block; keep them off the event loop
                    records = await run_in_threadpool(
                        session.handle, "audio_chunk", header, samples)
                else:
                    try:
                        command = json.loads(message.get("text") or "{}")
                    except ValueError as exc:
                        await websocket.send_json({"type": "protocol_error", "message": str(exc)})
                        continue
                    records = await run_in_threadpool(
                        session.handle, command.get("kind", ""), command.get("payload"))
                for record in records:
                    await websocket.send_json({"type": "event", **record.to_dict()})
        except WebSocketDisconnect:
            pass

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="app")

    return app
