"""Live provider adapters.

Plain HTTPS with JSON payloads; the vendor-specific shape stops here so model
churn never leaks into the orchestration layer. Live mode is opt-in via
configuration — the test suite and replay harness run entirely on mocks.

Requests carry attachments and images as base64 PNG. Credentials come from
the environment variable named in the provider config and are sent as a
bearer token; they are never logged or serialized.
"""

import base64

import requests

from ..canvas.model import RasterImage
from ..errors import MalformedResponse, ProviderTimeout, RateLimited
from ..png import decode_png
from ..prompts import PromptBundle
from .base import (
    ImageProvider,
    ProviderConfig,
    TextProvider,
    TranscriptionProvider,
    TranscriptionStream,
    call_with_retries,
)


def _request_payload(config: ProviderConfig, bundle: PromptBundle) -> dict:
    return {
        "model": config.model,
        "system": bundle.system_text,
        "user": bundle.user_text,
        "images_b64": [base64.b64encode(a.data).decode("ascii") for a in bundle.attachments],
        "history": bundle.history,
    }


def _post(config: ProviderConfig, payload: dict) -> dict:
    headers = {}
    secret = config.resolve_credential()
    if secret:
        headers["authorization"] = f"Bearer {secret}"
    try:
        resp = requests.post(config.endpoint, json=payload, headers=headers,
                             timeout=config.timeout_ms / 1000.0)
    except requests.Timeout as exc:
        raise ProviderTimeout(f"{config.role} call exceeded {config.timeout_ms}ms") from exc
    if resp.status_code == 429:
        raise RateLimited(f"{config.role} rate limited")
    if resp.status_code >= 400:
        raise MalformedResponse(f"{config.role} returned HTTP {resp.status_code}")
    try:
        return resp.json()
    except ValueError as exc:
        raise MalformedResponse(f"{config.role} returned non-JSON body") from exc


class HttpTextProvider(TextProvider):
    def __init__(self, config: ProviderConfig):
        self.config = config
        self.role = config.role

    def complete(self, bundle: PromptBundle) -> str:
        def attempt():
            body = _post(self.config, _request_payload(self.config, bundle))
            text = body.get("text", "")
            if not isinstance(text, str) or not text:
                raise MalformedResponse(f"{self.role} returned empty text")
            return text

        return call_with_retries(attempt, self.config.max_retries)


class HttpImageProvider(ImageProvider):
    def __init__(self, config: ProviderConfig):
        self.config = config
        self.role = config.role

    def generate(self, bundle: PromptBundle) -> tuple[RasterImage, str]:
        def attempt():
            body = _post(self.config, _request_payload(self.config, bundle))
            description = body.get("text", "")
            if not isinstance(description, str) or not description:
                raise MalformedResponse("image provider returned empty description")
            try:
                png = base64.b64decode(body.get("image_b64", ""), validate=True)
            except Exception as exc:
                raise MalformedResponse("image provider returned undecodable base64") from exc
            w, h, _ = decode_png(png)  # raises MalformedResponse on corrupt bytes
            return RasterImage(w, h, png), description

        return call_with_retries(attempt, self.config.max_retries)


class HttpTranscriptionStream(TranscriptionStream):
    """Buffering adapter: chunks accumulate and are transcribed on finish.

    True incremental streaming is vendor-specific; this adapter keeps the
    session-facing contract (ordered events, FINAL on close) over a plain
    request/response endpoint.
    """

    def __init__(self, config: ProviderConfig, segment_index: int):
        self.config = config
        self.segment_index = segment_index
        self._buffer = bytearray()
        self._t_start: int | None = None
        self._t_end = 0
        self.finished = False

    def feed(self, seq: int, samples: bytes, t_ms: int) -> list[dict]:
        if self._t_start is None:
            self._t_start = t_ms
        self._t_end = t_ms
        self._buffer += samples
        return []

    def finish(self) -> list[dict]:
        if self.finished or not self._buffer:
            self.finished = True
            return []
        self.finished = True
        body = _post(self.config, {
            "model": self.config.model,
            "pcm16_b64": base64.b64encode(bytes(self._buffer)).decode("ascii"),
            "sample_rate": 16000,
        })
        text = body.get("text", "")
        if not isinstance(text, str):
            raise MalformedResponse("transcriber returned non-text payload")
        return [{
            "segment_id": f"s{self.segment_index}-0",
            "text": text,
            "status": "FINAL",
            "t_start_ms": self._t_start or 0,
            "t_end_ms": self._t_end,
        }]


class HttpTranscriber(TranscriptionProvider):
    def __init__(self, config: ProviderConfig):
        self.config = config
        self.role = config.role

    def open_stream(self, segment_index: int) -> HttpTranscriptionStream:
        return HttpTranscriptionStream(self.config, segment_index)
