"""Deterministic offline providers.

Mocks are the default for tests and the replay harness. Responses are a pure
function of the request fingerprint: scripted fingerprints return their
scripted response, everything else falls back to a deterministic synthetic
response (strict mode turns unscripted requests into MalformedResponse
instead). Every call is captured so tests can compare what providers actually
received against orchestrator state.

Transcription mocks are keyed on cumulative chunk count within a recording
segment: script entries fire when the count reaches their threshold; without
a script, a synthetic utterance is produced every few chunks.
"""

import base64
import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..canvas.model import RasterImage
from ..errors import MalformedResponse, ProviderError, StreamBroken
from ..png import encode_png
from ..prompts import PromptBundle
from .base import (
    ImageProvider,
    ProviderRole,
    TextProvider,
    TranscriptionProvider,
    TranscriptionStream,
    bundle_fingerprint,
)

DEFAULT_INTERIM_EVERY = 2
DEFAULT_FINAL_EVERY = 5


@dataclass
class CapturedRequest:
    fingerprint: str
    role: str
    kind: str
    system_text: str
    user_text: str
    attachment_hashes: list[str]
    history: list[dict]


def _capture(role: str, fingerprint: str, bundle: PromptBundle) -> CapturedRequest:
    from ..serialize import sha256_hex

    return CapturedRequest(
        fingerprint=fingerprint,
        role=role,
        kind=bundle.kind.value,
        system_text=bundle.system_text,
        user_text=bundle.user_text,
        attachment_hashes=[sha256_hex(a.data) for a in bundle.attachments],
        history=copy.deepcopy(bundle.history),
    )


class MockTextProvider(TextProvider):
    def __init__(self, role: str = ProviderRole.CHAT_TEXT,
                 script: dict[str, str] | None = None, strict: bool = False):
        self.role = role
        self.script = dict(script or {})
        self.strict = strict
        self.captured: list[CapturedRequest] = []
        self._failures: list[Exception] = []

    def fail_next(self, exc: Exception) -> None:
        self._failures.append(exc)

    def complete(self, bundle: PromptBundle) -> str:
        fp = bundle_fingerprint(self.role, bundle)
        self.captured.append(_capture(self.role, fp, bundle))
        if self._failures:
            raise self._failures.pop(0)
        if fp in self.script:
            text = self.script[fp]
        elif self.strict:
            raise MalformedResponse(f"no scripted response for fingerprint {fp[:16]}")
        else:
            text = f"[{bundle.kind.value.lower()}] mock response {fp[:12]}"
        if not text:
            raise MalformedResponse("provider returned empty text")
        return text


def solid_png(width: int, height: int, rgba: tuple[int, int, int, int]) -> RasterImage:
    row = bytes(rgba) * width
    return RasterImage(width, height, encode_png(width, height, row * height))


class MockImageProvider(ImageProvider):
    IMAGE_SIZE = 64

    def __init__(self, script: dict[str, dict] | None = None, strict: bool = False):
        self.role = ProviderRole.CHAT_IMAGE
        self.script = dict(script or {})
        self.strict = strict
        self.captured: list[CapturedRequest] = []
        self._failures: list[Exception] = []

    def fail_next(self, exc: Exception) -> None:
        self._failures.append(exc)

    def generate(self, bundle: PromptBundle) -> tuple[RasterImage, str]:
        fp = bundle_fingerprint(self.role, bundle)
        self.captured.append(_capture(self.role, fp, bundle))
        if self._failures:
            raise self._failures.pop(0)
        if fp in self.script:
            entry = self.script[fp]
            description = entry.get("description", "")
            png = base64.b64decode(entry["png_b64"])
            from ..png import decode_png

            w, h, _ = decode_png(png)  # raises MalformedResponse if corrupt
            raster = RasterImage(w, h, png)
        elif self.strict:
            raise MalformedResponse(f"no scripted image for fingerprint {fp[:16]}")
        else:
            # color derived from the fingerprint: deterministic and distinct
            color = (int(fp[0:2], 16), int(fp[2:4], 16), int(fp[4:6], 16), 255)
            raster = solid_png(self.IMAGE_SIZE, self.IMAGE_SIZE, color)
            description = f"mock concept render {fp[:12]}"
        if not description:
            raise MalformedResponse("provider returned empty description")
        return raster, description


class MockTranscriptionStream(TranscriptionStream):
    def __init__(self, segment_index: int, script: list[dict] | None,
                 break_after: int | None = None):
        self.segment_index = segment_index
        self.script = sorted(script, key=lambda e: e["after_chunks"]) if script else None
        self._script_pos = 0
        self._break_after = break_after
        self.chunk_count = 0
        self.utterance = 0
        self._utterance_start_ms = 0
        self._last_t_ms = 0
        self._open_utterance = False
        self.finished = False

    def _segment_id(self) -> str:
        return f"s{self.segment_index}-{self.utterance}"

    def feed(self, seq: int, samples: bytes, t_ms: int) -> list[dict]:
        if self.finished:
            return []
        if self._break_after is not None and self.chunk_count >= self._break_after:
            self.finished = True
            raise StreamBroken("transcription stream disconnected")
        if not self._open_utterance:
            self._utterance_start_ms = t_ms
            self._open_utterance = True
        self.chunk_count += 1
        self._last_t_ms = t_ms

        if self.script is not None:
            return self._scripted_events()

        events = []
        in_utterance = self.chunk_count - self.utterance * DEFAULT_FINAL_EVERY
        if in_utterance == DEFAULT_FINAL_EVERY:
            events.append(self._event(self._default_text(), "FINAL"))
            self.utterance += 1
            self._open_utterance = False
        elif in_utterance % DEFAULT_INTERIM_EVERY == 0:
            events.append(self._event(f"{self._default_text()} …", "INTERIM"))
        return events

    def finish(self) -> list[dict]:
        if self.finished:
            return []
        self.finished = True
        if self.script is not None:
            # flush remaining scripted entries as finals
            events = []
            while self._script_pos < len(self.script):
                entry = self.script[self._script_pos]
                self._script_pos += 1
                events.append(self._entry_event(entry, force_final=True))
            return events
        if self._open_utterance and self.chunk_count > self.utterance * DEFAULT_FINAL_EVERY:
            event = self._event(self._default_text(), "FINAL")
            self.utterance += 1
            return [event]
        return []

    def _default_text(self) -> str:
        return f"voice note {self.segment_index}.{self.utterance}"

    def _event(self, text: str, status: str) -> dict:
        return {
            "segment_id": self._segment_id(),
            "text": text,
            "status": status,
            "t_start_ms": self._utterance_start_ms,
            "t_end_ms": self._last_t_ms,
        }

    def _scripted_events(self) -> list[dict]:
        events = []
        while (self._script_pos < len(self.script)
               and self.script[self._script_pos]["after_chunks"] <= self.chunk_count):
            entry = self.script[self._script_pos]
            self._script_pos += 1
            events.append(self._entry_event(entry))
        return events

    def _entry_event(self, entry: dict, force_final: bool = False) -> dict:
        status = "FINAL" if force_final else entry.get("status", "FINAL")
        if "utterance" in entry:
            self.utterance = entry["utterance"]
        event = self._event(entry["text"], status)
        if status == "FINAL":
            self.utterance += 1
            self._open_utterance = False
        return event


class MockTranscriber(TranscriptionProvider):
    def __init__(self, script: dict[str, list[dict]] | None = None):
        self.role = ProviderRole.TRANSCRIBE
        # script maps str(segment_index) -> chunk-count window entries
        self.script = script or {}
        self._break_after: dict[int, int] = {}
        self.streams_opened = 0

    def break_stream(self, segment_index: int, after_chunks: int) -> None:
        self._break_after[segment_index] = after_chunks

    def open_stream(self, segment_index: int) -> MockTranscriptionStream:
        self.streams_opened += 1
        return MockTranscriptionStream(
            segment_index,
            self.script.get(str(segment_index)),
            break_after=self._break_after.get(segment_index),
        )


@dataclass
class MockScripts:
    """Fixture file format: fingerprint-keyed text/image responses plus
    chunk-count windows for transcription."""

    text: dict[str, str] = field(default_factory=dict)
    image: dict[str, dict] = field(default_factory=dict)
    transcribe: dict[str, list[dict]] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: str | Path) -> "MockScripts":
        raw = json.loads(Path(path).read_text())
        return cls(
            text=raw.get("text", {}),
            image=raw.get("image", {}),
            transcribe=raw.get("transcribe", {}),
        )

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps({
            "text": self.text,
            "image": self.image,
            "transcribe": self.transcribe,
        }, indent=2, sort_keys=True))


@dataclass
class ProviderSet:
    transcriber: TranscriptionProvider
    insight: TextProvider
    chat_text: TextProvider
    chat_image: ImageProvider

    def text_provider_for(self, role: str) -> TextProvider:
        if role == ProviderRole.INSIGHT_TEXT:
            return self.insight
        if role == ProviderRole.CHAT_TEXT:
            return self.chat_text
        raise ProviderError(f"no text provider for role {role}")


def build_mock_providers(scripts: MockScripts | None = None,
                         strict: bool = False) -> ProviderSet:
    scripts = scripts or MockScripts()
    return ProviderSet(
        transcriber=MockTranscriber(scripts.transcribe),
        insight=MockTextProvider(ProviderRole.INSIGHT_TEXT, scripts.text, strict),
        chat_text=MockTextProvider(ProviderRole.CHAT_TEXT, scripts.text, strict),
        chat_image=MockImageProvider(scripts.image, strict),
    )
