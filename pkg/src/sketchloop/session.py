"""Event-sourced session orchestration.

Commands from the client (and completions from providers) become log records;
records are appended before any state mutation, and applying a record is a
pure function of prior state. That single rule buys the rest of the module
its guarantees:

  * crash consistency — replaying a truncated log reproduces exactly the
    state the prefix had, because no effect exists without its record;
  * deterministic replay — the same records (plus the blob sidecar) rebuild
    byte-identical snapshots, with provider calls skipped and their logged
    completions applied instead;
  * auditability — every rejected command is an ``error`` record, never a
    silent drop.

Live mode additionally *initiates* provider work while applying request
records. Completions do not touch state directly: they queue, and ``pump``
turns them into response records that re-enter the same ordering. A test can
set ``auto_pump=False`` to hold completions in flight (e.g. to exercise
latest-wins supersession of insight requests).

The command handlers validate against current state, then emit one or more
records. Handlers never mutate state themselves; all mutation lives in
``_apply``.
"""

import logging
import threading
import time
import uuid

from .canvas.gallery import Gallery
from .canvas.model import (
    AddStroke,
    CanvasDocument,
    EraseStrokes,
    PlacedImage,
    PlaceImage,
    Point,
    RasterImage,
    RegionSelection,
    ResetCanvas,
    Stroke,
)
from .canvas.raster import crop_region, rasterize, region_pixel_rect
from .chat import (
    ChatMode,
    ChatTurn,
    ConversationHistory,
    ImageArtifactStore,
    Provenance,
    TurnAuthor,
)
from .config import ServiceConfig
from .errors import (
    AlreadyOpen,
    EmptyPrompt,
    EmptyRegion,
    InputBlocked,
    InvalidAction,
    NothingToRedo,
    NothingToUndo,
    NotOpen,
    ProviderError,
    ReplayMismatch,
    SketchLoopError,
    StaleSegment,
    StreamBroken,
    UnknownTarget,
    WrongProvenance,
)
from .eventlog import BlobStore, EventLog, SessionEvent
from .prompts import (
    BundleKind,
    InsightKind,
    PromptBundle,
    build_insight_prompt,
    select_prompt_kind,
)
from .providers.base import ProviderRole, bundle_fingerprint
from .providers.mock import ProviderSet
from .serialize import canonical_bytes, sha256_hex
from .speech import SegmentStatus, SessionPhase, SpeechState, validate_pcm_chunk

log = logging.getLogger(__name__)

# record kinds (see PROTOCOL.md)
SESSION_START = "session_start"
STROKE_BEGIN = "stroke_begin"
STROKE_APPEND = "stroke_append"
STROKE_END = "stroke_end"
ERASE = "erase"
UNDO = "undo"
REDO = "redo"
RESET = "reset"
SELECT_REGION = "select_region"
SAVE_GALLERY = "save_gallery"
LOAD_GALLERY = "load_gallery"
AUDIO_CHUNK = "audio_chunk"
TRANSCRIPT_EVENT = "transcript_event"
OPEN_CHATBOT = "open_chatbot"
CLOSE_CHATBOT = "close_chatbot"
EDIT_TRANSCRIPT = "edit_transcript"
PHASE_CHANGED = "phase_changed"
INSIGHT_REQUEST = "insight_request"
INSIGHT_RESPONSE = "insight_response"
CHAT_SUBMIT = "chat_submit"
CHAT_RESPONSE = "chat_response"
EXPORT_IMAGE = "export_image"
ERROR = "error"

# commands a client may send; everything else is server-emitted
CLIENT_COMMANDS = frozenset({
    STROKE_BEGIN, STROKE_APPEND, STROKE_END, ERASE, UNDO, REDO, RESET,
    SELECT_REGION, SAVE_GALLERY, LOAD_GALLERY, AUDIO_CHUNK, OPEN_CHATBOT,
    CLOSE_CHATBOT, EDIT_TRANSCRIPT, CHAT_SUBMIT, EXPORT_IMAGE,
})

# canvas/toolbar commands rejected while the chatbot panel is open
_BLOCKED_WHILE_OPEN = frozenset({
    STROKE_BEGIN, STROKE_APPEND, STROKE_END, ERASE, UNDO, REDO, RESET,
    SELECT_REGION, SAVE_GALLERY, LOAD_GALLERY,
})


class SystemClock:
    """Monotonic session clock in milliseconds, starting at 0."""

    def __init__(self):
        self._t0 = time.monotonic()
        self._last = 0

    def now_ms(self) -> int:
        t = int((time.monotonic() - self._t0) * 1000)
        self._last = max(self._last, t)
        return self._last


class FakeClock:
    """Deterministic clock for tests: advances a fixed step per reading."""

    def __init__(self, start: int = 0, step: int = 10):
        self._t = start
        self._step = step

    def now_ms(self) -> int:
        self._t += self._step
        return self._t


class Session:
    def __init__(self, config: ServiceConfig, providers: ProviderSet | None = None,
                 session_id: str | None = None, clock=None,
                 log_dir: str | None = None, blob_store: BlobStore | None = None,
                 replay_mode: bool = False, verify_providers: ProviderSet | None = None,
                 auto_pump: bool = True):
        self.config = config
        self.providers = providers
        self.session_id = session_id or f"sess-{uuid.uuid4().hex[:12]}"
        self.clock = clock or SystemClock()
        self.auto_pump = auto_pump
        self._live = not replay_mode
        self._verify = verify_providers

        gallery_dir = None
        if log_dir is not None:
            from pathlib import Path

            root = Path(log_dir)
            self.log = EventLog(root / "events.ndjson")
            self.blobs = blob_store or BlobStore(root / "blobs")
            gallery_dir = root / "gallery"
        else:
            self.log = EventLog()
            self.blobs = blob_store or BlobStore()

        # state (mutated only by _apply)
        self.doc = CanvasDocument("canvas-0", config.canvas_width, config.canvas_height)
        self.speech = SpeechState()
        self.history = ConversationHistory(self.session_id)
        self.artifacts = ImageArtifactStore()
        self.gallery = Gallery(gallery_dir)
        self.selection: RegionSelection | None = None
        self.pending_stroke: dict | None = None
        self.pending_insight: str | None = None
        self.insight_seq = 0
        self.chat_queue: list[int] = []
        self.insight_panel: dict | None = None

        # bookkeeping outside snapshot state
        self._issued_fp: dict = {}
        self._verify_results: dict = {}
        self._completions: list[tuple] = []
        self._streams: dict[int, object] = {}
        self._raster_cache: dict = {}
        # single-writer guard: commands serialize, snapshots read consistently
        self.lock = threading.RLock()

        if self._live:
            if providers is None:
                raise InvalidAction("live session needs providers")
            self._emit(SESSION_START, {
                "session_id": self.session_id,
                "config": config.to_dict(),
            })

    # ------------------------------------------------------------------
    # command surface
    # ------------------------------------------------------------------

    def handle(self, kind: str, payload: dict | None = None,
               samples: bytes | None = None) -> list[SessionEvent]:
        """Process one client command; returns the records it produced."""
        with self.lock:
            start = len(self.log.records)
            payload = payload or {}
            try:
                if kind not in CLIENT_COMMANDS:
                    raise InvalidAction(f"unknown command {kind!r}")
                if kind in _BLOCKED_WHILE_OPEN and self.speech.phase is SessionPhase.CHATBOT_OPEN:
                    raise InputBlocked(f"{kind} is blocked while the chatbot is open")
                getattr(self, f"_cmd_{kind}")(payload, samples)
            except SketchLoopError as exc:
                self._error(exc.code, exc.message, command=kind)
            if self.auto_pump:
                self.pump()
            return self.log.records[start:]

    def pump(self) -> list[SessionEvent]:
        """Deliver queued provider completions as records (FIFO)."""
        with self.lock:
            return self._pump_locked()

    def _pump_locked(self) -> list[SessionEvent]:
        start = len(self.log.records)
        while self._completions:
            item = self._completions.pop(0)
            tag = item[0]
            if tag == "transcript":
                _, ev = item
                self._emit(TRANSCRIPT_EVENT, dict(ev))
            elif tag == "stream_broken":
                _, segment, message = item
                self._error(StreamBroken.code, message, op="audio", segment=segment)
            elif tag == "insight_ok":
                _, insight_id, text, fp, kind, based_on = item
                self._emit(INSIGHT_RESPONSE, {
                    "insight_id": insight_id,
                    "kind": kind,
                    "text": text,
                    "fingerprint": fp,
                    "based_on": based_on,
                })
            elif tag == "insight_err":
                _, insight_id, code, message = item
                self._error(code, message, op="insight", insight_id=insight_id)
            elif tag == "chat_ok":
                _, turn_id, mode, text, image, fp = item
                self._emit(CHAT_RESPONSE, {
                    "turn_id": turn_id,
                    "mode": mode,
                    "text": text,
                    "image": image,
                    "fingerprint": fp,
                })
            elif tag == "chat_err":
                _, turn_id, code, message = item
                self._error(code, message, op="chat", turn_id=turn_id)
        return self.log.records[start:]

    # ------------------------------------------------------------------
    # handlers: validate, then emit
    # ------------------------------------------------------------------

    def _cmd_stroke_begin(self, p: dict, _samples=None) -> None:
        width = float(p.get("width", 3.0))
        if width <= 0:
            raise InvalidAction("stroke width must be positive")
        color = self._validate_color(p.get("color", [0, 0, 0, 255]))
        point = self._validate_point(p.get("point"))
        if self.pending_stroke is not None:
            # client began a new stroke without ending the last: finalize it
            self._finalize_pending()
        will_start = self.speech.phase is SessionPhase.IDLE
        self._emit(STROKE_BEGIN, {
            "id": self.doc.allocate_id("s"),
            "width": width,
            "color": color,
            "point": point,
        })
        if will_start:
            self._emit_phase()

    def _cmd_stroke_append(self, p: dict, _samples=None) -> None:
        if self.pending_stroke is None:
            raise InvalidAction("no stroke in progress")
        self._emit(STROKE_APPEND, {"point": self._validate_point(p.get("point"))})

    def _cmd_stroke_end(self, p: dict, _samples=None) -> None:
        if self.pending_stroke is None:
            raise InvalidAction("no stroke in progress")
        self._finalize_pending()

    def _finalize_pending(self) -> None:
        self._emit(STROKE_END, {"id": self.pending_stroke["id"]})

    def _cmd_erase(self, p: dict, _samples=None) -> None:
        ids = list(p.get("ids", []))
        if not ids:
            raise InvalidAction("erase needs target ids")
        for sid in ids:
            el = self.doc.find(sid)
            if not isinstance(el, Stroke) or el.deleted:
                raise UnknownTarget(f"no visible stroke {sid!r}")
        self._emit(ERASE, {"ids": ids})

    def _cmd_undo(self, p: dict, _samples=None) -> None:
        if self.doc.undo_depth == 0:
            raise NothingToUndo("undo stack is empty")
        self._emit(UNDO, {})

    def _cmd_redo(self, p: dict, _samples=None) -> None:
        if self.doc.redo_depth == 0:
            raise NothingToRedo("redo stack is empty")
        self._emit(REDO, {})

    def _cmd_reset(self, p: dict, _samples=None) -> None:
        self._emit(RESET, {})

    def _cmd_select_region(self, p: dict, _samples=None) -> None:
        region = self._validate_region(p.get("region"))
        self._emit(SELECT_REGION, {"region": region.to_list()})

    def _cmd_save_gallery(self, p: dict, _samples=None) -> None:
        self._emit(SAVE_GALLERY, {"entry_id": f"entry-{self.gallery.next_entry:04d}"})

    def _cmd_load_gallery(self, p: dict, _samples=None) -> None:
        entry_id = p.get("entry_id", "")
        self.gallery.get(entry_id)  # raises UnknownEntry
        if self.pending_stroke is not None:
            # the pending stroke's id was allocated against the outgoing
            # document; land it there before swapping documents
            self._finalize_pending()
        self._emit(LOAD_GALLERY, {"entry_id": entry_id})

    def _cmd_audio_chunk(self, p: dict, samples: bytes | None = None) -> None:
        if samples is None:
            raise InvalidAction("audio_chunk needs PCM samples")
        duration_ms = validate_pcm_chunk(samples)
        seq = int(p.get("seq", -1))
        try:
            self.speech.check_chunk(seq)
        except SketchLoopError as exc:
            if exc.code == "gap_in_sequence":
                # abort + restart is a logged effect of the error record
                self._error(exc.code, exc.message, op="audio",
                            segment=self.speech.segment_index,
                            expected=self.speech.expected_seq, got=seq)
                return
            raise
        blob = self.blobs.put(samples)
        self._emit(AUDIO_CHUNK, {
            "segment": self.speech.segment_index,
            "seq": seq,
            "duration_ms": duration_ms,
            "samples_blob": blob,
        })

    def _cmd_open_chatbot(self, p: dict, _samples=None) -> None:
        if self.speech.phase is SessionPhase.CHATBOT_OPEN:
            raise AlreadyOpen("chatbot is already open")
        if self.pending_stroke is not None:
            self._finalize_pending()
        self._emit(OPEN_CHATBOT, {})
        self.pump()  # flush transcription results from the closed stream
        for seg in self.speech.transcript.interim_segments():
            # best-effort promotion: the user's trailing words become final
            self._emit(TRANSCRIPT_EVENT, {
                "segment_id": seg.segment_id,
                "text": seg.text,
                "status": SegmentStatus.FINAL.value,
                "t_start_ms": seg.t_start_ms,
                "t_end_ms": seg.t_end_ms,
            })
        self._emit_phase()
        self._request_insight()

    def _cmd_close_chatbot(self, p: dict, _samples=None) -> None:
        if self.speech.phase is not SessionPhase.CHATBOT_OPEN:
            raise NotOpen("chatbot is not open")
        self._emit(CLOSE_CHATBOT, {})
        self._emit_phase()

    def _cmd_edit_transcript(self, p: dict, _samples=None) -> None:
        if self.speech.phase is not SessionPhase.CHATBOT_OPEN:
            raise NotOpen("transcript edits require the chatbot panel")
        self._emit(EDIT_TRANSCRIPT, {"text": str(p.get("text", ""))})
        self._request_insight()

    def _cmd_chat_submit(self, p: dict, _samples=None) -> None:
        if self.speech.phase is not SessionPhase.CHATBOT_OPEN:
            raise NotOpen("chat requires the chatbot panel")
        retry_of = p.get("retry_of")
        if retry_of is not None:
            turn = self.history.get(int(retry_of))
            if turn.author is not TurnAuthor.USER:
                raise InvalidAction(f"turn {retry_of} is not a user turn")
            if turn.answered:
                raise InvalidAction(f"turn {retry_of} is already answered")
            if int(retry_of) in self.chat_queue:
                raise InvalidAction(f"turn {retry_of} is already queued")
            self._emit(CHAT_SUBMIT, {
                "turn_id": int(retry_of),
                "mode": turn.mode,
                "text": turn.text,
                "attachment_region": None,
                "retry_of": int(retry_of),
            })
            return
        mode = p.get("mode", "")
        if mode not in (ChatMode.TEXT.value, ChatMode.IMAGE.value):
            raise InvalidAction(f"unknown chat mode {mode!r}")
        text = str(p.get("text", ""))
        attachment = p.get("attachment")
        if not text and attachment is None:
            raise EmptyPrompt("chat needs text or a sketch attachment")
        region_list = None
        if attachment is not None:
            region = self._validate_region(attachment)
            region_pixel_rect(self.doc, region, 1.0)  # raises EmptyRegion
            region_list = region.normalized().to_list()
        self._emit(CHAT_SUBMIT, {
            "turn_id": self.history.next_turn_id(),
            "mode": mode,
            "text": text,
            "attachment_region": region_list,
            "retry_of": None,
        })

    def _cmd_export_image(self, p: dict, _samples=None) -> None:
        artifact_id = p.get("artifact_id", "")
        art = self.artifacts.get(artifact_id)  # raises UnknownArtifact
        if art.provenance is not Provenance.GENERATED:
            raise WrongProvenance("only generated images can be exported to the canvas")
        region = self._validate_region(p.get("region"))
        r = region.normalized()
        x0 = max(0.0, min(r.x0, self.doc.width))
        y0 = max(0.0, min(r.y0, self.doc.height))
        x1 = max(0.0, min(r.x1, self.doc.width))
        y1 = max(0.0, min(r.y1, self.doc.height))
        if not (x0 < x1 and y0 < y1):
            raise EmptyRegion("placement region is outside the canvas")
        self._emit(EXPORT_IMAGE, {"artifact_id": artifact_id, "region": r.to_list()})

    # ------------------------------------------------------------------
    # record application (the only state mutation path)
    # ------------------------------------------------------------------

    def _emit(self, kind: str, payload: dict) -> SessionEvent:
        event = self.log.append(kind, payload, self.clock.now_ms())
        self._apply(event)
        return event

    def apply_record(self, event: SessionEvent) -> None:
        """Replay path: append a recorded event and apply it."""
        appended = self.log.append(event.kind, event.payload, event.t_ms)
        if appended.seq != event.seq:
            raise ReplayMismatch(f"expected seq {appended.seq}, record has {event.seq}")
        self._apply(appended)

    def _apply(self, event: SessionEvent) -> None:
        p = event.payload
        kind = event.kind

        if kind == SESSION_START:
            return

        if kind == STROKE_BEGIN:
            if self.speech.sketch_activity():
                self._open_live_stream()
            self.pending_stroke = {
                "id": p["id"],
                "width": p["width"],
                "color": p["color"],
                "points": [p["point"]],
            }
        elif kind == STROKE_APPEND:
            self.pending_stroke["points"].append(p["point"])
        elif kind == STROKE_END:
            pending = self.pending_stroke
            self.pending_stroke = None
            stroke = Stroke(
                id=pending["id"],
                points=[Point(pt["x"], pt["y"], pt["t_ms"], pt["pressure"])
                        for pt in pending["points"]],
                width=pending["width"],
                color=tuple(pending["color"]),
            )
            self.doc.apply(AddStroke(stroke))
        elif kind == ERASE:
            self.doc.apply(EraseStrokes(p["ids"]))
        elif kind == UNDO:
            self.doc.undo()
        elif kind == REDO:
            self.doc.redo()
        elif kind == RESET:
            self.pending_stroke = None
            self.doc.apply(ResetCanvas())
        elif kind == SELECT_REGION:
            self.selection = RegionSelection.from_list(p["region"]).normalized()
        elif kind == SAVE_GALLERY:
            self.gallery.save(self.doc, event.t_ms, store=self.artifacts)
        elif kind == LOAD_GALLERY:
            self.pending_stroke = None
            revision = self.doc.revision + 1
            self.doc = self.gallery.load(p["entry_id"])
            self.doc.revision = revision
        elif kind == AUDIO_CHUNK:
            self.speech.accept_chunk(p["seq"])
            if self._live:
                stream = self._streams.get(self.speech.segment_index)
                if stream is not None:
                    samples = self.blobs.get(p["samples_blob"])
                    try:
                        for ev in stream.feed(p["seq"], samples, event.t_ms):
                            self._completions.append(("transcript", ev))
                    except StreamBroken as exc:
                        self._streams.pop(self.speech.segment_index, None)
                        self._completions.append(
                            ("stream_broken", self.speech.segment_index, exc.message))
        elif kind == TRANSCRIPT_EVENT:
            try:
                self.speech.apply_transcript_event(
                    p["segment_id"], p["text"], SegmentStatus(p["status"]),
                    p["t_start_ms"], p["t_end_ms"],
                )
            except StaleSegment as exc:
                log.warning("dropped stale transcript event: %s", exc.message)
        elif kind == OPEN_CHATBOT:
            closed = self.speech.open_chatbot()
            if closed and self._live:
                stream = self._streams.pop(self.speech.segment_index, None)
                if stream is not None:
                    try:
                        for ev in stream.finish():
                            self._completions.append(("transcript", ev))
                    except StreamBroken as exc:
                        self._completions.append(
                            ("stream_broken", self.speech.segment_index, exc.message))
        elif kind == CLOSE_CHATBOT:
            self.speech.close_chatbot()
        elif kind == PHASE_CHANGED:
            pass  # notification record; state already transitioned
        elif kind == EDIT_TRANSCRIPT:
            self.speech.edit_transcript(p["text"], event.t_ms)
        elif kind == INSIGHT_REQUEST:
            self._apply_insight_request(event)
        elif kind == INSIGHT_RESPONSE:
            self._apply_insight_response(event)
        elif kind == CHAT_SUBMIT:
            self._apply_chat_submit(event)
        elif kind == CHAT_RESPONSE:
            self._apply_chat_response(event)
        elif kind == EXPORT_IMAGE:
            art = self.artifacts.get(p["artifact_id"])
            r = RegionSelection.from_list(p["region"]).normalized()
            image = PlacedImage(
                id=self.doc.allocate_id("img"),
                artifact_ref=art.artifact_id,
                x=r.x0, y=r.y0, width=r.x1 - r.x0, height=r.y1 - r.y0,
            )
            self.doc.apply(PlaceImage(image))
        elif kind == ERROR:
            self._apply_error(event)
        else:
            raise ReplayMismatch(f"unknown record kind {kind!r}")

    # -- insight records --

    def _apply_insight_request(self, event: SessionEvent) -> None:
        p = event.payload
        expected_kind = select_prompt_kind(self.doc).value
        expected_text = self.speech.transcript.full_text()
        if p["kind"] != expected_kind:
            raise ReplayMismatch(
                f"insight kind {p['kind']} does not match state ({expected_kind})")
        if p["user_text"] != expected_text:
            raise ReplayMismatch("insight user_text does not match transcript state")

        bundle = build_insight_prompt(
            InsightKind(p["kind"]),
            p["user_text"],
            self.speech.transcript.revision,
            self._insight_raster(),
            self.doc.revision,
            self.history.provider_view(self.config.history_turn_budget),
            self.config.templates,
        )
        fp = bundle_fingerprint(ProviderRole.INSIGHT_TEXT, bundle)
        insight_id = p["insight_id"]
        self._issued_fp[("insight", insight_id)] = fp
        self.doc.insight_count += 1
        self.insight_seq += 1
        self.pending_insight = insight_id

        if self._live:
            try:
                text = self.providers.insight.complete(bundle)
                self._completions.append(("insight_ok", insight_id, text, fp,
                                          p["kind"], dict(bundle.based_on)))
            except ProviderError as exc:
                self._completions.append(("insight_err", insight_id, exc.code, exc.message))
        elif self._verify is not None:
            try:
                self._verify_results[fp] = self._verify.insight.complete(bundle)
            except ProviderError:
                pass

    def _apply_insight_response(self, event: SessionEvent) -> None:
        p = event.payload
        insight_id = p["insight_id"]
        expected_fp = self._issued_fp.get(("insight", insight_id))
        if expected_fp != p["fingerprint"]:
            raise ReplayMismatch(f"insight {insight_id} fingerprint mismatch")
        if self._verify is not None and expected_fp in self._verify_results:
            if self._verify_results[expected_fp] != p["text"]:
                raise ReplayMismatch(
                    f"insight {insight_id} text diverges from scripted provider")
        if self.pending_insight != insight_id:
            return  # superseded in flight: silently dropped
        self.pending_insight = None
        turn = ChatTurn(
            turn_id=self.history.next_turn_id(),
            author=TurnAuthor.INSIGHT,
            mode="INSIGHT",
            text=p["text"],
            insight_kind=p["kind"],
        )
        self.history.append(turn)
        self.insight_panel = {
            "insight_id": insight_id,
            "kind": p["kind"],
            "text": p["text"],
            "based_on": dict(p["based_on"]),
            "created_at_ms": event.t_ms,
        }

    # -- chat records --

    def _apply_chat_submit(self, event: SessionEvent) -> None:
        p = event.payload
        turn_id = p["turn_id"]
        if p.get("retry_of") is None:
            attachment_refs = []
            if p.get("attachment_region") is not None:
                region = RegionSelection.from_list(p["attachment_region"])
                raster = crop_region(self.doc, region, 1.0, store=self.artifacts)
                attachment_refs.append(
                    self.artifacts.put(raster, Provenance.SKETCH_CROP, event.t_ms))
            turn = ChatTurn(
                turn_id=turn_id,
                author=TurnAuthor.USER,
                mode=p["mode"],
                text=p["text"],
                attachment_refs=attachment_refs,
                answered=False,
            )
            self.history.append(turn)
        self.chat_queue.append(turn_id)
        if len(self.chat_queue) == 1:
            self._issue_chat(turn_id)

    def _issue_chat(self, turn_id: int) -> None:
        turn = self.history.get(turn_id)
        mode = ChatMode(turn.mode)
        bundle = PromptBundle(
            kind=BundleKind.CHAT_TEXT if mode is ChatMode.TEXT else BundleKind.CHAT_IMAGE,
            system_text="",
            user_text=turn.text,
            attachments=[self.artifacts.get(ref).raster for ref in turn.attachment_refs],
            history=self.history.provider_view(self.config.history_turn_budget),
        )
        role = ProviderRole.CHAT_TEXT if mode is ChatMode.TEXT else ProviderRole.CHAT_IMAGE
        fp = bundle_fingerprint(role, bundle)
        self._issued_fp[("chat", turn_id)] = fp

        if self._live:
            try:
                if mode is ChatMode.TEXT:
                    text = self.providers.chat_text.complete(bundle)
                    self._completions.append(("chat_ok", turn_id, mode.value, text, None, fp))
                else:
                    raster, description = self.providers.chat_image.generate(bundle)
                    blob = self.blobs.put(raster.data)
                    image = {"blob": blob, "width_px": raster.width_px,
                             "height_px": raster.height_px}
                    self._completions.append(
                        ("chat_ok", turn_id, mode.value, description, image, fp))
            except ProviderError as exc:
                self._completions.append(("chat_err", turn_id, exc.code, exc.message))
        elif self._verify is not None:
            try:
                if mode is ChatMode.TEXT:
                    self._verify_results[fp] = self._verify.chat_text.complete(bundle)
                else:
                    raster, description = self._verify.chat_image.generate(bundle)
                    self._verify_results[fp] = (sha256_hex(raster.data), description)
            except ProviderError:
                pass

    def _apply_chat_response(self, event: SessionEvent) -> None:
        p = event.payload
        turn_id = p["turn_id"]
        expected_fp = self._issued_fp.get(("chat", turn_id))
        if expected_fp != p["fingerprint"]:
            raise ReplayMismatch(f"chat turn {turn_id} fingerprint mismatch")
        if not self.chat_queue or self.chat_queue[0] != turn_id:
            raise ReplayMismatch(f"chat response for turn {turn_id} out of order")
        if self._verify is not None and expected_fp in self._verify_results:
            expected = self._verify_results[expected_fp]
            if p.get("image") is not None:
                if expected != (p["image"]["blob"], p["text"]):
                    raise ReplayMismatch(f"chat turn {turn_id} image diverges from script")
            elif expected != p["text"]:
                raise ReplayMismatch(f"chat turn {turn_id} text diverges from script")
        self.chat_queue.pop(0)
        user_turn = self.history.get(turn_id)
        user_turn.answered = True

        image_ref = None
        if p.get("image") is not None:
            png = self.blobs.get(p["image"]["blob"])
            raster = RasterImage(p["image"]["width_px"], p["image"]["height_px"], png)
            image_ref = self.artifacts.put(raster, Provenance.GENERATED, event.t_ms)
        turn = ChatTurn(
            turn_id=self.history.next_turn_id(),
            author=TurnAuthor.ASSISTANT,
            mode=p["mode"],
            text=p["text"],
            image_ref=image_ref,
        )
        self.history.append(turn)
        if self.chat_queue:
            self._issue_chat(self.chat_queue[0])

    # -- error records (some carry state effects) --

    def _error(self, code: str, message: str, **context) -> SessionEvent:
        payload = {"code": code, "message": message}
        payload.update(context)
        return self._emit(ERROR, payload)

    def _apply_error(self, event: SessionEvent) -> None:
        p = event.payload
        code = p["code"]
        if code in ("gap_in_sequence", "stream_broken"):
            if self.speech.recording_active:
                if self._live:
                    self._streams.pop(self.speech.segment_index, None)
                self.speech.abort_segment()
                self._open_live_stream()
        elif p.get("op") == "insight":
            if self.pending_insight == p.get("insight_id"):
                self.pending_insight = None
                self.insight_panel = {
                    "error": code,
                    "insight_id": p.get("insight_id"),
                    "created_at_ms": event.t_ms,
                }
        elif p.get("op") == "chat":
            turn_id = p.get("turn_id")
            if self.chat_queue and self.chat_queue[0] == turn_id:
                self.chat_queue.pop(0)
                # user turn stays unanswered; retry re-queues it
                if self.chat_queue:
                    self._issue_chat(self.chat_queue[0])

    # ------------------------------------------------------------------
    # helpers
    # ------------------------------------------------------------------

    def _open_live_stream(self) -> None:
        if self._live and self.speech.recording_active:
            self._streams[self.speech.segment_index] = (
                self.providers.transcriber.open_stream(self.speech.segment_index))

    def _emit_phase(self) -> SessionEvent:
        return self._emit(PHASE_CHANGED, {
            "phase": self.speech.phase.value,
            "recording_active": self.speech.recording_active,
        })

    def _request_insight(self) -> None:
        kind = select_prompt_kind(self.doc)
        self._emit(INSIGHT_REQUEST, {
            "insight_id": f"ins-{self.insight_seq}",
            "kind": kind.value,
            "user_text": self.speech.transcript.full_text(),
            "transcript_revision": self.speech.transcript.revision,
            "canvas_revision": self.doc.revision,
        })

    def _insight_raster(self) -> RasterImage:
        key = (self.doc.revision, self.config.insight_raster_scale)
        if key not in self._raster_cache:
            self._raster_cache.clear()  # only the current frame is useful
            self._raster_cache[key] = rasterize(
                self.doc, self.config.insight_raster_scale, store=self.artifacts)
        return self._raster_cache[key]

    @staticmethod
    def _validate_point(raw) -> dict:
        if not isinstance(raw, dict) or "x" not in raw or "y" not in raw:
            raise InvalidAction("point needs x and y")
        pressure = float(raw.get("pressure", 0.5))
        return {
            "x": float(raw["x"]),
            "y": float(raw["y"]),
            "t_ms": int(raw.get("t_ms", 0)),
            "pressure": min(1.0, max(0.0, pressure)),
        }

    @staticmethod
    def _validate_color(raw) -> list:
        if not isinstance(raw, (list, tuple)) or len(raw) != 4:
            raise InvalidAction("color must be an RGBA list")
        color = []
        for c in raw:
            c = int(c)
            if not 0 <= c <= 255:
                raise InvalidAction("color channels must be in 0..255")
            color.append(c)
        return color

    @staticmethod
    def _validate_region(raw) -> RegionSelection:
        if not isinstance(raw, (list, tuple)) or len(raw) != 4:
            raise InvalidAction("region must be [x0, y0, x1, y1]")
        region = RegionSelection.from_list(raw)
        if region.is_empty():
            raise EmptyRegion("region has no area")
        return region

    # ------------------------------------------------------------------
    # views
    # ------------------------------------------------------------------

    @property
    def phase(self) -> SessionPhase:
        return self.speech.phase

    @property
    def recording_active(self) -> bool:
        return self.speech.recording_active

    def insight_panel_view(self) -> dict | None:
        """Panel content with staleness computed at display time."""
        if self.insight_panel is None:
            return None
        view = dict(self.insight_panel)
        based_on = view.get("based_on")
        if based_on is not None:
            view["stale"] = (
                based_on["transcript_revision"] != self.speech.transcript.revision
                or based_on["canvas_revision"] != self.doc.revision
            )
        return view

    def snapshot_dict(self) -> dict:
        with self.lock:
            return self._snapshot_locked()

    def _snapshot_locked(self) -> dict:
        return {
            "session_id": self.session_id,
            "phase": self.speech.phase.value,
            "recording_active": self.speech.recording_active,
            "canvas": self.doc.to_dict(),
            "canvas_revision": self.doc.revision,
            "transcript": self.speech.transcript.to_dict(),
            "history": self.history.to_dicts(),
            "gallery": self.gallery.index_dict(),
            "artifacts": self.artifacts.index_dict(),
            "insight_panel": self.insight_panel,
            "pending": {
                "stroke": self.pending_stroke,
                "insight": self.pending_insight,
                "chat_queue": list(self.chat_queue),
                "unanswered_turns": [t.turn_id for t in self.history.turns
                                     if t.author is TurnAuthor.USER and not t.answered],
                "selection": self.selection.to_list() if self.selection else None,
                "segment_index": self.speech.segment_index,
                "expected_seq": self.speech.expected_seq,
                "generation": self.speech.generation,
                "insight_seq": self.insight_seq,
            },
        }

    def snapshot_bytes(self) -> bytes:
        return canonical_bytes(self.snapshot_dict())

    def close(self) -> None:
        self.log.close()


class SessionManager:
    """Registry for concurrently running sessions (server layer)."""

    def __init__(self, config: ServiceConfig, providers: ProviderSet,
                 data_dir: str | None = None):
        self.config = config
        self.providers = providers
        self.data_dir = data_dir
        self._sessions: dict[str, Session] = {}

    def create(self, session_id: str | None = None) -> Session:
        log_dir = None
        if self.data_dir is not None:
            from pathlib import Path

            session_id = session_id or f"sess-{uuid.uuid4().hex[:12]}"
            log_dir = str(Path(self.data_dir) / session_id)
        session = Session(self.config, self.providers, session_id=session_id,
                          log_dir=log_dir)
        self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        from .errors import UnknownSession

        if session_id not in self._sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self._sessions[session_id]

    def ids(self) -> list[str]:
        return list(self._sessions)
