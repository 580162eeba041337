"""Conversation history and the image artifact store.

One append-only turn list per session, shared by insight generations and both
chat modes. Turn content is immutable once appended; the ``answered`` flag on
a user turn is session presentation state (it flips when the provider call
fails or a retry succeeds) and is deliberately excluded from the turn's
serialized form so observed history prefixes never change.

Artifacts are content-addressed: the id is the SHA-256 of the PNG payload,
so identical content dedupes and references are stable across replays.
"""

import time
from dataclasses import dataclass, field
from enum import Enum

from .canvas.model import RasterImage
from .errors import UnknownArtifact
from .png import decode_png
from .serialize import sha256_hex


class ChatMode(str, Enum):
    TEXT = "TEXT"
    IMAGE = "IMAGE"


class TurnAuthor(str, Enum):
    USER = "USER"
    ASSISTANT = "ASSISTANT"
    INSIGHT = "INSIGHT"


class Provenance(str, Enum):
    GENERATED = "GENERATED"
    SKETCH_CROP = "SKETCH_CROP"


@dataclass
class ChatTurn:
    turn_id: int
    author: TurnAuthor
    mode: str  # TEXT | IMAGE | INSIGHT
    text: str
    attachment_refs: list[str] = field(default_factory=list)
    image_ref: str | None = None
    answered: bool = True
    insight_kind: str | None = None

    def to_dict(self) -> dict:
        return {
            "turn_id": self.turn_id,
            "author": self.author.value,
            "mode": self.mode,
            "text": self.text,
            "attachment_refs": list(self.attachment_refs),
            "image_ref": self.image_ref,
            "insight_kind": self.insight_kind,
        }


class ConversationHistory:
    def __init__(self, session_id: str):
        self.session_id = session_id
        self.turns: list[ChatTurn] = []

    def append(self, turn: ChatTurn) -> ChatTurn:
        assert turn.turn_id == len(self.turns), "turn ids must be dense"
        self.turns.append(turn)
        return turn

    def next_turn_id(self) -> int:
        return len(self.turns)

    def get(self, turn_id: int) -> ChatTurn:
        if 0 <= turn_id < len(self.turns):
            return self.turns[turn_id]
        raise UnknownArtifact(f"no turn {turn_id}")

    def to_dicts(self) -> list[dict]:
        return [t.to_dict() for t in self.turns]

    def provider_view(self, turn_budget: int) -> list[dict]:
        """History sent to providers: oldest non-insight turns drop first
        when over budget. The stored history itself is never truncated."""
        turns = self.turns
        if len(turns) <= turn_budget:
            return [t.to_dict() for t in turns]
        overflow = len(turns) - turn_budget
        kept: list[ChatTurn] = []
        for t in turns:
            if overflow > 0 and t.author is not TurnAuthor.INSIGHT:
                overflow -= 1
                continue
            kept.append(t)
        return [t.to_dict() for t in kept]


@dataclass
class StoredArtifact:
    artifact_id: str
    raster: RasterImage
    provenance: Provenance
    created_at_ms: int


class ImageArtifactStore:
    def __init__(self):
        self._items: dict[str, StoredArtifact] = {}
        self._order: list[str] = []
        self._decoded: dict[str, tuple[bytes, int, int]] = {}

    def put(self, raster: RasterImage, provenance: Provenance,
            created_at_ms: int | None = None) -> str:
        artifact_id = sha256_hex(raster.data)
        if artifact_id not in self._items:
            if created_at_ms is None:
                created_at_ms = int(time.time() * 1000)
            self._items[artifact_id] = StoredArtifact(
                artifact_id, raster, provenance, created_at_ms)
            self._order.append(artifact_id)
        return artifact_id

    def has(self, artifact_id: str) -> bool:
        return artifact_id in self._items

    def get(self, artifact_id: str) -> StoredArtifact:
        if artifact_id not in self._items:
            raise UnknownArtifact(f"no artifact {artifact_id!r}")
        return self._items[artifact_id]

    def decoded_pixels(self, artifact_id: str) -> tuple[bytes, int, int]:
        """Raw RGBA pixels for the rasterizer, cached per artifact."""
        if artifact_id not in self._decoded:
            art = self.get(artifact_id)
            w, h, rgba = decode_png(art.raster.data)
            self._decoded[artifact_id] = (rgba, w, h)
        return self._decoded[artifact_id]

    def index_dict(self) -> dict:
        return {
            aid: {
                "width_px": art.raster.width_px,
                "height_px": art.raster.height_px,
                "provenance": art.provenance.value,
                "created_at_ms": art.created_at_ms,
            }
            for aid in self._order
            for art in [self._items[aid]]
        }
