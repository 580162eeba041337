"""Vector canvas document model.

A CanvasDocument is an ordered list of strokes and placed images plus a
command-style undo/redo history. Erase is stroke-level: an erased stroke is
marked deleted (and skipped by the rasterizer) so the operation is cheaply
reversible. One completed stroke is one undoable action.

Canonical serialization (``to_dict``/``canonical_bytes``) covers everything
needed to reconstruct behavior — elements, insight counter, both history
stacks, the id counter — but deliberately excludes ``revision``, which is
in-memory bookkeeping that undo/redo bumps as well (so undo∘redo could never
be a serialization identity if it were included).
"""

from dataclasses import dataclass, field

from ..errors import (
    DuplicateId,
    EmptyRegion,
    EmptyStroke,
    InvalidAction,
    NothingToRedo,
    NothingToUndo,
    UnknownTarget,
)
from ..serialize import canonical_bytes, digest

DEFAULT_WIDTH = 1024.0
DEFAULT_HEIGHT = 768.0


def _clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


@dataclass
class Point:
    x: float
    y: float
    t_ms: int = 0
    pressure: float = 0.5

    def to_list(self) -> list:
        return [self.x, self.y, self.t_ms, self.pressure]

    @classmethod
    def from_list(cls, raw) -> "Point":
        return cls(float(raw[0]), float(raw[1]), int(raw[2]), float(raw[3]))


@dataclass
class Stroke:
    id: str
    points: list[Point]
    width: float = 3.0
    color: tuple[int, int, int, int] = (0, 0, 0, 255)
    deleted: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": "stroke",
            "id": self.id,
            "points": [p.to_list() for p in self.points],
            "width": self.width,
            "color": list(self.color),
            "deleted": self.deleted,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "Stroke":
        return cls(
            id=raw["id"],
            points=[Point.from_list(p) for p in raw["points"]],
            width=float(raw["width"]),
            color=tuple(raw["color"]),
            deleted=bool(raw["deleted"]),
        )


@dataclass
class PlacedImage:
    id: str
    artifact_ref: str
    x: float
    y: float
    width: float
    height: float

    def to_dict(self) -> dict:
        return {
            "kind": "image",
            "id": self.id,
            "artifact_ref": self.artifact_ref,
            "x": self.x,
            "y": self.y,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "PlacedImage":
        return cls(
            id=raw["id"],
            artifact_ref=raw["artifact_ref"],
            x=float(raw["x"]),
            y=float(raw["y"]),
            width=float(raw["width"]),
            height=float(raw["height"]),
        )


@dataclass(frozen=True)
class RegionSelection:
    x0: float
    y0: float
    x1: float
    y1: float

    def normalized(self) -> "RegionSelection":
        x0, x1 = sorted((self.x0, self.x1))
        y0, y1 = sorted((self.y0, self.y1))
        return RegionSelection(x0, y0, x1, y1)

    def is_empty(self) -> bool:
        r = self.normalized()
        return not (r.x0 < r.x1 and r.y0 < r.y1)

    def to_list(self) -> list:
        return [self.x0, self.y0, self.x1, self.y1]

    @classmethod
    def from_list(cls, raw) -> "RegionSelection":
        return cls(float(raw[0]), float(raw[1]), float(raw[2]), float(raw[3]))


@dataclass
class RasterImage:
    """An encoded raster payload (PNG) with its pixel dimensions."""

    width_px: int
    height_px: int
    data: bytes


# --- actions ----------------------------------------------------------------

@dataclass
class AddStroke:
    stroke: Stroke

    def to_dict(self) -> dict:
        return {"type": "add_stroke", "stroke": self.stroke.to_dict()}


@dataclass
class EraseStrokes:
    ids: list[str]

    def to_dict(self) -> dict:
        return {"type": "erase_strokes", "ids": list(self.ids)}


@dataclass
class PlaceImage:
    image: PlacedImage

    def to_dict(self) -> dict:
        return {"type": "place_image", "image": self.image.to_dict()}


@dataclass
class MoveSelection:
    ids: list[str]
    dx: float
    dy: float

    def to_dict(self) -> dict:
        return {"type": "move_selection", "ids": list(self.ids), "dx": self.dx, "dy": self.dy}


@dataclass
class ResetCanvas:
    def to_dict(self) -> dict:
        return {"type": "reset"}


Action = AddStroke | EraseStrokes | PlaceImage | MoveSelection | ResetCanvas


def action_from_dict(raw: dict) -> Action:
    t = raw.get("type")
    if t == "add_stroke":
        return AddStroke(Stroke.from_dict(raw["stroke"]))
    if t == "erase_strokes":
        return EraseStrokes(list(raw["ids"]))
    if t == "place_image":
        return PlaceImage(PlacedImage.from_dict(raw["image"]))
    if t == "move_selection":
        return MoveSelection(list(raw["ids"]), float(raw["dx"]), float(raw["dy"]))
    if t == "reset":
        return ResetCanvas()
    raise InvalidAction(f"unknown action type {t!r}")


@dataclass
class _HistoryEntry:
    action: dict
    undo_data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"action": self.action, "undo_data": self.undo_data}

    @classmethod
    def from_dict(cls, raw: dict) -> "_HistoryEntry":
        return cls(action=raw["action"], undo_data=raw.get("undo_data", {}))


class CanvasDocument:
    def __init__(self, canvas_id: str = "canvas-0",
                 width: float = DEFAULT_WIDTH, height: float = DEFAULT_HEIGHT):
        if width <= 0 or height <= 0:
            raise InvalidAction("canvas dimensions must be positive")
        self.canvas_id = canvas_id
        self.width = float(width)
        self.height = float(height)
        self.elements: list[Stroke | PlacedImage] = []
        self.insight_count = 0
        self.revision = 0
        self.next_id = 1
        self._undo: list[_HistoryEntry] = []
        self._redo: list[_HistoryEntry] = []

    # -- id allocation (server-assigned, deterministic) --

    def allocate_id(self, prefix: str) -> str:
        """Peek the next element id without consuming it."""
        return f"{prefix}{self.next_id}"

    # -- lookup --

    def find(self, element_id: str):
        for el in self.elements:
            if el.id == element_id:
                return el
        return None

    def visible_strokes(self) -> list[Stroke]:
        return [e for e in self.elements if isinstance(e, Stroke) and not e.deleted]

    @property
    def undo_depth(self) -> int:
        return len(self._undo)

    @property
    def redo_depth(self) -> int:
        return len(self._redo)

    # -- mutation --

    def apply(self, action: Action) -> None:
        """Apply one action, push its inverse, clear redo, bump revision."""
        if isinstance(action, ResetCanvas):
            self.elements = []
            self.insight_count = 0
            self._undo = []
            self._redo = []
            self.revision += 1
            return

        undo_data: dict = {}
        if isinstance(action, AddStroke):
            stroke = action.stroke
            if not stroke.points:
                raise EmptyStroke("stroke has no points")
            if stroke.width <= 0:
                raise InvalidAction("stroke width must be positive")
            if self.find(stroke.id) is not None:
                raise DuplicateId(f"element id {stroke.id!r} already in use")
            self._sanitize_points(stroke.points)
            self.elements.append(stroke)
            self.next_id += 1
        elif isinstance(action, EraseStrokes):
            if not action.ids:
                raise InvalidAction("erase needs at least one target")
            targets = []
            for sid in action.ids:
                el = self.find(sid)
                if not isinstance(el, Stroke) or el.deleted:
                    raise UnknownTarget(f"no visible stroke {sid!r}")
                targets.append(el)
            for el in targets:
                el.deleted = True
        elif isinstance(action, PlaceImage):
            img = action.image
            if self.find(img.id) is not None:
                raise DuplicateId(f"element id {img.id!r} already in use")
            if img.width <= 0 or img.height <= 0:
                raise EmptyRegion("image placement has no area")
            clamped = self._clamp_rect(img)
            if clamped is None:
                raise EmptyRegion("image placement entirely outside canvas")
            action = PlaceImage(clamped)
            self.elements.append(clamped)
            self.next_id += 1
        elif isinstance(action, MoveSelection):
            if not action.ids:
                raise InvalidAction("move needs at least one target")
            originals: dict[str, list] = {}
            targets = []
            for sid in action.ids:
                el = self.find(sid)
                if not isinstance(el, Stroke) or el.deleted:
                    raise UnknownTarget(f"no visible stroke {sid!r}")
                targets.append(el)
                originals[sid] = [[p.x, p.y] for p in el.points]
            for el in targets:
                for p in el.points:
                    p.x += action.dx
                    p.y += action.dy
            # exact coordinates are restored on undo; float add/subtract
            # round-trips are not guaranteed
            undo_data = {"original_points": originals}
        else:
            raise InvalidAction(f"unsupported action {type(action).__name__}")

        self._undo.append(_HistoryEntry(action.to_dict(), undo_data))
        self._redo = []
        self.revision += 1

    def undo(self) -> None:
        if not self._undo:
            raise NothingToUndo()
        entry = self._undo.pop()
        self._invert(entry)
        self._redo.append(entry)
        self.revision += 1

    def redo(self) -> None:
        if not self._redo:
            raise NothingToRedo()
        entry = self._redo.pop()
        self._reapply(entry)
        self._undo.append(entry)
        self.revision += 1

    def _invert(self, entry: _HistoryEntry) -> None:
        action = entry.action
        t = action["type"]
        if t == "add_stroke":
            self._remove_element(action["stroke"]["id"])
        elif t == "erase_strokes":
            for sid in action["ids"]:
                el = self.find(sid)
                assert isinstance(el, Stroke)
                el.deleted = False
        elif t == "place_image":
            self._remove_element(action["image"]["id"])
        elif t == "move_selection":
            for sid, pts in entry.undo_data["original_points"].items():
                el = self.find(sid)
                assert isinstance(el, Stroke)
                for p, (ox, oy) in zip(el.points, pts):
                    p.x = ox
                    p.y = oy
        else:
            raise InvalidAction(f"cannot invert action {t!r}")

    def _reapply(self, entry: _HistoryEntry) -> None:
        action = entry.action
        t = action["type"]
        if t == "add_stroke":
            self.elements.append(Stroke.from_dict(action["stroke"]))
        elif t == "erase_strokes":
            for sid in action["ids"]:
                el = self.find(sid)
                assert isinstance(el, Stroke)
                el.deleted = True
        elif t == "place_image":
            self.elements.append(PlacedImage.from_dict(action["image"]))
        elif t == "move_selection":
            for sid in action["ids"]:
                el = self.find(sid)
                assert isinstance(el, Stroke)
                for p in el.points:
                    p.x += action["dx"]
                    p.y += action["dy"]
        else:
            raise InvalidAction(f"cannot redo action {t!r}")

    def _remove_element(self, element_id: str) -> None:
        for i, el in enumerate(self.elements):
            if el.id == element_id:
                del self.elements[i]
                return
        raise UnknownTarget(f"element {element_id!r} not found")

    def _sanitize_points(self, points: list[Point]) -> None:
        last_t = 0
        for p in points:
            p.pressure = _clamp(p.pressure, 0.0, 1.0)
            p.t_ms = max(int(p.t_ms), last_t)
            last_t = p.t_ms

    def _clamp_rect(self, img: PlacedImage) -> PlacedImage | None:
        x0 = _clamp(img.x, 0.0, self.width)
        y0 = _clamp(img.y, 0.0, self.height)
        x1 = _clamp(img.x + img.width, 0.0, self.width)
        y1 = _clamp(img.y + img.height, 0.0, self.height)
        if not (x0 < x1 and y0 < y1):
            return None
        return PlacedImage(img.id, img.artifact_ref, x0, y0, x1 - x0, y1 - y0)

    # -- serialization --

    def content_dict(self) -> dict:
        """Visible content only: what rendering and undo-all compare."""
        return {
            "width": self.width,
            "height": self.height,
            "elements": [el.to_dict() for el in self.elements],
        }

    def content_digest(self) -> str:
        return digest(self.content_dict())

    def to_dict(self) -> dict:
        return {
            "canvas_id": self.canvas_id,
            "width": self.width,
            "height": self.height,
            "insight_count": self.insight_count,
            "next_id": self.next_id,
            "elements": [el.to_dict() for el in self.elements],
            "undo_stack": [e.to_dict() for e in self._undo],
            "redo_stack": [e.to_dict() for e in self._redo],
        }

    def canonical_bytes(self) -> bytes:
        return canonical_bytes(self.to_dict())

    @classmethod
    def from_dict(cls, raw: dict) -> "CanvasDocument":
        doc = cls(raw["canvas_id"], raw["width"], raw["height"])
        doc.insight_count = int(raw["insight_count"])
        doc.next_id = int(raw["next_id"])
        for el in raw["elements"]:
            if el["kind"] == "stroke":
                doc.elements.append(Stroke.from_dict(el))
            elif el["kind"] == "image":
                doc.elements.append(PlacedImage.from_dict(el))
            else:
                raise InvalidAction(f"unknown element kind {el['kind']!r}")
        doc._undo = [_HistoryEntry.from_dict(e) for e in raw["undo_stack"]]
        doc._redo = [_HistoryEntry.from_dict(e) for e in raw["redo_stack"]]
        return doc
