"""Canvas gallery: deep document snapshots with thumbnails.

Entries are held in memory (they are part of replayable session state) and,
when a directory is configured, mirrored to disk as one JSON file per entry
plus an index file.
"""

import base64
import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import UnknownEntry
from ..serialize import canonical_json, digest
from .model import CanvasDocument, RasterImage
from .raster import rasterize

THUMBNAIL_SCALE = 0.25


@dataclass
class GalleryEntry:
    entry_id: str
    saved_at_ms: int
    document: dict  # canonical CanvasDocument.to_dict() snapshot
    thumbnail: RasterImage

    def summary(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "saved_at_ms": self.saved_at_ms,
            "document_digest": digest(self.document),
        }


class Gallery:
    def __init__(self, root: str | Path | None = None):
        self._entries: dict[str, GalleryEntry] = {}
        self._order: list[str] = []
        self.next_entry = 1
        self._root = Path(root) if root is not None else None
        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)

    def save(self, doc: CanvasDocument, saved_at_ms: int, store=None) -> GalleryEntry:
        entry_id = f"entry-{self.next_entry:04d}"
        self.next_entry += 1
        entry = GalleryEntry(
            entry_id=entry_id,
            saved_at_ms=saved_at_ms,
            document=doc.to_dict(),
            thumbnail=rasterize(doc, THUMBNAIL_SCALE, store=store),
        )
        self._entries[entry_id] = entry
        self._order.append(entry_id)
        if self._root is not None:
            self._write_entry(entry)
        return entry

    def entries(self) -> list[dict]:
        return [self._entries[eid].summary() for eid in self._order]

    def get(self, entry_id: str) -> GalleryEntry:
        if entry_id not in self._entries:
            raise UnknownEntry(f"no gallery entry {entry_id!r}")
        return self._entries[entry_id]

    def load(self, entry_id: str) -> CanvasDocument:
        """Rebuild a document from its snapshot (deep copy via serialization)."""
        return CanvasDocument.from_dict(self.get(entry_id).document)

    def index_dict(self) -> dict:
        return {"next_entry": self.next_entry, "entries": self.entries()}

    def _write_entry(self, entry: GalleryEntry) -> None:
        payload = {
            "entry_id": entry.entry_id,
            "saved_at_ms": entry.saved_at_ms,
            "document": entry.document,
            "thumbnail": {
                "width_px": entry.thumbnail.width_px,
                "height_px": entry.thumbnail.height_px,
                "png_b64": base64.b64encode(entry.thumbnail.data).decode("ascii"),
            },
        }
        (self._root / f"{entry.entry_id}.json").write_text(canonical_json(payload))
        (self._root / "index.json").write_text(canonical_json(self.index_dict()))

    @classmethod
    def open(cls, root: str | Path) -> "Gallery":
        """Load a persisted gallery directory."""
        gallery = cls(root)
        index_path = gallery._root / "index.json"
        if not index_path.exists():
            return gallery
        index = json.loads(index_path.read_text())
        gallery.next_entry = index["next_entry"]
        for summary in index["entries"]:
            raw = json.loads((gallery._root / f"{summary['entry_id']}.json").read_text())
            thumb = raw["thumbnail"]
            entry = GalleryEntry(
                entry_id=raw["entry_id"],
                saved_at_ms=raw["saved_at_ms"],
                document=raw["document"],
                thumbnail=RasterImage(
                    thumb["width_px"], thumb["height_px"],
                    base64.b64decode(thumb["png_b64"]),
                ),
            )
            gallery._entries[entry.entry_id] = entry
            gallery._order.append(entry.entry_id)
        return gallery
