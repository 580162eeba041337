import random

import pytest

from conftest import random_document
from sketchloop.canvas import AddStroke, EraseStrokes, Gallery, Point, Stroke
from sketchloop.errors import UnknownEntry


def test_save_then_load_is_content_equal():
    doc = random_document(random.Random(1))
    gallery = Gallery()
    entry = gallery.save(doc, saved_at_ms=1000)
    loaded = gallery.load(entry.entry_id)
    assert loaded.canonical_bytes() == doc.canonical_bytes()


def test_snapshot_is_deep():
    doc = random_document(random.Random(2))
    gallery = Gallery()
    entry = gallery.save(doc, saved_at_ms=500)
    doc.apply(EraseStrokes([doc.visible_strokes()[0].id]))
    loaded = gallery.load(entry.entry_id)
    assert not any(s.deleted for s in loaded.visible_strokes())
    assert loaded.canonical_bytes() != doc.canonical_bytes()


def test_unknown_entry():
    gallery = Gallery()
    with pytest.raises(UnknownEntry):
        gallery.load("entry-0042")


def test_entry_ids_are_sequential():
    doc = random_document(random.Random(3))
    gallery = Gallery()
    ids = [gallery.save(doc, saved_at_ms=i).entry_id for i in range(3)]
    assert ids == ["entry-0001", "entry-0002", "entry-0003"]
    assert [e["entry_id"] for e in gallery.entries()] == ids


def test_thumbnail_dimensions():
    doc = random_document(random.Random(4), width=200, height=120)
    gallery = Gallery()
    entry = gallery.save(doc, saved_at_ms=0)
    assert (entry.thumbnail.width_px, entry.thumbnail.height_px) == (50, 30)


def test_disk_persistence_roundtrip(tmp_path):
    doc = random_document(random.Random(5))
    gallery = Gallery(tmp_path / "gallery")
    entry = gallery.save(doc, saved_at_ms=77)
    doc2 = random_document(random.Random(6))
    gallery.save(doc2, saved_at_ms=88)

    reopened = Gallery.open(tmp_path / "gallery")
    assert reopened.next_entry == 3
    assert reopened.load(entry.entry_id).canonical_bytes() == doc.canonical_bytes()
    assert reopened.get(entry.entry_id).thumbnail.data == entry.thumbnail.data


def test_loaded_document_preserves_insight_count_and_ids():
    doc = random_document(random.Random(7))
    doc.insight_count = 2
    gallery = Gallery()
    entry = gallery.save(doc, saved_at_ms=0)
    loaded = gallery.load(entry.entry_id)
    assert loaded.insight_count == 2
    assert loaded.next_id == doc.next_id
    # ids keep advancing, so new strokes never collide with loaded ones
    loaded.apply(AddStroke(Stroke(loaded.allocate_id("s"), [Point(1, 1)])))
    assert len({e.id for e in loaded.elements}) == len(loaded.elements)
