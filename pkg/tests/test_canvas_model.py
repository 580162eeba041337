import random

import pytest

from conftest import random_document
from sketchloop.canvas import (
    AddStroke,
    CanvasDocument,
    EraseStrokes,
    MoveSelection,
    PlaceImage,
    PlacedImage,
    Point,
    ResetCanvas,
    Stroke,
)
from sketchloop.errors import (
    DuplicateId,
    EmptyRegion,
    EmptyStroke,
    NothingToRedo,
    NothingToUndo,
    UnknownTarget,
)
from sketchloop.serialize import canonical_bytes


def stroke(sid="s1", pts=((0, 0), (10, 10))):
    return Stroke(sid, [Point(x, y) for x, y in pts])


def test_add_stroke():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(AddStroke(stroke()))
    assert [e.id for e in doc.elements] == ["s1"]
    assert doc.undo_depth == 1
    assert doc.revision == 1


def test_erase_marks_deleted():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(AddStroke(stroke()))
    doc.apply(EraseStrokes(["s1"]))
    assert doc.find("s1").deleted
    assert doc.undo_depth == 2


def test_reset_clears_everything():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(AddStroke(stroke("s1")))
    doc.apply(AddStroke(stroke("s2", ((5, 5), (20, 20)))))
    doc.insight_count = 3
    doc.apply(ResetCanvas())
    assert doc.elements == []
    assert doc.insight_count == 0
    assert doc.undo_depth == 0 and doc.redo_depth == 0
    with pytest.raises(NothingToUndo):
        doc.undo()


def test_empty_stroke_rejected():
    doc = CanvasDocument("c", 100, 100)
    with pytest.raises(EmptyStroke):
        doc.apply(AddStroke(Stroke("s1", [])))


def test_duplicate_id_rejected():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(AddStroke(stroke()))
    with pytest.raises(DuplicateId):
        doc.apply(AddStroke(stroke()))


def test_erase_unknown_or_deleted_target():
    doc = CanvasDocument("c", 100, 100)
    with pytest.raises(UnknownTarget):
        doc.apply(EraseStrokes(["nope"]))
    doc.apply(AddStroke(stroke()))
    doc.apply(EraseStrokes(["s1"]))
    with pytest.raises(UnknownTarget):
        doc.apply(EraseStrokes(["s1"]))


def test_undo_add_restores_empty_content():
    doc = CanvasDocument("c", 100, 100)
    empty = canonical_bytes(doc.content_dict())
    doc.apply(AddStroke(stroke()))
    doc.undo()
    assert canonical_bytes(doc.content_dict()) == empty


def test_undo_erase_restores_visibility():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(AddStroke(stroke()))
    doc.apply(EraseStrokes(["s1"]))
    doc.undo()
    assert not doc.find("s1").deleted


def test_undo_empty_stack():
    doc = CanvasDocument("c", 100, 100)
    with pytest.raises(NothingToUndo):
        doc.undo()
    with pytest.raises(NothingToRedo):
        doc.redo()


def test_redo_after_new_action_is_cleared():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(AddStroke(stroke("s1")))
    doc.undo()
    doc.apply(AddStroke(stroke("s2")))
    with pytest.raises(NothingToRedo):
        doc.redo()


def test_undo_redo_restores_serialization():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(AddStroke(stroke("s1")))
    doc.apply(EraseStrokes(["s1"]))
    before = doc.canonical_bytes()
    doc.undo()
    doc.redo()
    assert doc.canonical_bytes() == before


def test_move_selection_and_exact_undo():
    doc = CanvasDocument("c", 100, 100)
    pts = [(0.1, 0.2), (33.333, 66.667)]
    doc.apply(AddStroke(stroke("s1", pts)))
    before = canonical_bytes(doc.content_dict())
    doc.apply(MoveSelection(["s1"], 7.7, -3.3))
    moved = doc.find("s1").points[0]
    assert (moved.x, moved.y) == (0.1 + 7.7, 0.2 - 3.3)
    doc.undo()
    # bit-exact restore, not a float round-trip
    assert canonical_bytes(doc.content_dict()) == before


def test_move_unknown_target():
    doc = CanvasDocument("c", 100, 100)
    with pytest.raises(UnknownTarget):
        doc.apply(MoveSelection(["ghost"], 1, 1))


def test_place_image_clamped_to_bounds():
    doc = CanvasDocument("c", 100, 100)
    doc.apply(PlaceImage(PlacedImage("img1", "art", -10.0, 50.0, 40.0, 80.0)))
    img = doc.find("img1")
    assert (img.x, img.y) == (0.0, 50.0)
    assert (img.width, img.height) == (30.0, 50.0)
    with pytest.raises(EmptyRegion):
        doc.apply(PlaceImage(PlacedImage("img2", "art", 200.0, 200.0, 10.0, 10.0)))


def test_point_sanitization():
    doc = CanvasDocument("c", 100, 100)
    s = Stroke("s1", [Point(0, 0, 50, 1.7), Point(1, 1, 20, -0.2)])
    doc.apply(AddStroke(s))
    assert s.points[0].pressure == 1.0
    assert s.points[1].pressure == 0.0
    assert s.points[1].t_ms == 50  # clamped to be non-decreasing


def test_serialization_roundtrip():
    rng = random.Random(5)
    doc = random_document(rng)
    doc.apply(EraseStrokes([doc.visible_strokes()[0].id]))
    doc.undo()
    clone = CanvasDocument.from_dict(doc.to_dict())
    assert clone.canonical_bytes() == doc.canonical_bytes()


def test_revision_strictly_monotone():
    doc = CanvasDocument("c", 100, 100)
    seen = [doc.revision]
    doc.apply(AddStroke(stroke("s1")))
    seen.append(doc.revision)
    doc.apply(EraseStrokes(["s1"]))
    seen.append(doc.revision)
    doc.undo()
    seen.append(doc.revision)
    doc.redo()
    seen.append(doc.revision)
    doc.apply(ResetCanvas())
    seen.append(doc.revision)
    assert seen == sorted(set(seen))


def random_action(rng, doc, counter):
    roll = rng.random()
    visible = doc.visible_strokes()
    if roll < 0.45 or not visible:
        counter[0] += 1
        pts = [(rng.uniform(0, 100), rng.uniform(0, 100))
               for _ in range(rng.randint(1, 5))]
        return AddStroke(stroke(f"r{counter[0]}", pts))
    if roll < 0.65:
        return EraseStrokes([rng.choice(visible).id])
    if roll < 0.85:
        return MoveSelection([rng.choice(visible).id],
                             rng.uniform(-5, 5), rng.uniform(-5, 5))
    counter[0] += 1
    return PlaceImage(PlacedImage(f"pi{counter[0]}", "art",
                                  rng.uniform(0, 80), rng.uniform(0, 80),
                                  rng.uniform(1, 20), rng.uniform(1, 20)))


def test_property_undo_all_restores_initial_content():
    rng = random.Random(99)
    for _ in range(60):
        doc = CanvasDocument("c", 100, 100)
        initial = canonical_bytes(doc.content_dict())
        counter = [0]
        n = rng.randint(1, 200)
        for _ in range(n):
            doc.apply(random_action(rng, doc, counter))
        for _ in range(n):
            doc.undo()
        assert canonical_bytes(doc.content_dict()) == initial


def test_property_undo_redo_identity():
    rng = random.Random(123)
    for _ in range(60):
        doc = CanvasDocument("c", 100, 100)
        counter = [0]
        for _ in range(rng.randint(1, 40)):
            doc.apply(random_action(rng, doc, counter))
        before = doc.canonical_bytes()
        doc.undo()
        doc.redo()
        assert doc.canonical_bytes() == before
