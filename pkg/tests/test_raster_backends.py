"""Rendering semantics plus compiled/pure backend equivalence."""

import random

import pytest

from conftest import random_document
from sketchloop.canvas import (
    AddStroke,
    CanvasDocument,
    PlaceImage,
    PlacedImage,
    Point,
    RegionSelection,
    Stroke,
    crop_region,
    rasterize,
    region_pixel_rect,
)
from sketchloop.canvas.backend import BACKEND, available_backends
from sketchloop.chat import ImageArtifactStore, Provenance
from sketchloop.errors import EmptyRegion
from sketchloop.png import decode_png, encode_png
from sketchloop.providers.mock import solid_png


def test_empty_document_renders_white():
    doc = CanvasDocument("c", 1024, 768)
    raster = rasterize(doc, 1.0)
    assert (raster.width_px, raster.height_px) == (1024, 768)
    w, h, pixels = decode_png(raster.data)
    assert pixels == b"\xff" * (w * h * 4)


def test_horizontal_stroke_ink_matches_distance_oracle():
    # brute-force oracle: pixel center within width/2 of the segment
    doc = CanvasDocument("c", 1024, 768)
    doc.apply(AddStroke(Stroke("s1", [Point(0, 100), Point(200, 100)], width=4.0)))
    raster = rasterize(doc, 1.0)
    _, _, pixels = decode_png(raster.data)
    ink = sum(1 for i in range(0, len(pixels), 4) if pixels[i:i + 3] != b"\xff\xff\xff")

    ax, ay, bx, by, hw = 0.0, 100.0, 200.0, 100.0, 2.0
    expected = 0
    for y in range(96, 105):
        for x in range(0, 204):
            px, py = x + 0.5, y + 0.5
            t = max(0.0, min(1.0, ((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / ((bx - ax) ** 2)))
            cx, cy = ax + t * (bx - ax), ay + t * (by - ay)
            if (px - cx) ** 2 + (py - cy) ** 2 <= hw * hw:
                expected += 1
    assert abs(ink - expected) <= 0.02 * expected


def test_rendering_is_deterministic():
    rng = random.Random(3)
    doc = random_document(rng)
    assert rasterize(doc, 1.0).data == rasterize(doc, 1.0).data


def test_deleted_strokes_are_skipped():
    doc = CanvasDocument("c", 64, 64)
    doc.apply(AddStroke(Stroke("s1", [Point(10, 10), Point(50, 50)], width=5.0)))
    inked = rasterize(doc, 1.0).data
    doc.find("s1").deleted = True
    _, _, pixels = decode_png(rasterize(doc, 1.0).data)
    assert pixels == b"\xff" * (64 * 64 * 4)
    assert inked != rasterize(doc, 1.0).data


def test_scale_bounds_enforced():
    doc = CanvasDocument("c", 64, 64)
    with pytest.raises(ValueError):
        rasterize(doc, 0.1)
    with pytest.raises(ValueError):
        rasterize(doc, 5.0)


def test_backends_byte_identical_on_random_documents():
    backends = available_backends()
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    rng = random.Random(11)
    for _ in range(40):
        doc = random_document(rng)
        scale = rng.choice([0.25, 0.5, 1.0, 1.7, 2.0, 4.0])
        rendered = {name: rasterize(doc, scale, kernel=k).data
                    for name, k in backends.items()}
        assert rendered["pure"] == rendered["compiled"]


def test_backends_byte_identical_with_placed_images():
    backends = available_backends()
    if len(backends) < 2:
        pytest.skip("compiled backend not built")
    store = ImageArtifactStore()
    aid = store.put(solid_png(16, 12, (200, 40, 40, 180)), Provenance.GENERATED, 0)
    doc = CanvasDocument("c", 100, 80)
    doc.apply(AddStroke(Stroke("s1", [Point(5, 5), Point(90, 70)], width=3.0)))
    doc.apply(PlaceImage(PlacedImage("img1", aid, 20.0, 15.0, 50.0, 40.0)))
    doc.apply(AddStroke(Stroke("s2", [Point(0, 70), Point(95, 5)], width=2.0,
                               color=(0, 0, 255, 128))))
    rendered = {name: rasterize(doc, 1.0, store=store, kernel=k).data
                for name, k in available_backends().items()}
    assert rendered["pure"] == rendered["compiled"]


def test_placed_image_composites_into_region():
    store = ImageArtifactStore()
    aid = store.put(solid_png(8, 8, (10, 200, 10, 255)), Provenance.GENERATED, 0)
    doc = CanvasDocument("c", 64, 64)
    doc.apply(PlaceImage(PlacedImage("img1", aid, 16.0, 16.0, 32.0, 32.0)))
    w, h, pixels = decode_png(rasterize(doc, 1.0, store=store).data)

    def px(x, y):
        i = (y * w + x) * 4
        return tuple(pixels[i:i + 3])

    assert px(32, 32) == (10, 200, 10)   # inside the placement
    assert px(4, 4) == (255, 255, 255)   # outside stays white
    assert px(47, 47) == (10, 200, 10)   # bottom-right corner of the rect
    assert px(48, 48) == (255, 255, 255)


def test_crop_equals_slice_of_full_render():
    rng = random.Random(23)
    for _ in range(30):
        doc = random_document(rng)
        scale = rng.choice([0.5, 1.0, 2.0])
        region = RegionSelection(
            rng.uniform(-20, doc.width), rng.uniform(-20, doc.height),
            rng.uniform(0, doc.width + 20), rng.uniform(0, doc.height + 20),
        )
        try:
            rx, ry, rw, rh = region_pixel_rect(doc, region, scale)
        except EmptyRegion:
            continue
        cropped = crop_region(doc, region, scale)

        full = rasterize(doc, scale)
        fw, fh, pixels = decode_png(full.data)
        rows = bytearray()
        for y in range(ry, ry + rh):
            start = (y * fw + rx) * 4
            rows += pixels[start:start + rw * 4]
        assert cropped.data == encode_png(rw, rh, bytes(rows))


def test_crop_full_canvas_equals_rasterize():
    doc = CanvasDocument("c", 80, 60)
    doc.apply(AddStroke(Stroke("s1", [Point(10, 10), Point(70, 50)], width=4.0)))
    region = RegionSelection(0, 0, 80, 60)
    assert crop_region(doc, region, 1.0).data == rasterize(doc, 1.0).data


def test_crop_outside_canvas_raises():
    doc = CanvasDocument("c", 80, 60)
    with pytest.raises(EmptyRegion):
        crop_region(doc, RegionSelection(100, 100, 200, 200), 1.0)


def test_backend_reports_which_kernel_is_active():
    assert BACKEND in ("pure", "compiled")
