"""Deterministic document rendering.

White background, elements composited in document order (so placed images sit
beneath any strokes drawn after them), deleted strokes skipped. Rendering is
a pure function of (document content, scale): repeated calls byte-identical.

Region crops render through a pixel viewport using the same kernel
arithmetic, which makes crop output provably equal to slicing the full-frame
raster; the test suite still checks that equivalence against an independent
slice-of-full-render oracle.
"""

from array import array
from math import floor

from ..errors import EmptyRegion, UnknownArtifact
from ..png import encode_png
from . import backend
from .model import CanvasDocument, PlacedImage, RasterImage, RegionSelection, Stroke

MIN_SCALE = 0.25
MAX_SCALE = 4.0


def _iround(v: float) -> int:
    return int(floor(v + 0.5))


def _check_scale(scale: float) -> None:
    if not (MIN_SCALE <= scale <= MAX_SCALE):
        raise ValueError(f"scale {scale} outside [{MIN_SCALE}, {MAX_SCALE}]")


def pixel_size(doc: CanvasDocument, scale: float) -> tuple[int, int]:
    return (max(1, _iround(doc.width * scale)), max(1, _iround(doc.height * scale)))


def render(doc: CanvasDocument, scale: float, store=None,
           viewport_px: tuple[int, int, int, int] | None = None,
           kernel=None) -> RasterImage:
    """Render the document (or a pixel viewport of it) to a PNG raster.

    ``store`` resolves PlacedImage.artifact_ref via decoded_pixels(ref) ->
    (rgba, w, h); only needed when the document contains placed images.
    ``kernel`` overrides the raster backend (used by tests and the benchmark).
    """
    _check_scale(scale)
    k = kernel if kernel is not None else backend.kernel
    w_px, h_px = pixel_size(doc, scale)
    if viewport_px is None:
        vx0, vy0, vw, vh = 0, 0, w_px, h_px
    else:
        vx0, vy0, vw, vh = viewport_px

    buf = bytearray(b"\xff" * (vw * vh * 4))
    for el in doc.elements:
        if isinstance(el, Stroke):
            if el.deleted:
                continue
            xs = array("d", [p.x * scale for p in el.points])
            ys = array("d", [p.y * scale for p in el.points])
            mask = bytearray(vw * vh)
            r, g, b, a = el.color
            k.paint_polyline(buf, vw, vh, vx0, vy0, xs, ys,
                             el.width * scale / 2.0, r, g, b, a, mask)
        elif isinstance(el, PlacedImage):
            if store is None:
                raise UnknownArtifact("document has placed images but no artifact store")
            pixels, sw, sh = store.decoded_pixels(el.artifact_ref)
            dx0 = _iround(el.x * scale)
            dy0 = _iround(el.y * scale)
            dw = max(1, _iround(el.width * scale))
            dh = max(1, _iround(el.height * scale))
            k.blit_scaled(buf, vw, vh, vx0, vy0, dx0, dy0, dw, dh, pixels, sw, sh)
    return RasterImage(vw, vh, encode_png(vw, vh, bytes(buf)))


def rasterize(doc: CanvasDocument, scale: float, store=None, kernel=None) -> RasterImage:
    return render(doc, scale, store=store, kernel=kernel)


def region_pixel_rect(doc: CanvasDocument, region: RegionSelection,
                      scale: float) -> tuple[int, int, int, int]:
    """Pixel rectangle of a region at the given scale, clipped to the canvas.

    Raises EmptyRegion when no pixels survive clipping.
    """
    r = region.normalized()
    w_px, h_px = pixel_size(doc, scale)
    rx0 = min(max(_iround(r.x0 * scale), 0), w_px)
    ry0 = min(max(_iround(r.y0 * scale), 0), h_px)
    rx1 = min(max(_iround(r.x1 * scale), 0), w_px)
    ry1 = min(max(_iround(r.y1 * scale), 0), h_px)
    if rx0 >= rx1 or ry0 >= ry1:
        raise EmptyRegion("selection does not intersect the canvas")
    return rx0, ry0, rx1 - rx0, ry1 - ry0


def crop_region(doc: CanvasDocument, region: RegionSelection, scale: float,
                store=None, kernel=None) -> RasterImage:
    viewport = region_pixel_rect(doc, region, scale)
    return render(doc, scale, store=store, viewport_px=viewport, kernel=kernel)
