from .gallery import Gallery, GalleryEntry
from .model import (
    AddStroke,
    CanvasDocument,
    EraseStrokes,
    MoveSelection,
    PlacedImage,
    PlaceImage,
    Point,
    RasterImage,
    RegionSelection,
    ResetCanvas,
    Stroke,
)
from .raster import crop_region, rasterize, region_pixel_rect

__all__ = [
    "AddStroke",
    "CanvasDocument",
    "EraseStrokes",
    "Gallery",
    "GalleryEntry",
    "MoveSelection",
    "PlacedImage",
    "PlaceImage",
    "Point",
    "RasterImage",
    "RegionSelection",
    "ResetCanvas",
    "Stroke",
    "crop_region",
    "rasterize",
    "region_pixel_rect",
]
