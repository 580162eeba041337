"""Raster kernel selection.

Prefers the compiled extension; falls back to the pure-Python kernel when the
extension is unavailable or SKETCHLOOP_PURE_RASTER=1 is set. Both expose the
same two functions with identical pinned semantics (see pure.py).
"""

import os

from . import pure

if os.environ.get("SKETCHLOOP_PURE_RASTER") == "1":
    kernel = pure
    BACKEND = "pure"
else:
    try:
        from . import _rasterkernel as kernel  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        kernel = pure
        BACKEND = "pure"

paint_polyline = kernel.paint_polyline
blit_scaled = kernel.blit_scaled


def available_backends() -> dict:
    """Name -> kernel module, for equivalence tests and the benchmark."""
    backends = {"pure": pure}
    try:
        from . import _rasterkernel  # type: ignore[attr-defined]

        backends["compiled"] = _rasterkernel
    except ImportError:
        pass
    return backends
