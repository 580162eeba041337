import sys

from setuptools import setup
from setuptools.extension import Extension

# -ffp-contract=off: the pure-Python fallback must produce byte-identical
# rasters, so FMA contraction in the compiled kernel is disabled.
compile_args = ["-O3", "-ffp-contract=off"] if sys.platform != "win32" else ["/O2", "/fp:precise"]

ext = Extension(
    "sketchloop.canvas.backend._rasterkernel",
    ["src/sketchloop/canvas/backend/_rasterkernel.pyx"],
    extra_compile_args=compile_args,
)

try:
    from Cython.Build import cythonize

    extensions = cythonize([ext], language_level="3")
except ImportError:
    # No Cython available: install pure-Python only, the raster backend
    # falls back automatically at import time.
    extensions = []

setup(ext_modules=extensions)
