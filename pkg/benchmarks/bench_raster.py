"""Raster backend benchmark: compiled kernel vs pure-Python fallback.

Renders synthetic sketches (random-walk strokes, like real pen input) through
both kernels and reports per-frame times and the speedup. Verifies the
outputs are byte-identical while it is at it.

Usage: python benchmarks/bench_raster.py [--frames 5] [--scale 1.0]
"""

import argparse
import random
import statistics
import time

from sketchloop.canvas import AddStroke, CanvasDocument, Point, Stroke, rasterize
from sketchloop.canvas.backend import available_backends


def build_document(strokes: int, points_per_stroke: int, seed: int = 1,
                   width: float = 1024.0, height: float = 768.0) -> CanvasDocument:
    rng = random.Random(seed)
    doc = CanvasDocument("bench", width, height)
    for i in range(strokes):
        x = rng.uniform(50, width - 50)
        y = rng.uniform(50, height - 50)
        pts = []
        for t in range(points_per_stroke):
            x = min(width, max(0.0, x + rng.uniform(-25, 25)))
            y = min(height, max(0.0, y + rng.uniform(-25, 25)))
            pts.append(Point(x, y, t_ms=t * 8))
        color = (rng.randrange(256), rng.randrange(256), rng.randrange(256),
                 rng.choice([128, 255]))
        doc.apply(AddStroke(Stroke(f"s{i}", pts, width=rng.uniform(2, 8), color=color)))
    return doc


def median_render_time(doc, scale, kernel, frames) -> float:
    times = []
    for _ in range(frames):
        start = time.perf_counter()
        rasterize(doc, scale, kernel=kernel)
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=5,
                        help="renders per measurement for the compiled kernel "
                             "(the pure kernel always gets one)")
    parser.add_argument("--scale", type=float, default=1.0)
    args = parser.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; run pip install -e . first")
        return 1

    # the empty case isolates the shared fixed cost (buffer fill + PNG encode)
    cases = [("empty", 0, 0), ("sparse", 4, 12), ("medium", 16, 30), ("dense", 48, 60)]
    print(f"{'case':<8} {'strokes':>7} {'pure ms':>10} {'compiled ms':>12} {'speedup':>8}")
    for name, strokes, ppstroke in cases:
        doc = build_document(strokes, ppstroke)
        assert (rasterize(doc, args.scale, kernel=backends["pure"]).data
                == rasterize(doc, args.scale, kernel=backends["compiled"]).data), \
            "backends diverged"
        pure = median_render_time(doc, args.scale, backends["pure"], 1)
        fast = median_render_time(doc, args.scale, backends["compiled"], args.frames)
        print(f"{name:<8} {strokes:>7} {pure * 1000:>10.1f} {fast * 1000:>12.2f} "
              f"{pure / fast:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
