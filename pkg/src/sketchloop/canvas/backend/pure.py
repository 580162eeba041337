"""Pure-Python raster kernel.

Reference implementation of the pinned rendering semantics. The compiled
kernel (_rasterkernel.pyx) mirrors this file expression for expression; the
two must stay byte-identical on any input, which the test suite asserts on
random documents.

Pinned semantics:
  * pixel centers at (X + 0.5, Y + 0.5) in pixel space
  * a pixel is inked when its center lies within half_width of the segment
    (squared-distance test, <=), which yields round caps and joins for free
  * no anti-aliasing
  * source-over compositing onto an opaque buffer with integer arithmetic:
    out = (src * a + dst * (255 - a) + 127) // 255, alpha stays 255
  * image blits scale by nearest neighbor: sx = ((X - dx0) * sw) // dw
  * per-stroke coverage mask so overlapping segments of one stroke composite
    exactly once (matters for translucent ink)
"""

from math import ceil, floor


def paint_polyline(buf, vw, vh, vx0, vy0, xs, ys, half_width, r, g, b, a, mask):
    """Ink one polyline into an RGBA viewport buffer.

    xs/ys are pixel-space coordinates in the full-canvas frame; vx0/vy0 is
    the viewport origin in that same frame. ``mask`` must be a zeroed
    bytearray of vw*vh covering this stroke only.
    """
    n = len(xs)
    if n == 0:
        return
    hw2 = half_width * half_width
    inv = 255 - a
    seg_count = n - 1 if n > 1 else 1
    for s in range(seg_count):
        ax = xs[s]
        ay = ys[s]
        if n > 1:
            bx = xs[s + 1]
            by = ys[s + 1]
        else:
            bx = ax
            by = ay
        dx = bx - ax
        dy = by - ay
        len2 = dx * dx + dy * dy

        x_lo = int(floor(min(ax, bx) - half_width)) - 1
        x_hi = int(ceil(max(ax, bx) + half_width)) + 1
        y_lo = int(floor(min(ay, by) - half_width)) - 1
        y_hi = int(ceil(max(ay, by) + half_width)) + 1
        if x_lo < vx0:
            x_lo = vx0
        if y_lo < vy0:
            y_lo = vy0
        if x_hi > vx0 + vw - 1:
            x_hi = vx0 + vw - 1
        if y_hi > vy0 + vh - 1:
            y_hi = vy0 + vh - 1

        for yy in range(y_lo, y_hi + 1):
            py = yy + 0.5
            row = (yy - vy0) * vw
            for xx in range(x_lo, x_hi + 1):
                px = xx + 0.5
                if len2 > 0.0:
                    t = ((px - ax) * dx + (py - ay) * dy) / len2
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                else:
                    t = 0.0
                cx = ax + t * dx
                cy = ay + t * dy
                ddx = px - cx
                ddy = py - cy
                if ddx * ddx + ddy * ddy <= hw2:
                    idx = row + (xx - vx0)
                    if mask[idx] == 0:
                        mask[idx] = 1
                        p = idx * 4
                        buf[p] = (r * a + buf[p] * inv + 127) // 255
                        buf[p + 1] = (g * a + buf[p + 1] * inv + 127) // 255
                        buf[p + 2] = (b * a + buf[p + 2] * inv + 127) // 255
                        buf[p + 3] = 255


def blit_scaled(buf, vw, vh, vx0, vy0, dx0, dy0, dw, dh, src, sw, sh):
    """Nearest-neighbor blit of an RGBA source into a destination rect."""
    x_lo = dx0 if dx0 > vx0 else vx0
    y_lo = dy0 if dy0 > vy0 else vy0
    x_hi = min(dx0 + dw, vx0 + vw)
    y_hi = min(dy0 + dh, vy0 + vh)
    for yy in range(y_lo, y_hi):
        sy = ((yy - dy0) * sh) // dh
        row = (yy - vy0) * vw
        src_row = sy * sw
        for xx in range(x_lo, x_hi):
            sx = ((xx - dx0) * sw) // dw
            s = (src_row + sx) * 4
            a = src[s + 3]
            if a == 0:
                continue
            inv = 255 - a
            p = (row + (xx - vx0)) * 4
            buf[p] = (src[s] * a + buf[p] * inv + 127) // 255
            buf[p + 1] = (src[s + 1] * a + buf[p + 1] * inv + 127) // 255
            buf[p + 2] = (src[s + 2] * a + buf[p + 2] * inv + 127) // 255
            buf[p + 3] = 255
