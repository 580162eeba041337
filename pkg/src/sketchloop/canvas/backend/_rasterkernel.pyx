# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled raster kernel.

Mirrors pure.py expression for expression; both backends must produce
byte-identical buffers (the build disables FP contraction for this reason).
All integer divisions below operate on non-negative values, so C division
under cdivision=True matches Python floor division.
"""

from libc.math cimport ceil, floor


def paint_polyline(unsigned char[::1] buf, Py_ssize_t vw, Py_ssize_t vh,
                   Py_ssize_t vx0, Py_ssize_t vy0,
                   double[::1] xs, double[::1] ys, double half_width,
                   int r, int g, int b, int a, unsigned char[::1] mask):
    cdef Py_ssize_t n = xs.shape[0]
    if n == 0:
        return
    cdef double hw2 = half_width * half_width
    cdef int inv = 255 - a
    cdef Py_ssize_t seg_count = n - 1 if n > 1 else 1
    cdef Py_ssize_t s, xx, yy, x_lo, x_hi, y_lo, y_hi, idx, row, p
    cdef double ax, ay, bx, by, dx, dy, len2, px, py, t, cx, cy, ddx, ddy
    cdef double lo, hi

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

        lo = ax if ax < bx else bx
        hi = ax if ax > bx else bx
        x_lo = <Py_ssize_t>floor(lo - half_width) - 1
        x_hi = <Py_ssize_t>ceil(hi + half_width) + 1
        lo = ay if ay < by else by
        hi = ay if ay > by else by
        y_lo = <Py_ssize_t>floor(lo - half_width) - 1
        y_hi = <Py_ssize_t>ceil(hi + half_width) + 1
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
                        buf[p] = <unsigned char>((r * a + buf[p] * inv + 127) // 255)
                        buf[p + 1] = <unsigned char>((g * a + buf[p + 1] * inv + 127) // 255)
                        buf[p + 2] = <unsigned char>((b * a + buf[p + 2] * inv + 127) // 255)
                        buf[p + 3] = 255


def blit_scaled(unsigned char[::1] buf, Py_ssize_t vw, Py_ssize_t vh,
                Py_ssize_t vx0, Py_ssize_t vy0,
                Py_ssize_t dx0, Py_ssize_t dy0, Py_ssize_t dw, Py_ssize_t dh,
                const unsigned char[::1] src, Py_ssize_t sw, Py_ssize_t sh):
    cdef Py_ssize_t x_lo = dx0 if dx0 > vx0 else vx0
    cdef Py_ssize_t y_lo = dy0 if dy0 > vy0 else vy0
    cdef Py_ssize_t x_hi = dx0 + dw if dx0 + dw < vx0 + vw else vx0 + vw
    cdef Py_ssize_t y_hi = dy0 + dh if dy0 + dh < vy0 + vh else vy0 + vh
    cdef Py_ssize_t xx, yy, sx, sy, row, src_row, s, p
    cdef int a, inv

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
            buf[p] = <unsigned char>((src[s] * a + buf[p] * inv + 127) // 255)
            buf[p + 1] = <unsigned char>((src[s + 1] * a + buf[p + 1] * inv + 127) // 255)
            buf[p + 2] = <unsigned char>((src[s + 2] * a + buf[p + 2] * inv + 127) // 255)
            buf[p + 3] = 255
