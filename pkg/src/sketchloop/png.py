"""Minimal PNG codec for 8-bit RGBA rasters.

The encoder is intentionally self-contained (stdlib zlib only) with a pinned
compression level, because raster payloads participate in byte-exact replay
checks: the same pixels must always encode to the same bytes. Library PNG
writers do not make that guarantee across versions or option defaults.

The decoder handles what the service itself may store or receive from mocks:
non-interlaced 8-bit grayscale/RGB/RGBA, all five scanline filters. Output is
always flattened to RGBA.
"""

import struct
import zlib

from .errors import MalformedResponse

_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_COMPRESSION_LEVEL = 6  # pinned; do not change without regenerating fixtures


def _chunk(tag: bytes, data: bytes) -> bytes:
    return (
        struct.pack(">I", len(data))
        + tag
        + data
        + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)
    )


def encode_png(width: int, height: int, rgba: bytes) -> bytes:
    """Encode raw RGBA pixels (row-major, 4 bytes per pixel) as a PNG."""
    if width <= 0 or height <= 0:
        raise ValueError("raster dimensions must be positive")
    if len(rgba) != width * height * 4:
        raise ValueError(
            f"pixel buffer is {len(rgba)} bytes, expected {width * height * 4}"
        )
    stride = width * 4
    raw = bytearray()
    for y in range(height):
        raw.append(0)  # filter type None
        raw += rgba[y * stride : (y + 1) * stride]
    ihdr = struct.pack(">IIBBBBB", width, height, 8, 6, 0, 0, 0)
    idat = zlib.compress(bytes(raw), _COMPRESSION_LEVEL)
    return _SIGNATURE + _chunk(b"IHDR", ihdr) + _chunk(b"IDAT", idat) + _chunk(b"IEND", b"")


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa = abs(p - a)
    pb = abs(p - b)
    pc = abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    if pb <= pc:
        return b
    return c


def decode_png(data: bytes) -> tuple[int, int, bytes]:
    """Decode a PNG into (width, height, rgba bytes).

    Raises MalformedResponse on anything that is not a well-formed PNG of a
    supported flavor; the chat mode contract relies on this to reject
    undecodable provider output.
    """
    try:
        return _decode(data)
    except MalformedResponse:
        raise
    except Exception as exc:
        raise MalformedResponse(f"undecodable PNG: {exc}") from exc


def _decode(data: bytes) -> tuple[int, int, bytes]:
    if data[:8] != _SIGNATURE:
        raise MalformedResponse("missing PNG signature")
    pos = 8
    width = height = 0
    channels = 0
    idat = bytearray()
    seen_ihdr = False
    while pos < len(data):
        if pos + 8 > len(data):
            raise MalformedResponse("truncated chunk header")
        (length,) = struct.unpack(">I", data[pos : pos + 4])
        tag = data[pos + 4 : pos + 8]
        body = data[pos + 8 : pos + 8 + length]
        if len(body) != length:
            raise MalformedResponse("truncated chunk body")
        pos += 12 + length  # header + body + crc
        if tag == b"IHDR":
            width, height, depth, color, _comp, _filt, interlace = struct.unpack(
                ">IIBBBBB", body
            )
            if depth != 8:
                raise MalformedResponse(f"unsupported bit depth {depth}")
            if interlace != 0:
                raise MalformedResponse("interlaced PNG not supported")
            channels = {0: 1, 2: 3, 6: 4}.get(color)
            if channels is None:
                raise MalformedResponse(f"unsupported color type {color}")
            seen_ihdr = True
        elif tag == b"IDAT":
            idat += body
        elif tag == b"IEND":
            break
    if not seen_ihdr or width == 0 or height == 0:
        raise MalformedResponse("missing or empty IHDR")
    raw = zlib.decompress(bytes(idat))
    stride = width * channels
    if len(raw) != (stride + 1) * height:
        raise MalformedResponse("decompressed size mismatch")

    out = bytearray(width * height * 4)
    prev = bytearray(stride)
    for y in range(height):
        row_start = y * (stride + 1)
        ftype = raw[row_start]
        row = bytearray(raw[row_start + 1 : row_start + 1 + stride])
        if ftype == 1:  # Sub
            for i in range(channels, stride):
                row[i] = (row[i] + row[i - channels]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(stride):
                row[i] = (row[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(stride):
                left = row[i - channels] if i >= channels else 0
                row[i] = (row[i] + ((left + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(stride):
                left = row[i - channels] if i >= channels else 0
                up_left = prev[i - channels] if i >= channels else 0
                row[i] = (row[i] + _paeth(left, prev[i], up_left)) & 0xFF
        elif ftype != 0:
            raise MalformedResponse(f"unknown filter type {ftype}")
        prev = row

        base = y * width * 4
        if channels == 4:
            out[base : base + stride] = row
        elif channels == 3:
            for x in range(width):
                out[base + x * 4 : base + x * 4 + 3] = row[x * 3 : x * 3 + 3]
                out[base + x * 4 + 3] = 255
        else:  # grayscale
            for x in range(width):
                g = row[x]
                out[base + x * 4 : base + x * 4 + 4] = bytes((g, g, g, 255))
    return width, height, bytes(out)
