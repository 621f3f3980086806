"""Minimal binary PGM (P5, 8-bit, maxval 255) reader and writer."""

from pathlib import Path

import numpy as np

from .exceptions import PgmParseError
from .validation import check_image

_WHITESPACE = b" \t\n\r\x0b\x0c"


def _next_token(data, pos):
    # skip whitespace and '#' comment lines, return (token, start, end)
    n = len(data)
    while pos < n:
        ch = data[pos : pos + 1]
        if ch in _WHITESPACE:
            pos += 1
        elif ch == b"#":
            while pos < n and data[pos : pos + 1] not in b"\r\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise PgmParseError("unexpected end of header", pos)
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE:
        pos += 1
    return data[start:pos], start, pos


def read_pgm(path):
    """Read a binary PGM file into a float64 array of shape (height, width)."""
    data = Path(path).read_bytes()
    magic, start, pos = _next_token(data, 0)
    if magic != b"P5":
        raise PgmParseError(f"bad magic {magic!r}, expected b'P5'", start)
    fields = {}
    for name in ("width", "height", "maxval"):
        tok, start, pos = _next_token(data, pos)
        if not tok.isdigit():
            raise PgmParseError(f"{name} is not a number: {tok!r}", start)
        fields[name] = int(tok)
        if name in ("width", "height") and fields[name] < 1:
            raise PgmParseError(f"{name} must be >= 1, got {fields[name]}", start)
    if fields["maxval"] != 255:
        raise PgmParseError(f"maxval must be 255, got {fields['maxval']}", start)
    if pos >= len(data):
        raise PgmParseError("missing whitespace after maxval", pos)
    pos += 1  # exactly one whitespace byte separates header and payload
    need = fields["width"] * fields["height"]
    if len(data) - pos < need:
        raise PgmParseError(
            f"truncated payload: need {need} bytes, have {len(data) - pos}",
            len(data),
        )
    pixels = np.frombuffer(data[pos : pos + need], dtype=np.uint8)
    return pixels.reshape(fields["height"], fields["width"]).astype(np.float64)


def quantize(image):
    """Clamp to [0, 255] and round half up to integers (uint8)."""
    arr = check_image(image)
    return np.clip(np.floor(arr + 0.5), 0.0, 255.0).astype(np.uint8)


def write_pgm(image, path):
    """Write as binary PGM; intensities are clamped and rounded half up."""
    payload = quantize(image)
    height, width = payload.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + payload.tobytes())
