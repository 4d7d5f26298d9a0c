"""Image encode/decode for the formats the service accepts.

BMP (24-bit uncompressed) and binary PGM/PPM are implemented here so the
bytes we write are reproducible; JPEG decoding is delegated to Pillow.
The format is sniffed from magic bytes, so content-type hints are
advisory only.
"""

from __future__ import annotations

import io
import struct
from pathlib import Path

import numpy as np

from .raster import ColorRaster, GrayRaster


class ImageDecodeError(ValueError):
    """Bytes do not parse as a supported image format."""


# ---------------------------------------------------------------------------
# PGM / PPM (binary P5 / P6)
# ---------------------------------------------------------------------------

def _read_pnm_tokens(data: bytes, count: int, start: int) -> tuple[list[int], int]:
    """Read `count` whitespace-separated numeric tokens, honoring # comments."""
    tokens: list[int] = []
    i = start
    while len(tokens) < count:
        if i >= len(data):
            raise ImageDecodeError("truncated PNM header")
        c = data[i:i + 1]
        if c == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        elif c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < len(data) and data[j:j + 1].isdigit():
                j += 1
            tokens.append(int(data[i:j]))
            i = j
        else:
            raise ImageDecodeError(f"unexpected byte {c!r} in PNM header")
    if i >= len(data) or not data[i:i + 1].isspace():
        raise ImageDecodeError("PNM header not terminated by whitespace")
    return tokens, i + 1


def decode_pgm(data: bytes) -> GrayRaster:
    if not data.startswith(b"P5"):
        raise ImageDecodeError("not a binary PGM (P5)")
    (w, h, maxval), offset = _read_pnm_tokens(data, 3, 2)
    if maxval != 255:
        raise ImageDecodeError(f"only maxval 255 supported, got {maxval}")
    if len(data) - offset < w * h:
        raise ImageDecodeError("truncated PGM pixel data")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h, offset=offset)
    return GrayRaster(pixels.reshape(h, w).copy())


def decode_ppm(data: bytes) -> ColorRaster:
    if not data.startswith(b"P6"):
        raise ImageDecodeError("not a binary PPM (P6)")
    (w, h, maxval), offset = _read_pnm_tokens(data, 3, 2)
    if maxval != 255:
        raise ImageDecodeError(f"only maxval 255 supported, got {maxval}")
    if len(data) - offset < w * h * 3:
        raise ImageDecodeError("truncated PPM pixel data")
    pixels = np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=offset)
    return ColorRaster(pixels.reshape(h, w, 3).copy())


def encode_pgm(img: GrayRaster) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def encode_ppm(img: ColorRaster) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


# ---------------------------------------------------------------------------
# BMP (24-bit uncompressed, BITMAPINFOHEADER)
# ---------------------------------------------------------------------------

def decode_bmp(data: bytes) -> ColorRaster:
    if len(data) < 54 or not data.startswith(b"BM"):
        raise ImageDecodeError("not a BMP file")
    pixel_offset = struct.unpack_from("<I", data, 10)[0]
    header_size = struct.unpack_from("<I", data, 14)[0]
    if header_size < 40:
        raise ImageDecodeError(f"unsupported BMP header size {header_size}")
    width, height = struct.unpack_from("<ii", data, 18)
    planes, bpp = struct.unpack_from("<HH", data, 26)
    compression = struct.unpack_from("<I", data, 30)[0]
    if planes != 1 or bpp != 24 or compression != 0:
        raise ImageDecodeError(
            f"only 24-bit uncompressed BMP supported (bpp={bpp}, compression={compression})")
    if width <= 0 or height == 0:
        raise ImageDecodeError(f"bad BMP dimensions {width}x{height}")
    bottom_up = height > 0
    height = abs(height)
    stride = (width * 3 + 3) & ~3
    if len(data) - pixel_offset < stride * height:
        raise ImageDecodeError("truncated BMP pixel data")
    raw = np.frombuffer(data, dtype=np.uint8, count=stride * height, offset=pixel_offset)
    rows = raw.reshape(height, stride)[:, :width * 3].reshape(height, width, 3)
    if bottom_up:
        rows = rows[::-1]
    return ColorRaster(rows[:, :, ::-1].copy())  # BGR -> RGB


def encode_bmp(img: ColorRaster | GrayRaster) -> bytes:
    """24-bit bottom-up BMP; grayscale input is replicated across channels."""
    if isinstance(img, GrayRaster):
        rgb = np.repeat(img.pixels[:, :, None], 3, axis=2)
    else:
        rgb = img.pixels
    h, w = rgb.shape[:2]
    stride = (w * 3 + 3) & ~3
    rows = np.zeros((h, stride), dtype=np.uint8)
    rows[:, :w * 3] = rgb[:, :, ::-1].reshape(h, w * 3)  # RGB -> BGR
    pixel_data = rows[::-1].tobytes()
    file_size = 54 + len(pixel_data)
    header = struct.pack("<2sIHHI", b"BM", file_size, 0, 0, 54)
    dib = struct.pack("<IiiHHIIiiII", 40, w, h, 1, 24, 0, len(pixel_data), 2835, 2835, 0, 0)
    return header + dib + pixel_data


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def decode_image(data: bytes) -> ColorRaster | GrayRaster:
    """Decode by magic bytes: BMP, P5/P6, or JPEG (via Pillow)."""
    if data.startswith(b"BM"):
        return decode_bmp(data)
    if data.startswith(b"P5"):
        return decode_pgm(data)
    if data.startswith(b"P6"):
        return decode_ppm(data)
    if data.startswith(b"\xff\xd8\xff"):
        return _decode_jpeg(data)
    raise ImageDecodeError("unrecognized image format (expected BMP, P5, P6 or JPEG)")


def _decode_jpeg(data: bytes) -> ColorRaster | GrayRaster:
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover
        raise ImageDecodeError("JPEG support requires Pillow") from exc
    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.mode == "L":
                return GrayRaster(np.asarray(im, dtype=np.uint8))
            return ColorRaster(np.asarray(im.convert("RGB"), dtype=np.uint8))
    except Exception as exc:
        raise ImageDecodeError(f"JPEG decode failed: {exc}") from exc


def load_image(path: str | Path) -> ColorRaster | GrayRaster:
    return decode_image(Path(path).read_bytes())


def save_pgm(path: str | Path, img: GrayRaster) -> None:
    Path(path).write_bytes(encode_pgm(img))


def save_bmp(path: str | Path, img: ColorRaster | GrayRaster) -> None:
    Path(path).write_bytes(encode_bmp(img))
