"""Array file writers that emit NPY and PNG byte layouts directly.

The NPY and PNG writers here deliberately avoid numpy.save and Pillow so
the test suite can cross-check every written byte against those libraries
as independent readers. Reading experimental images (PNG/TIFF) goes
through Pillow, which is the conventional tool for that direction.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import UnsupportedShape

_MAGIC = b"\x93NUMPY"


def npy_bytes(array: np.ndarray) -> bytes:
    """Serialize an array in NPY format version 1.0 (C order)."""
    # asarray(order="C") rather than ascontiguousarray: the latter
    # promotes 0-d arrays to 1-d, which would corrupt scalar shapes.
    array = np.asarray(array, order="C")
    descr = array.dtype.str
    if array.dtype.hasobject:
        raise UnsupportedShape("object arrays cannot be serialized")
    header_dict = (
        "{'descr': %r, 'fortran_order': False, 'shape': %s, }"
        % (descr, repr(array.shape))
    )
    prefix_len = len(_MAGIC) + 2 + 2  # magic, version, header-size field
    unpadded = prefix_len + len(header_dict) + 1  # trailing newline
    padding = (64 - unpadded % 64) % 64
    header = header_dict + " " * padding + "\n"
    if len(header) > 0xFFFF:
        raise UnsupportedShape("header too large for format version 1.0")
    out = bytearray()
    out += _MAGIC
    out += bytes([1, 0])
    out += struct.pack("<H", len(header))
    out += header.encode("latin1")
    out += array.tobytes(order="C")
    return bytes(out)


def write_npy(path, array: np.ndarray) -> None:
    with open(path, "wb") as handle:
        handle.write(npy_bytes(array))


def quantize_uint16(
    image: np.ndarray, lo: float | None = None, hi: float | None = None
) -> tuple[np.ndarray, float, float]:
    """Map a float image onto the full uint16 range.

    Returns the quantized image and the (lo, hi) actually used, so the
    mapping can be recorded and inverted. A constant image maps to 0.
    """
    image = np.asarray(image, dtype=float)
    if lo is None:
        lo = float(image.min())
    if hi is None:
        hi = float(image.max())
    if hi <= lo:
        return np.zeros(image.shape, dtype=np.uint16), lo, hi
    scaled = np.clip((image - lo) / (hi - lo), 0.0, 1.0)
    return np.round(scaled * 65535.0).astype(np.uint16), lo, hi


_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"


def _chunk(chunk_type: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(chunk_type + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + chunk_type + payload + struct.pack(">I", crc)


def png16_bytes(image: np.ndarray) -> bytes:
    """Serialize a uint16 array as a 16-bit grayscale PNG."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise UnsupportedShape(f"PNG export needs a 2-D array, got shape {image.shape}")
    if image.dtype != np.uint16:
        raise UnsupportedShape(f"PNG export needs uint16 data, got {image.dtype}")
    height, width = image.shape
    ihdr = struct.pack(">IIBBBBB", width, height, 16, 0, 0, 0, 0)
    big_endian = image.astype(">u2")
    raw = bytearray()
    for row in range(height):
        raw.append(0)  # filter type: none
        raw += big_endian[row].tobytes()
    idat = zlib.compress(bytes(raw), level=6)
    return (
        _PNG_SIGNATURE
        + _chunk(b"IHDR", ihdr)
        + _chunk(b"IDAT", idat)
        + _chunk(b"IEND", b"")
    )


def write_png16(path, image: np.ndarray) -> None:
    with open(path, "wb") as handle:
        handle.write(png16_bytes(image))


def read_image(path) -> np.ndarray:
    """Load an experimental image (PNG/TIFF/...) as float64 in [0, 1].

    Multi-channel inputs are averaged to one channel; integer data is
    scaled by its type's full range.
    """
    from PIL import Image

    with Image.open(path) as img:
        array = np.asarray(img)
    scales = {
        np.dtype(np.uint8): 255.0,
        np.dtype(np.uint16): 65535.0,
        np.dtype(np.int32): 2147483647.0,
    }
    scale = scales.get(array.dtype, 1.0)
    if array.ndim == 3:
        array = array.mean(axis=2)
    return array.astype(float) / scale
