"""File writers cross-checked against independent readers.

The NPY writer is verified by numpy.load and the PNG writer by Pillow;
neither library is used on the writing side, so agreement here means the
bytes on disk follow the published formats.
"""

import io
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from scopegen.arrayio import (
    npy_bytes,
    png16_bytes,
    quantize_uint16,
    read_image,
    write_npy,
    write_png16,
)
from scopegen.errors import UnsupportedShape

RNG = np.random.default_rng(2024)


def arrays_for_npy():
    return [
        np.float64(3.5) * np.ones(()),  # 0-d
        np.arange(7, dtype=np.float32),
        RNG.normal(size=(5, 9)),
        RNG.normal(size=(3, 4, 2)).astype(np.float32),
        (RNG.normal(size=(6, 6)) + 1j * RNG.normal(size=(6, 6))),
        RNG.integers(0, 1000, size=(4, 5)).astype(np.int64),
        RNG.integers(0, 65535, size=(8, 3)).astype(np.uint16),
        (RNG.normal(size=(5,)) > 0),
        np.empty((0, 4)),
        np.asfortranarray(RNG.normal(size=(5, 7))),  # must come out C-ordered
    ]


class TestNpyWriter:
    @pytest.mark.parametrize("array", arrays_for_npy(), ids=lambda a: f"{a.dtype}-{a.shape}")
    def test_numpy_load_reads_our_bytes_exactly(self, array, tmp_path):
        path = tmp_path / "a.npy"
        write_npy(path, array)
        loaded = np.load(path)
        assert loaded.dtype == np.ascontiguousarray(array).dtype
        assert loaded.shape == array.shape
        np.testing.assert_array_equal(loaded, array)

    def test_bytes_identical_to_numpy_save(self):
        # numpy also writes version 1.0 with 64-byte alignment for plain
        # dtypes, so the outputs should agree byte for byte.
        array = RNG.normal(size=(16, 16))
        buffer = io.BytesIO()
        np.save(buffer, array)
        assert npy_bytes(array) == buffer.getvalue()

    def test_header_is_64_byte_aligned(self):
        for array in arrays_for_npy():
            blob = npy_bytes(array)
            header_len = struct.unpack("<H", blob[8:10])[0]
            assert (10 + header_len) % 64 == 0

    def test_magic_and_version(self):
        blob = npy_bytes(np.zeros(3))
        assert blob[:6] == b"\x93NUMPY"
        assert blob[6:8] == bytes([1, 0])

    def test_object_arrays_rejected(self):
        with pytest.raises(UnsupportedShape):
            npy_bytes(np.array([object()], dtype=object))

    @given(
        st.integers(1, 20),
        st.integers(1, 20),
        st.sampled_from(["<f8", "<f4", "<i4", "<u2", "<c16"]),
    )
    @settings(max_examples=30, deadline=None)
    def test_random_shapes_round_trip(self, h, w, dtype):
        array = RNG.normal(size=(h, w)).astype(dtype)
        loaded = np.load(io.BytesIO(npy_bytes(array)))
        np.testing.assert_array_equal(loaded, array)


class TestQuantize:
    def test_full_range_mapping(self):
        image = np.array([[0.0, 0.5], [1.0, 0.25]])
        q, lo, hi = quantize_uint16(image)
        assert (lo, hi) == (0.0, 1.0)
        assert q[0, 0] == 0
        assert q[1, 0] == 65535
        assert q[0, 1] == round(0.5 * 65535)

    def test_explicit_window_clips(self):
        image = np.array([-1.0, 0.0, 2.0, 5.0])
        q, lo, hi = quantize_uint16(image, lo=0.0, hi=2.0)
        assert q[0] == 0 and q[1] == 0
        assert q[2] == 65535 and q[3] == 65535

    def test_constant_image_maps_to_zero(self):
        q, lo, hi = quantize_uint16(np.full((4, 4), 7.0))
        assert (q == 0).all()
        assert lo == hi == 7.0

    def test_inverse_mapping_recovers_values(self):
        image = RNG.normal(size=(32, 32))
        q, lo, hi = quantize_uint16(image)
        recovered = lo + (hi - lo) * q.astype(float) / 65535.0
        step = (hi - lo) / 65535.0
        assert np.abs(recovered - image).max() <= step / 2 + 1e-12


class TestPng16Writer:
    def test_pillow_reads_our_bytes_exactly(self, tmp_path):
        image = RNG.integers(0, 65536, size=(24, 31)).astype(np.uint16)
        path = tmp_path / "a.png"
        write_png16(path, image)
        with Image.open(path) as img:
            assert img.mode == "I;16" or img.mode == "I"
            loaded = np.asarray(img).astype(np.uint16)
        np.testing.assert_array_equal(loaded, image)

    def test_signature_and_chunk_layout(self):
        blob = png16_bytes(np.zeros((2, 3), dtype=np.uint16))
        assert blob[:8] == b"\x89PNG\r\n\x1a\n"
        # IHDR: width=3 height=2 depth=16 color=0 (grayscale)
        assert blob[8:16] == struct.pack(">I", 13) + b"IHDR"
        width, height, depth, color = struct.unpack(">IIBB", blob[16:26])
        assert (width, height, depth, color) == (3, 2, 16, 0)
        assert blob.endswith(
            struct.pack(">I", 0) + b"IEND" + struct.pack(">I", 0xAE426082)
        )

    def test_extreme_values_survive(self, tmp_path):
        image = np.array([[0, 65535], [32768, 1]], dtype=np.uint16)
        path = tmp_path / "extremes.png"
        write_png16(path, image)
        np.testing.assert_array_equal(
            np.asarray(Image.open(path)).astype(np.uint16), image
        )

    def test_rejects_wrong_dtype_and_rank(self):
        with pytest.raises(UnsupportedShape):
            png16_bytes(np.zeros((4, 4), dtype=np.uint8))
        with pytest.raises(UnsupportedShape):
            png16_bytes(np.zeros((4, 4, 3), dtype=np.uint16))

    @given(st.integers(1, 40), st.integers(1, 40))
    @settings(max_examples=20, deadline=None)
    def test_random_sizes_round_trip(self, h, w):
        image = RNG.integers(0, 65536, size=(h, w)).astype(np.uint16)
        loaded = np.asarray(Image.open(io.BytesIO(png16_bytes(image))))
        np.testing.assert_array_equal(loaded.astype(np.uint16), image)


class TestReadImage:
    def test_reads_our_png_normalized(self, tmp_path):
        image = np.array([[0, 65535], [13107, 26214]], dtype=np.uint16)
        path = tmp_path / "norm.png"
        write_png16(path, image)
        loaded = read_image(path)
        np.testing.assert_allclose(loaded, image / 65535.0, atol=1e-12)

    def test_averages_rgb_to_one_channel(self, tmp_path):
        rgb = RNG.integers(0, 255, size=(5, 6, 3)).astype(np.uint8)
        path = tmp_path / "rgb.png"
        Image.fromarray(rgb, mode="RGB").save(path)
        loaded = read_image(path)
        assert loaded.shape == (5, 6)
        np.testing.assert_allclose(loaded, rgb.mean(axis=2) / 255.0, atol=1e-12)
