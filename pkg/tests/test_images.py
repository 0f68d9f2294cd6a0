import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from fuseval.errors import CorruptData, DimensionMismatch, MissingFile, UnsupportedFormat
from fuseval.images import (
    histogram,
    joint_histogram,
    load_image,
    save_image,
    to_grayscale,
)

from .conftest import random_gray
from .oracles import oracle_histogram, oracle_joint_histogram

gray_images = arrays(np.uint8, st.tuples(st.integers(1, 16), st.integers(1, 16)))


class TestLoadImage:
    def test_png_roundtrip_color(self, tmp_path, rng):
        img = rng.integers(0, 256, size=(512, 640, 3), dtype=np.uint8)
        path = tmp_path / "pair.png"
        save_image(img, path)
        loaded = load_image(path)
        assert loaded.shape == (512, 640, 3)
        assert np.array_equal(loaded, img)

    def test_single_channel_yields_gray(self, tmp_path):
        path = tmp_path / "one.png"
        Image.fromarray(np.zeros((1, 1), dtype=np.uint8), mode="L").save(path)
        loaded = load_image(path)
        assert loaded.shape == (1, 1)
        assert loaded[0, 0] == 0

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            load_image(tmp_path / "nope.png")

    def test_truncated_file_is_corrupt(self, tmp_path, rng):
        path = tmp_path / "big.png"
        save_image(rng.integers(0, 256, size=(64, 64, 3), dtype=np.uint8), path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(CorruptData):
            load_image(path)

    def test_unknown_format_rejected(self, tmp_path):
        path = tmp_path / "fake.png"
        path.write_bytes(b"definitely not an image")
        with pytest.raises(UnsupportedFormat):
            load_image(path)

    def test_non_png_jpeg_rejected(self, tmp_path):
        path = tmp_path / "img.bmp"
        Image.fromarray(np.zeros((4, 4), dtype=np.uint8), mode="L").save(path, format="BMP")
        with pytest.raises(UnsupportedFormat):
            load_image(path)

    def test_16bit_rejected(self, tmp_path):
        path = tmp_path / "deep.png"
        Image.fromarray(np.zeros((4, 4), dtype=np.uint16)).save(path)
        with pytest.raises(UnsupportedFormat):
            load_image(path)


class TestToGrayscale:
    def test_white(self):
        img = np.full((2, 2, 3), 255, dtype=np.uint8)
        assert np.all(to_grayscale(img) == 255)

    def test_pure_red(self):
        img = np.zeros((1, 1, 3), dtype=np.uint8)
        img[0, 0, 0] = 255
        # round(0.299 * 255) by hand
        assert to_grayscale(img)[0, 0] == 76

    def test_neutral_gray(self):
        img = np.full((1, 1, 3), 10, dtype=np.uint8)
        assert to_grayscale(img)[0, 0] == 10

    def test_idempotent_on_gray_triples(self, rng):
        channel = random_gray(rng, 8, 8)
        img = np.stack([channel] * 3, axis=-1)
        assert np.array_equal(to_grayscale(img), channel)

    def test_gray_passthrough(self, rng):
        gray = random_gray(rng, 5, 7)
        assert to_grayscale(gray) is not None
        assert np.array_equal(to_grayscale(gray), gray)


class TestHistogram:
    def test_constant_zero(self):
        p = histogram(np.zeros((4, 4), dtype=np.uint8))
        assert p[0] == 1.0
        assert np.all(p[1:] == 0.0)

    def test_two_pixel_symmetry(self):
        p = histogram(np.array([[0, 255]], dtype=np.uint8))
        assert p[0] == 0.5
        assert p[255] == 0.5

    def test_matches_counting_oracle(self, rng):
        img = random_gray(rng, 16, 16)
        assert np.array_equal(histogram(img), np.array(oracle_histogram(img)))

    @given(gray_images)
    def test_sums_to_one(self, img):
        assert abs(histogram(img).sum() - 1.0) < 1e-9


class TestJointHistogram:
    def test_degenerate_constant(self):
        img = np.full((3, 3), 5, dtype=np.uint8)
        j = joint_histogram(img, img)
        assert j[5, 5] == 1.0
        assert j.sum() == 1.0

    def test_two_pixel_case(self):
        a = np.array([[0, 0]], dtype=np.uint8)
        b = np.array([[0, 255]], dtype=np.uint8)
        j = joint_histogram(a, b)
        assert j[0, 0] == 0.5
        assert j[0, 255] == 0.5

    def test_matches_pair_counting_oracle(self, rng):
        a = random_gray(rng, 8, 8)
        b = random_gray(rng, 8, 8)
        assert np.array_equal(joint_histogram(a, b), np.array(oracle_joint_histogram(a, b)))

    def test_marginals_match_histograms(self, rng):
        a = random_gray(rng, 8, 8)
        b = random_gray(rng, 8, 8)
        j = joint_histogram(a, b)
        assert np.allclose(j.sum(axis=1), histogram(a), atol=1e-9)
        assert np.allclose(j.sum(axis=0), histogram(b), atol=1e-9)
        assert abs(j.sum() - 1.0) < 1e-9

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            joint_histogram(random_gray(rng, 4, 4), random_gray(rng, 4, 5))
