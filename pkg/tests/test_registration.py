import numpy as np
import pytest

from fuseval.errors import EmptyOverlap, MissingFile, SchemaViolation, SingularHomography
from fuseval.registration import CropRect, Homography, load_homography, overlap_crop, warp

from .conftest import random_gray


def ramp(h, w):
    return (np.arange(h * w).reshape(h, w) % 256).astype(np.uint8)


class TestHomography:
    def test_normalizes_h22(self):
        h = Homography(np.diag([2.0, 2.0, 2.0]))
        assert h.h[2, 2] == 1.0
        assert h.h[0, 0] == 1.0

    def test_singular_rejected(self):
        with pytest.raises(SingularHomography):
            Homography(np.array([[1, 2, 3], [2, 4, 6], [0, 0, 1.0]]))

    def test_unnormalizable_rejected(self):
        m = np.eye(3)
        m[2, 2] = 0.0
        with pytest.raises(SingularHomography):
            Homography(m)

    def test_wrong_shape(self):
        with pytest.raises(SchemaViolation):
            Homography(np.eye(2))

    def test_inverse_and_compose(self):
        t = Homography.translation(3.0, -2.0)
        roundtrip = t.compose(t.inverse())
        assert np.allclose(roundtrip.h, np.eye(3), atol=1e-12)

    def test_apply_points(self):
        t = Homography.translation(1.0, 2.0)
        out = t.apply(np.array([[0.0, 0.0], [5.0, 5.0]]))
        assert np.allclose(out, [[1.0, 2.0], [6.0, 7.0]])


class TestLoadHomography:
    def test_reads_nine_numbers(self, tmp_path):
        path = tmp_path / "calib.txt"
        path.write_text("1 0 0\n0 1 0\n0 0 1\n")
        assert np.array_equal(load_homography(path).h, np.eye(3))

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            load_homography(tmp_path / "nope.txt")

    def test_wrong_count(self, tmp_path):
        path = tmp_path / "calib.txt"
        path.write_text("1 2 3 4")
        with pytest.raises(SchemaViolation):
            load_homography(path)

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "calib.txt"
        path.write_text("a b c d e f g h i")
        with pytest.raises(SchemaViolation):
            load_homography(path)


class TestWarp:
    def test_identity_is_bit_exact_gray(self, rng):
        img = random_gray(rng, 13, 17)
        out = warp(img, Homography.identity(), (17, 13))
        assert np.array_equal(out, img)

    def test_identity_is_bit_exact_color(self, rng):
        img = rng.integers(0, 256, size=(9, 11, 3), dtype=np.uint8)
        out = warp(img, Homography.identity(), (11, 9))
        assert np.array_equal(out, img)

    def test_translation_shifts_columns(self):
        # h = T(+1, 0): output samples the source at x-1, so content moves
        # right and the first column has no source coverage.
        img = ramp(3, 3)
        out = warp(img, Homography.translation(1.0, 0.0), (3, 3))
        assert np.all(out[:, 0] == 0)
        assert np.array_equal(out[:, 1:], img[:, :2])
        # a +1 px sampling offset (h = T(-1, 0)) shifts columns the other
        # way, zeroing the last column.
        out = warp(img, Homography.translation(-1.0, 0.0), (3, 3))
        assert np.all(out[:, 2] == 0)
        assert np.array_equal(out[:, :2], img[:, 1:])

    def test_composition_within_one_gray_level(self, rng):
        # smooth image so bilinear resampling error stays below a level
        base = np.add.outer(np.linspace(0, 120, 24), np.linspace(0, 100, 24))
        img = np.clip(base, 0, 255).astype(np.uint8)
        h1 = Homography.translation(0.5, 0.25)
        h2 = Homography(np.array([[1.01, 0.0, 0.3], [0.0, 0.99, 0.4], [0.0, 0.0, 1.0]]))
        two_step = warp(warp(img, h1, (24, 24)), h2, (24, 24))
        one_step = warp(img, h2.compose(h1), (24, 24))
        interior = (slice(3, -3), slice(3, -3))
        diff = np.abs(two_step[interior].astype(int) - one_step[interior].astype(int))
        assert diff.max() <= 1

    def test_out_of_frame_fills_zero(self, rng):
        img = random_gray(rng, 4, 4)
        out = warp(img, Homography.translation(10.0, 0.0), (4, 4))
        assert np.all(out == 0)


class TestOverlapCrop:
    def test_identity_full_frame(self, rng):
        a = random_gray(rng, 10, 12)
        b = random_gray(rng, 10, 12)
        ca, cb, rect = overlap_crop(a, b, Homography.identity())
        assert rect == CropRect(0, 0, 12, 10)
        assert np.array_equal(ca, a)
        assert np.array_equal(cb, b)

    def test_half_width_translation(self, rng):
        a = random_gray(rng, 8, 16)
        b = random_gray(rng, 8, 16)
        ca, cb, rect = overlap_crop(a, b, Homography.translation(8.0, 0.0))
        assert rect.x0 == 8
        assert rect.width == 8
        assert rect.height == 8
        assert ca.shape == cb.shape

    def test_translation_beyond_width_is_empty(self, rng):
        a = random_gray(rng, 8, 8)
        b = random_gray(rng, 8, 8)
        with pytest.raises(EmptyOverlap):
            overlap_crop(a, b, Homography.translation(20.0, 0.0))

    def test_outputs_always_same_shape(self, rng):
        a = random_gray(rng, 9, 9)
        b = random_gray(rng, 9, 9)
        for tx, ty in [(0.0, 0.0), (2.5, 1.0), (-3.0, 4.0), (0.0, -2.25)]:
            ca, cb, _ = overlap_crop(a, b, Homography.translation(tx, ty))
            assert ca.shape == cb.shape
