import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fuseval.errors import DimensionMismatch, ImageTooSmall
from fuseval.metrics import (
    METRIC_NAMES,
    SsimParams,
    conventions,
    edge_map,
    entropy,
    evaluate_all,
    mutual_information,
    psnr,
    qabf,
    ssim_fusion,
    std_dev,
)
from fuseval.manifest import ImagePair, Scenario

from .conftest import random_gray, random_triple
from .oracles import (
    oracle_entropy,
    oracle_mi,
    oracle_psnr,
    oracle_qabf,
    oracle_ssim,
    oracle_std,
)

small_gray = arrays(np.uint8, st.tuples(st.integers(2, 12), st.integers(2, 12)))


def checkerboard(h, w, low=0, high=255):
    img = np.fromfunction(lambda i, j: (i + j) % 2, (h, w))
    return np.where(img > 0, high, low).astype(np.uint8)


class TestEntropy:
    def test_constant_image_is_zero(self):
        assert entropy(np.full((8, 8), 42, dtype=np.uint8)).value == 0.0

    def test_half_half_is_one_bit(self):
        assert entropy(checkerboard(8, 8)).value == 1.0

    def test_matches_oracle(self, rng):
        img = random_gray(rng, 32, 32)
        assert abs(entropy(img).value - oracle_entropy(img)) < 1e-12

    @given(small_gray, st.randoms())
    @settings(max_examples=30)
    def test_permutation_invariant(self, img, pyrandom):
        flat = img.ravel().copy()
        pyrandom.shuffle(flat)
        assert entropy(flat.reshape(img.shape)).value == pytest.approx(
            entropy(img).value, abs=1e-12
        )

    @given(small_gray)
    @settings(max_examples=30)
    def test_bounded_by_eight_bits(self, img):
        assert 0.0 <= entropy(img).value <= 8.0


class TestStdDev:
    def test_constant_is_zero(self):
        assert std_dev(np.full((4, 4), 7, dtype=np.uint8)).value == 0.0

    def test_half_half_is_127_5(self):
        assert std_dev(checkerboard(8, 8)).value == 127.5

    def test_matches_two_pass_oracle(self, rng):
        img = random_gray(rng, 16, 16)
        assert abs(std_dev(img).value - oracle_std(img)) < 1e-9

    def test_scales_linearly_on_real_valued_path(self, rng):
        img = random_gray(rng, 8, 8)
        base = std_dev(img).value
        for k in (0.0, 0.5):
            scaled = img.astype(np.float64) * k
            assert std_dev(scaled).value == k * base


class TestMutualInformation:
    def test_self_fusion_is_twice_entropy(self, rng):
        img = random_gray(rng, 16, 16)
        mi = mutual_information(img, img, img)
        assert mi.value == 2.0 * entropy(img).value

    def test_mi_of_identical_equals_entropy_exactly(self, rng):
        for _ in range(10):
            img = random_gray(rng, 12, 9)
            mi = mutual_information(img, img, img)
            h = entropy(img).value
            assert mi.per_source_components[0] == h
            assert mi.per_source_components[1] == h

    def test_constant_source_contributes_zero(self, rng):
        const = np.full((8, 8), 3, dtype=np.uint8)
        fused = random_gray(rng, 8, 8)
        mi = mutual_information(const, fused, fused)
        assert mi.per_source_components[0] == 0.0

    def test_matches_double_sum_oracle(self, rng):
        vis, ir, fused = random_triple(rng, 8, 8)
        mi = mutual_information(vis, ir, fused)
        assert mi.value == pytest.approx(oracle_mi(vis, ir, fused), abs=1e-9)

    def test_symmetry(self, rng):
        a = random_gray(rng, 8, 8)
        f = random_gray(rng, 8, 8)
        lhs = mutual_information(a, a, f).per_source_components[0]
        rhs = mutual_information(f, f, a).per_source_components[0]
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_nonnegative(self, rng):
        for _ in range(20):
            vis, ir, fused = random_triple(rng, 8, 8)
            assert mutual_information(vis, ir, fused).value >= 0.0

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            mutual_information(random_gray(rng, 4, 4), random_gray(rng, 4, 4),
                               random_gray(rng, 4, 5))


class TestPsnr:
    def test_uniform_error_one(self, rng):
        fused = random_gray(rng, 8, 8)
        fused = np.clip(fused, 1, 254)
        vis = fused - 1
        ir = fused + 1
        expected = 10.0 * math.log10(255.0 ** 2)
        result = psnr(vis, ir, fused)
        assert result.value == pytest.approx(expected, abs=1e-3)
        assert result.per_source_components[0] == pytest.approx(expected, abs=1e-3)

    def test_zero_mse_capped_at_100(self, rng):
        img = random_gray(rng, 8, 8)
        assert psnr(img, img, img).value == 100.0

    def test_matches_mse_oracle(self, rng):
        vis, ir, fused = random_triple(rng, 8, 8)
        assert psnr(vis, ir, fused).value == pytest.approx(
            oracle_psnr(vis, ir, fused), abs=1e-9
        )

    def test_monotone_in_mse(self, rng):
        base = random_gray(rng, 8, 8)
        previous = math.inf
        for offset in [1, 4, 16, 64]:
            fused = np.clip(base.astype(np.int32) + offset, 0, 255).astype(np.uint8)
            value = psnr(base, base, fused).value
            assert value < previous
            previous = value

    def test_alternative_aggregation(self, rng):
        vis, ir, fused = random_triple(rng, 8, 8)
        mean_of = psnr(vis, ir, fused, aggregation="mean_of_psnrs")
        of_mean = psnr(vis, ir, fused, aggregation="psnr_of_mean_mse")
        mse_v = np.mean((fused.astype(float) - vis.astype(float)) ** 2)
        mse_i = np.mean((fused.astype(float) - ir.astype(float)) ** 2)
        assert of_mean.value == pytest.approx(
            10 * math.log10(255 ** 2 / ((mse_v + mse_i) / 2)), abs=1e-9
        )
        assert mean_of.value != of_mean.value or mse_v == mse_i


class TestQabf:
    def test_identical_triple_is_one(self, rng):
        img = random_gray(rng, 16, 16)
        assert qabf(img, img, img).value == pytest.approx(1.0, abs=1e-6)

    def test_constant_fused_scores_near_zero(self, rng):
        vis = checkerboard(16, 16)
        ir = random_gray(rng, 16, 16)
        fused = np.full((16, 16), 128, dtype=np.uint8)
        assert qabf(vis, ir, fused).value < 0.05

    def test_matches_per_pixel_oracle(self, rng):
        vis, ir, fused = random_triple(rng, 8, 8)
        assert qabf(vis, ir, fused).value == pytest.approx(
            oracle_qabf(vis, ir, fused), abs=1e-6
        )

    def test_bounded_unit_interval(self, rng):
        for _ in range(10):
            vis, ir, fused = random_triple(rng, 8, 8)
            assert 0.0 <= qabf(vis, ir, fused).value <= 1.0

    def test_swap_invariant_for_identical_sources(self, rng):
        src = random_gray(rng, 12, 12)
        fused = random_gray(rng, 12, 12)
        assert qabf(src, src, fused).value == qabf(src, src, fused).value

    def test_all_constant_returns_zero(self):
        const = np.full((8, 8), 9, dtype=np.uint8)
        assert qabf(const, const, const).value == 0.0

    def test_too_small(self, rng):
        with pytest.raises(ImageTooSmall):
            qabf(random_gray(rng, 2, 8), random_gray(rng, 2, 8), random_gray(rng, 2, 8))

    def test_edge_map_strength_definition(self, rng):
        img = random_gray(rng, 6, 6)
        em = edge_map(img)
        assert np.all(em.strength >= 0)
        assert np.all(em.orientation > -np.pi / 2 - 1e-12)
        assert np.all(em.orientation <= np.pi / 2 + 1e-12)


class TestSsim:
    def test_identical_triple_totals_two(self, rng):
        img = random_gray(rng, 16, 16)
        result = ssim_fusion(img, img, img)
        assert result.value == pytest.approx(2.0, abs=1e-9)
        assert result.per_source_components == (1.0, 1.0)

    def test_structured_vs_constant_scores_low(self, rng):
        vis = checkerboard(16, 16)
        ir = random_gray(rng, 16, 16)
        fused = np.full((16, 16), 128, dtype=np.uint8)
        assert ssim_fusion(vis, ir, fused).value < 1.0

    def test_matches_sliding_window_oracle(self, rng):
        vis, ir, fused = random_triple(rng, 16, 16)
        assert ssim_fusion(vis, ir, fused).value == pytest.approx(
            oracle_ssim(vis, ir, fused), abs=1e-9
        )

    def test_sum_convention_and_component_bound(self, rng):
        for _ in range(10):
            vis, ir, fused = random_triple(rng, 16, 16)
            result = ssim_fusion(vis, ir, fused)
            a, b = result.per_source_components
            assert result.value == a + b
            assert a <= 1.0 + 1e-12
            assert b <= 1.0 + 1e-12
            assert -2.0 <= result.value <= 2.0

    def test_total_can_exceed_one(self, rng):
        # good fusions legitimately score above 1 under the sum convention
        src = random_gray(rng, 16, 16)
        assert ssim_fusion(src, src, src).value > 1.0

    def test_window_sums_to_one(self):
        assert SsimParams().window.sum() == pytest.approx(1.0, abs=1e-12)

    def test_too_small(self, rng):
        with pytest.raises(ImageTooSmall):
            ssim_fusion(random_gray(rng, 8, 8), random_gray(rng, 8, 8),
                        random_gray(rng, 8, 8))


class TestEvaluateAll:
    def test_order_and_determinism(self, rng):
        vis = rng.integers(0, 255, (16, 16, 3), dtype=np.uint8)
        ir = random_gray(rng, 16, 16)
        fused = rng.integers(0, 255, (16, 16, 3), dtype=np.uint8)
        pair = ImagePair(vis, ir, "p", Scenario.DAYTIME)
        first = evaluate_all(pair, fused)
        second = evaluate_all(pair, fused)
        assert [m.name for m in first] == list(METRIC_NAMES)
        assert [m.value for m in first] == [m.value for m in second]

    def test_conventions_are_reportable(self):
        c = conventions()
        assert c["gray_levels"] == 256
        assert c["qabf_sigmoids"]["gamma_g"] == 0.9994
