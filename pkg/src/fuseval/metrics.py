"""The six general fusion-quality metrics.

Every metric scores a fused image against the (visible, infrared) source
pair on a common 8-bit grayscale representation:

* EN    -- Shannon entropy of the fused gray-level histogram, in bits
* SD    -- population standard deviation of fused intensities
* MI    -- mutual information between each source and the fused image,
           summed over both sources, in bits
* PSNR  -- peak signal-to-noise ratio against each source, averaged, in dB
* Qabf  -- gradient-based edge-preservation score in [0, 1]
* SSIM  -- structural similarity against each source, summed over both
           sources (so the total may exceed 1)

All computations are deterministic float64; no randomness anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import convolve2d

from .errors import ImageTooSmall
from .images import (
    GRAY_LEVELS,
    histogram,
    joint_counts,
    require_gray,
    require_same_shape,
    to_grayscale,
)

EN = "EN"
SD = "SD"
MI = "MI"
PSNR = "PSNR"
QABF = "Qabf"
SSIM = "SSIM"
SPEED = "Speed"

#: Canonical row order for reports.
METRIC_NAMES = (EN, SD, MI, PSNR, QABF, SSIM)

PSNR_MAX = 255.0
PSNR_ZERO_MSE_CAP_DB = 100.0

#: How the two per-source PSNRs are combined. "mean_of_psnrs" (default)
#: averages the two dB values; "psnr_of_mean_mse" converts the averaged
#: MSE instead. The active choice is echoed in every results file.
PSNR_AGGREGATIONS = ("mean_of_psnrs", "psnr_of_mean_mse")

# Edge-preservation sigmoid parameters (strength: gamma/kappa/delta, then
# orientation). De-facto reference parameterization for gradient-based
# fusion scoring; echoed in results metadata since they are a convention,
# not a measured quantity.
QABF_GAMMA_G = 0.9994
QABF_KAPPA_G = -15.0
QABF_DELTA_G = 0.5
QABF_GAMMA_A = 0.9879
QABF_KAPPA_A = -22.0
QABF_DELTA_A = 0.8
QABF_STRENGTH_POWER = 1.0

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = np.array([[1.0, 2.0, 1.0], [0.0, 0.0, 0.0], [-1.0, -2.0, -1.0]])


@dataclass(frozen=True)
class MetricValue:
    """One computed metric: name, scalar value, optional per-source split."""

    name: str
    value: float
    per_source_components: tuple[float, float] | None = None


@dataclass(frozen=True)
class EdgeMap:
    """Per-pixel Sobel edge strength and orientation.

    strength = sqrt(sx^2 + sy^2); orientation = arctan(sy / sx) in
    (-pi/2, pi/2], with vertical-response pixels (sx == 0) mapped to pi/2.
    """

    strength: np.ndarray
    orientation: np.ndarray


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    window = np.outer(g, g)
    return window / window.sum()


@dataclass(frozen=True)
class SsimParams:
    """Sliding-window configuration: 11x11 Gaussian (sigma 1.5), standard
    stabilizers C1 = (0.01*255)^2 and C2 = (0.03*255)^2."""

    window: np.ndarray = field(default_factory=lambda: _gaussian_window(11, 1.5))
    c1: float = (0.01 * 255.0) ** 2
    c2: float = (0.03 * 255.0) ** 2


def _entropy_bits(probabilities: np.ndarray) -> float:
    """Shannon entropy of strictly positive probabilities, in bits."""
    return float(-np.sum(probabilities * np.log2(probabilities))) + 0.0


def entropy(img: np.ndarray) -> MetricValue:
    """EN = -sum_i p_i log2 p_i over the 256-level histogram.

    Zero-probability levels contribute nothing; a constant image scores 0
    and the maximum is 8 bits.
    """
    p = histogram(img)
    return MetricValue(EN, _entropy_bits(p[p > 0]))


def std_dev(img: np.ndarray) -> MetricValue:
    """Population standard deviation of intensities.

    SD = sqrt(mean((F - mean(F))^2)) with 1/(M*N) normalization. Accepts
    float-valued arrays as well as uint8 so synthetic scaling checks can
    avoid quantization.
    """
    img = require_gray(img)
    x = img.astype(np.float64)
    return MetricValue(SD, float(np.sqrt(np.mean((x - x.mean()) ** 2))))


def _mi_bits(a: np.ndarray, b: np.ndarray) -> float:
    """Mutual information of two uint8 images in bits.

    Evaluated as H(A) + H(B) - H(A,B) over the 256x256 joint histogram;
    this is algebraically the direct double sum
    sum_ab P_AB log2(P_AB / (P_A P_B)) and keeps MI(X, X) == H(X) exact
    because the marginals are derived from the same integer counts.
    """
    counts = joint_counts(a, b)
    n = a.size
    pa = counts.sum(axis=1) / n
    pb = counts.sum(axis=0) / n
    pab = counts / n
    h_a = _entropy_bits(pa[pa > 0])
    h_b = _entropy_bits(pb[pb > 0])
    h_ab = _entropy_bits(pab[pab > 0])
    return max(0.0, h_a + h_b - h_ab)


def mutual_information(vis: np.ndarray, ir: np.ndarray, fused: np.ndarray) -> MetricValue:
    """MI = MI(vis, fused) + MI(ir, fused), log base 2."""
    vis = require_gray(vis, "vis")
    ir = require_gray(ir, "ir")
    fused = require_gray(fused, "fused")
    require_same_shape(vis, fused)
    require_same_shape(ir, fused)
    mi_vis = _mi_bits(vis, fused)
    mi_ir = _mi_bits(ir, fused)
    return MetricValue(MI, mi_vis + mi_ir, (mi_vis, mi_ir))


def _psnr_db(reference: np.ndarray, fused: np.ndarray) -> float:
    mse = float(np.mean((fused.astype(np.float64) - reference.astype(np.float64)) ** 2))
    if mse == 0.0:
        return PSNR_ZERO_MSE_CAP_DB
    return 10.0 * math.log10(PSNR_MAX ** 2 / mse)


def psnr(
    vis: np.ndarray,
    ir: np.ndarray,
    fused: np.ndarray,
    aggregation: str = "mean_of_psnrs",
) -> MetricValue:
    """Peak signal-to-noise ratio of the fused image against both sources.

    Per source: PSNR = 10 log10(255^2 / MSE) with MSE the per-pixel mean
    squared error; a zero-MSE source is capped at 100 dB to keep
    aggregate statistics finite. The two components are combined per
    ``aggregation`` (see PSNR_AGGREGATIONS).
    """
    if aggregation not in PSNR_AGGREGATIONS:
        raise ValueError(f"unknown PSNR aggregation {aggregation!r}")
    vis = require_gray(vis, "vis")
    ir = require_gray(ir, "ir")
    fused = require_gray(fused, "fused")
    require_same_shape(vis, fused)
    require_same_shape(ir, fused)
    p_vis = _psnr_db(vis, fused)
    p_ir = _psnr_db(ir, fused)
    if aggregation == "mean_of_psnrs":
        value = (p_vis + p_ir) / 2.0
    else:
        mse_vis = float(np.mean((fused.astype(np.float64) - vis.astype(np.float64)) ** 2))
        mse_ir = float(np.mean((fused.astype(np.float64) - ir.astype(np.float64)) ** 2))
        mean_mse = (mse_vis + mse_ir) / 2.0
        value = PSNR_ZERO_MSE_CAP_DB if mean_mse == 0.0 else 10.0 * math.log10(
            PSNR_MAX ** 2 / mean_mse
        )
    return MetricValue(PSNR, value, (p_vis, p_ir))


def edge_map(img: np.ndarray) -> EdgeMap:
    """Sobel strength/orientation of a gray image.

    Borders are symmetric-padded so a flat image has zero response
    everywhere; zero padding would manufacture phantom edges along the
    frame.
    """
    img = require_gray(img)
    x = img.astype(np.float64)
    sx = convolve2d(x, _SOBEL_X, mode="same", boundary="symm")
    sy = convolve2d(x, _SOBEL_Y, mode="same", boundary="symm")
    strength = np.sqrt(sx ** 2 + sy ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        orientation = np.where(sx == 0.0, np.pi / 2.0, np.arctan(sy / np.where(sx == 0.0, 1.0, sx)))
    return EdgeMap(strength=strength, orientation=orientation)


def _edge_preservation(source: EdgeMap, fused: EdgeMap) -> np.ndarray:
    """Per-pixel edge-preservation map Q in [0, 1].

    Relative strength G = min(g_s, g_f) / max(g_s, g_f) (0 where both
    vanish) and orientation agreement A = 1 - |a_s - a_f| / (pi/2) are
    pushed through the two sigmoids; the product is normalized by its
    perfect-preservation value so that G = A = 1 scores exactly 1.
    """
    g_s, g_f = source.strength, fused.strength
    g_max = np.maximum(g_s, g_f)
    with np.errstate(divide="ignore", invalid="ignore"):
        g_rel = np.where(g_max > 0.0, np.minimum(g_s, g_f) / np.where(g_max > 0.0, g_max, 1.0), 0.0)
    a_rel = 1.0 - np.abs(source.orientation - fused.orientation) / (np.pi / 2.0)
    q_g = QABF_GAMMA_G / (1.0 + np.exp(QABF_KAPPA_G * (g_rel - QABF_DELTA_G)))
    q_a = QABF_GAMMA_A / (1.0 + np.exp(QABF_KAPPA_A * (a_rel - QABF_DELTA_A)))
    q_g_perfect = QABF_GAMMA_G / (1.0 + np.exp(QABF_KAPPA_G * (1.0 - QABF_DELTA_G)))
    q_a_perfect = QABF_GAMMA_A / (1.0 + np.exp(QABF_KAPPA_A * (1.0 - QABF_DELTA_A)))
    return (q_g / q_g_perfect) * (q_a / q_a_perfect)


def qabf(vis: np.ndarray, ir: np.ndarray, fused: np.ndarray) -> MetricValue:
    """Gradient-based edge-preservation score.

    Qabf = sum(w_A Q_A + w_B Q_B) / sum(w_A + w_B), where Q_A and Q_B are
    the per-pixel edge-preservation maps of each source against the fused
    image and the weights are the source edge strengths (power 1). Both
    image dimensions must be >= 3 for Sobel support. Returns 0 when
    neither source carries any edges.
    """
    vis = require_gray(vis, "vis")
    ir = require_gray(ir, "ir")
    fused = require_gray(fused, "fused")
    require_same_shape(vis, fused)
    require_same_shape(ir, fused)
    if min(fused.shape) < 3:
        raise ImageTooSmall(f"Qabf needs both dimensions >= 3, got {fused.shape}")
    e_vis = edge_map(vis)
    e_ir = edge_map(ir)
    e_fused = edge_map(fused)
    q_vis = _edge_preservation(e_vis, e_fused)
    q_ir = _edge_preservation(e_ir, e_fused)
    w_vis = e_vis.strength ** QABF_STRENGTH_POWER
    w_ir = e_ir.strength ** QABF_STRENGTH_POWER
    total_weight = float(np.sum(w_vis + w_ir))
    if total_weight == 0.0:
        return MetricValue(QABF, 0.0, (0.0, 0.0))
    value = float(np.sum(w_vis * q_vis + w_ir * q_ir) / total_weight)
    comp_vis = float(np.sum(w_vis * q_vis) / total_weight)
    comp_ir = float(np.sum(w_ir * q_ir) / total_weight)
    return MetricValue(QABF, value, (comp_vis, comp_ir))


def _ssim_mean(a: np.ndarray, f: np.ndarray, params: SsimParams) -> float:
    """Mean structural similarity over all valid sliding windows."""
    w = params.window
    a = a.astype(np.float64)
    f = f.astype(np.float64)
    mu_a = convolve2d(a, w, mode="valid")
    mu_f = convolve2d(f, w, mode="valid")
    var_a = convolve2d(a * a, w, mode="valid") - mu_a ** 2
    var_f = convolve2d(f * f, w, mode="valid") - mu_f ** 2
    cov = convolve2d(a * f, w, mode="valid") - mu_a * mu_f
    num = (2.0 * mu_a * mu_f + params.c1) * (2.0 * cov + params.c2)
    den = (mu_a ** 2 + mu_f ** 2 + params.c1) * (var_a + var_f + params.c2)
    return float(np.mean(num / den))


def ssim_fusion(
    vis: np.ndarray,
    ir: np.ndarray,
    fused: np.ndarray,
    params: SsimParams | None = None,
) -> MetricValue:
    """Structural similarity against both sources, SUM convention.

    value = SSIM(vis, fused) + SSIM(ir, fused). Each component is the
    mean over valid 11x11 windows and never exceeds 1, so the total lies
    in [-2, 2] and legitimately exceeds 1 for good fusions. Dimensions
    must be at least the window size.
    """
    params = params or SsimParams()
    vis = require_gray(vis, "vis")
    ir = require_gray(ir, "ir")
    fused = require_gray(fused, "fused")
    require_same_shape(vis, fused)
    require_same_shape(ir, fused)
    win = params.window.shape[0]
    if min(fused.shape) < win:
        raise ImageTooSmall(f"SSIM needs both dimensions >= {win}, got {fused.shape}")
    s_vis = _ssim_mean(vis, fused, params)
    s_ir = _ssim_mean(ir, fused, params)
    return MetricValue(SSIM, s_vis + s_ir, (s_vis, s_ir))


def evaluate_all(pair, fused: np.ndarray, psnr_aggregation: str = "mean_of_psnrs") -> list[MetricValue]:
    """Compute all six metrics for one (pair, fused image) triple.

    The visible frame and the fused image are reduced to grayscale first;
    results come back in METRIC_NAMES order.
    """
    vis = to_grayscale(pair.visible)
    ir = require_gray(pair.infrared)
    f = to_grayscale(np.asarray(fused))
    require_same_shape(vis, f)
    require_same_shape(ir, f)
    return [
        entropy(f),
        std_dev(f),
        mutual_information(vis, ir, f),
        psnr(vis, ir, f, aggregation=psnr_aggregation),
        qabf(vis, ir, f),
        ssim_fusion(vis, ir, f),
    ]


def conventions(psnr_aggregation: str = "mean_of_psnrs") -> dict:
    """Metric conventions echoed into results-file headers for audit."""
    return {
        "gray_levels": GRAY_LEVELS,
        "luma_weights": "BT.601 (0.299, 0.587, 0.114)",
        "log_base": 2,
        "mi_aggregation": "sum_over_sources",
        "ssim_aggregation": "sum_over_sources",
        "ssim_window": "11x11 gaussian sigma=1.5, C1=(0.01*255)^2, C2=(0.03*255)^2",
        "psnr_max": PSNR_MAX,
        "psnr_aggregation": psnr_aggregation,
        "psnr_zero_mse_cap_db": PSNR_ZERO_MSE_CAP_DB,
        "std_normalization": "population",
        "qabf_sigmoids": {
            "gamma_g": QABF_GAMMA_G,
            "kappa_g": QABF_KAPPA_G,
            "delta_g": QABF_DELTA_G,
            "gamma_a": QABF_GAMMA_A,
            "kappa_a": QABF_KAPPA_A,
            "delta_a": QABF_DELTA_A,
            "strength_power": QABF_STRENGTH_POWER,
            "normalized_to_unit_peak": True,
            "boundary": "symmetric",
        },
    }
