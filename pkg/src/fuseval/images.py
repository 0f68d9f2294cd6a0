"""Image loading, grayscale conversion, and gray-level histograms.

Images are plain numpy arrays throughout the library:

* gray image  -- 2-D ``uint8`` array, shape ``(height, width)``
* color image -- 3-D ``uint8`` array, shape ``(height, width, 3)``, RGB

All quality metrics operate on 8-bit gray levels, so ``GRAY_LEVELS`` is
fixed at 256.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CorruptData, DimensionMismatch, MissingFile, UnsupportedFormat

GRAY_LEVELS = 256

# BT.601 luma weights, the dominant convention in fusion-metric code.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_SUPPORTED_FORMATS = {"PNG", "JPEG"}


def require_gray(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate the gray-image convention: 2-D, non-empty, values in [0, 255]."""
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"{name} must be 2-D (height, width), got shape {img.shape}")
    if img.size == 0:
        raise ValueError(f"{name} has zero pixels")
    if img.dtype != np.uint8:
        if not np.issubdtype(img.dtype, np.number):
            raise TypeError(f"{name} must be numeric, got dtype {img.dtype}")
        if img.min() < 0 or img.max() > 255:
            raise ValueError(f"{name} values must lie in [0, 255]")
    return img


def require_color(img: np.ndarray, name: str = "image") -> np.ndarray:
    """Validate the color-image convention: (H, W, 3) uint8."""
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"{name} must have shape (height, width, 3), got {img.shape}")
    if img.size == 0:
        raise ValueError(f"{name} has zero pixels")
    if img.dtype != np.uint8:
        raise TypeError(f"{name} must be uint8, got dtype {img.dtype}")
    return img


def require_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[:2] != b.shape[:2]:
        raise DimensionMismatch(f"image dimensions differ: {a.shape[:2]} vs {b.shape[:2]}")


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Decode a PNG or JPEG file into a gray or color array.

    Single-channel files come back 2-D; everything else is converted to
    RGB. Only 8-bit inputs are accepted.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFile(f"no such image file: {path}")
    try:
        with Image.open(path) as im:
            fmt = im.format
            if fmt not in _SUPPORTED_FORMATS:
                raise UnsupportedFormat(f"{path}: format {fmt!r} not supported (PNG/JPEG only)")
            if im.mode in ("I", "I;16", "I;16B", "F"):
                raise UnsupportedFormat(f"{path}: mode {im.mode!r} is not 8-bit")
            if im.mode in ("L", "1"):
                arr = np.asarray(im.convert("L"), dtype=np.uint8)
            else:
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat(f"{path}: not a recognizable image ({exc})") from exc
    except (OSError, SyntaxError, ValueError) as exc:
        raise CorruptData(f"{path}: failed to decode ({exc})") from exc
    if arr.size == 0:
        raise CorruptData(f"{path}: decoded to an empty raster")
    return arr


def save_image(img: np.ndarray, path: str | os.PathLike) -> None:
    """Write a gray or color array as PNG/JPEG (chosen by extension)."""
    img = np.asarray(img)
    if img.ndim == 2:
        pil = Image.fromarray(img.astype(np.uint8), mode="L")
    else:
        pil = Image.fromarray(require_color(img), mode="RGB")
    os.makedirs(os.path.dirname(os.fspath(path)) or ".", exist_ok=True)
    pil.save(path)


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """Convert an RGB image to 8-bit luma.

    Y = round(0.299 R + 0.587 G + 0.114 B), clamped to [0, 255]. Gray
    inputs pass through unchanged, so the conversion is idempotent.
    """
    img = np.asarray(img)
    if img.ndim == 2:
        return require_gray(img).astype(np.uint8, copy=False)
    require_color(img)
    y = img.astype(np.float64) @ np.asarray(LUMA_WEIGHTS, dtype=np.float64)
    return np.clip(np.rint(y), 0, 255).astype(np.uint8)


def histogram(img: np.ndarray) -> np.ndarray:
    """Gray-level probability distribution of an 8-bit image.

    Returns a length-256 float64 vector; bin ``i`` is the fraction of
    pixels with value ``i``. Bins sum to 1 for any non-empty image.
    """
    img = require_gray(img)
    if img.dtype != np.uint8:
        raise TypeError("histogram requires an 8-bit (uint8) image")
    counts = np.bincount(img.ravel(), minlength=GRAY_LEVELS)
    return counts / img.size


def joint_histogram(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Joint gray-level probability of two equally sized 8-bit images.

    Returns a 256x256 float64 matrix; cell ``(i, j)`` is the fraction of
    pixel positions where ``a == i`` and ``b == j``. Row sums reproduce
    ``histogram(a)`` and column sums ``histogram(b)``.
    """
    a = require_gray(a, "a")
    b = require_gray(b, "b")
    if a.dtype != np.uint8 or b.dtype != np.uint8:
        raise TypeError("joint_histogram requires 8-bit (uint8) images")
    require_same_shape(a, b)
    counts = joint_counts(a, b)
    return counts / a.size


def joint_counts(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer 256x256 co-occurrence counts of two uint8 images."""
    idx = a.ravel().astype(np.int64) * GRAY_LEVELS + b.ravel()
    return np.bincount(idx, minlength=GRAY_LEVELS * GRAY_LEVELS).reshape(
        GRAY_LEVELS, GRAY_LEVELS
    )
