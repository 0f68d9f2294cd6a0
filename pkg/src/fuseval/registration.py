"""Coarse cross-modal alignment with a supplied homography.

Calibration of the dual camera rig yields a single 3x3 projective
transform per dataset (or per pair). The harness applies it by backward
warping with bilinear interpolation; it never estimates homographies
itself. The default direction, used by the CLI, warps the infrared frame
into the visible frame.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import EmptyOverlap, MissingFile, SchemaViolation, SingularHomography

_DET_TOL = 1e-12


@dataclass(frozen=True)
class Homography:
    """3x3 projective transform, normalized so h[2, 2] == 1."""

    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.float64)
        if h.shape != (3, 3):
            raise SchemaViolation(f"homography must be 3x3, got {h.shape}")
        if h[2, 2] == 0.0 or not np.isfinite(h).all():
            raise SingularHomography("homography cannot be normalized (h[2,2] is 0 or non-finite)")
        h = h / h[2, 2]
        scale = float(np.abs(h).max())
        if abs(np.linalg.det(h)) <= _DET_TOL * scale ** 3:
            raise SingularHomography("homography is singular (determinant ~ 0)")
        object.__setattr__(self, "h", h)

    @classmethod
    def identity(cls) -> "Homography":
        return cls(np.eye(3))

    @classmethod
    def translation(cls, tx: float, ty: float) -> "Homography":
        m = np.eye(3)
        m[0, 2] = tx
        m[1, 2] = ty
        return cls(m)

    def compose(self, first: "Homography") -> "Homography":
        """Transform equal to applying ``first`` and then this one."""
        return Homography(self.h @ first.h)

    def inverse(self) -> "Homography":
        return Homography(np.linalg.inv(self.h))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map (N, 2) points through the transform."""
        pts = np.asarray(points, dtype=np.float64)
        ones = np.ones((pts.shape[0], 1))
        q = np.hstack([pts, ones]) @ self.h.T
        return q[:, :2] / q[:, 2:3]


def load_homography(path: str | os.PathLike) -> Homography:
    """Read a calibration file: 9 whitespace-separated numbers, row-major."""
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFile(f"no such calibration file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) != 9:
        raise SchemaViolation(f"{path}: expected 9 numbers, found {len(tokens)}")
    try:
        values = [float(t) for t in tokens]
    except ValueError as exc:
        raise SchemaViolation(f"{path}: non-numeric calibration entry ({exc})") from exc
    return Homography(np.array(values).reshape(3, 3))


def warp(img: np.ndarray, h: Homography, out_size: tuple[int, int]) -> np.ndarray:
    """Warp an image by ``h`` into an (width, height) output frame.

    Backward mapping: output pixel (x, y) samples the source at
    h^-1 (x, y, 1) with bilinear interpolation; samples outside the
    source raster are filled with 0. The identity homography reproduces
    the input bit-exactly.
    """
    img = np.asarray(img)
    out_w, out_h = out_size
    if out_w <= 0 or out_h <= 0:
        raise SchemaViolation(f"output size must be positive, got {out_size}")
    src_h, src_w = img.shape[:2]
    inv = h.inverse().h

    xs, ys = np.meshgrid(np.arange(out_w, dtype=np.float64),
                         np.arange(out_h, dtype=np.float64))
    px = inv[0, 0] * xs + inv[0, 1] * ys + inv[0, 2]
    py = inv[1, 0] * xs + inv[1, 1] * ys + inv[1, 2]
    pz = inv[2, 0] * xs + inv[2, 1] * ys + inv[2, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        sx = px / pz
        sy = py / pz
    valid = (
        np.isfinite(sx) & np.isfinite(sy)
        & (sx >= 0.0) & (sx <= src_w - 1.0)
        & (sy >= 0.0) & (sy <= src_h - 1.0)
    )
    sx = np.where(valid, sx, 0.0)
    sy = np.where(valid, sy, 0.0)

    x0 = np.floor(sx).astype(np.intp)
    y0 = np.floor(sy).astype(np.intp)
    dx = sx - x0
    dy = sy - y0
    x1 = np.minimum(x0 + 1, src_w - 1)
    y1 = np.minimum(y0 + 1, src_h - 1)

    w00 = (1.0 - dx) * (1.0 - dy)
    w10 = dx * (1.0 - dy)
    w01 = (1.0 - dx) * dy
    w11 = dx * dy
    if img.ndim == 3:
        w00, w10, w01, w11 = (w[..., None] for w in (w00, w10, w01, w11))
        mask = valid[..., None]
    else:
        mask = valid

    data = img.astype(np.float64)
    out = (w00 * data[y0, x0] + w10 * data[y0, x1]
           + w01 * data[y1, x0] + w11 * data[y1, x1])
    out = np.where(mask, out, 0.0)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


class CropRect(NamedTuple):
    """Axis-aligned crop window; x1/y1 are exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0


def overlap_crop(
    a: np.ndarray, b: np.ndarray, h: Homography
) -> tuple[np.ndarray, np.ndarray, CropRect]:
    """Warp ``b`` into ``a``'s frame and crop both to the covered region.

    The crop is the axis-aligned rectangle (inside ``a``'s bounds) on
    which the warped ``b`` has full bilinear coverage, found by
    projecting the corners of ``b``'s pixel grid through ``h`` and taking
    the conservative inner bounds. Raises EmptyOverlap when no such
    rectangle exists.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    a_h, a_w = a.shape[:2]
    b_h, b_w = b.shape[:2]
    warped = warp(b, h, (a_w, a_h))

    corners = np.array([
        [0.0, 0.0],                  # top-left
        [b_w - 1.0, 0.0],            # top-right
        [b_w - 1.0, b_h - 1.0],      # bottom-right
        [0.0, b_h - 1.0],            # bottom-left
    ])
    tl, tr, br, bl = h.apply(corners)

    x_lo = max(tl[0], bl[0], 0.0)
    x_hi = min(tr[0], br[0], a_w - 1.0)
    y_lo = max(tl[1], tr[1], 0.0)
    y_hi = min(bl[1], br[1], a_h - 1.0)

    # 1e-9 slack absorbs projection round-off at integer boundaries
    x0 = math.ceil(x_lo - 1e-9)
    y0 = math.ceil(y_lo - 1e-9)
    x1 = math.floor(x_hi + 1e-9)
    y1 = math.floor(y_hi + 1e-9)
    if x0 > x1 or y0 > y1:
        raise EmptyOverlap(
            f"warped image does not cover any axis-aligned region of the "
            f"{a_w}x{a_h} target frame"
        )
    rect = CropRect(x0, y0, x1 + 1, y1 + 1)
    return (
        a[rect.y0:rect.y1, rect.x0:rect.x1],
        warped[rect.y0:rect.y1, rect.x0:rect.x1],
        rect,
    )
