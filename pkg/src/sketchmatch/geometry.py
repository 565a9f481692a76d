"""Fixed geometric face model and the region predictions derived from it.

Every prediction is anchored on one of two rows found in the face region:
the eye-ball row (darkest row of the upper face) and the row between the
lips.  Rectangles are computed from the model constants first and clamped
to the image afterwards; clamping truncates, it never translates.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import GeometryError, ParameterError
from .morphology import FaceRegion
from .raster import Rect

LIP_BAND = (0.35, 0.60)
MIN_ROW_WIDTH = 0.5


@dataclass(frozen=True)
class GeometricModel:
    """Constants of the 150 x 200 face model, in pixels.

    ``x`` and ``f`` are part of the published constant set but no region
    formula uses them.  ``brow_rows``, ``brow_cols`` and ``nose_rows`` are
    not published and carry our defaults.
    """

    W: int = 150
    L: int = 200
    n: int = 17
    m: int = 33
    n1: int = 25
    m1: int = 52
    a: int = 30
    b: int = 12
    c: int = 8
    d: int = 50
    e: int = 7
    g: int = 7
    y: int = 22
    x: int = 10
    f: int = 17
    brow_rows: int = 12
    brow_cols: int = 46
    nose_rows: int = 55
    symmetric_brows: bool = True

    def __post_init__(self):
        for name, value in asdict(self).items():
            if name != "symmetric_brows" and value <= 0:
                raise ParameterError(f"geometric constant {name} must be positive, got {value}")
        if self.symmetric_brows:
            expected = (self.half_width - self.g) - (1 + self.y) + 1
            if self.brow_cols != expected:
                raise ParameterError(
                    f"brow_cols={self.brow_cols} breaks eyebrow symmetry (expected {expected})")

    @property
    def half_width(self) -> int:
        return self.W // 2

    @property
    def initial_column(self) -> int:
        return 1


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _bounded(rect: Rect, model: GeometricModel, name: str) -> Rect:
    clamped = rect.clamp(model.L, model.W)
    if clamped.is_empty():
        raise GeometryError(f"{name} region {rect} lies outside the {model.L}x{model.W} face")
    return clamped


def row_profile(fr: FaceRegion, normalize: bool = True, min_width: float = MIN_ROW_WIDTH) -> np.ndarray:
    """Per-row intensity sums over face pixels; NaN marks rows that are skipped.

    With ``normalize`` each sum is divided by that row's face-pixel count, and
    rows narrower than ``min_width`` times the widest face row are skipped:
    at the crown and chin a few contour pixels would otherwise dominate.
    """
    counts = fr.mask.sum(axis=1)
    sums = np.where(fr.mask, fr.image, 0).sum(axis=1, dtype=np.float64)
    if not normalize:
        return np.where(counts > 0, sums, np.nan)
    valid = (counts > 0) & (counts >= min_width * counts.max())
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(valid, sums / counts, np.nan)


def _argmin_rows(profile: np.ndarray, first: int, last: int) -> int | None:
    """Smallest-index argmin of ``profile`` over 1-based rows ``first..last``."""
    seg = profile[first - 1:last]
    if seg.size == 0 or np.all(np.isnan(seg)):
        return None
    return first + int(np.nanargmin(seg))


@dataclass(frozen=True)
class FaceRows:
    eye_ball_row: int
    mid_lip_row: int
    normalized: bool = True


def eye_ball_row(fr: FaceRegion, normalize: bool = True) -> int:
    """Darkest row in the upper half of the face's bounding box."""
    rows = np.flatnonzero(fr.mask.any(axis=1))
    if rows.size == 0:
        raise GeometryError("face region has no rows")
    top, bottom = int(rows[0]) + 1, int(rows[-1]) + 1
    last = top + (bottom - top) // 2
    row = _argmin_rows(row_profile(fr, normalize), top, last)
    if row is None:
        raise GeometryError("face region has no rows")
    return row


def lip_search_band(ebr: int, model: GeometricModel) -> tuple[int, int]:
    lo, hi = LIP_BAND
    first = max(1, ebr + _round_half_up(lo * model.L))
    last = min(model.L, ebr + _round_half_up(hi * model.L))
    return first, last


def mid_lip_row(fr: FaceRegion, model: GeometricModel, ebr: int, normalize: bool = True) -> int:
    first, last = lip_search_band(ebr, model)
    if first > last:
        raise GeometryError(f"lip search band is empty below eye-ball row {ebr}")
    row = _argmin_rows(row_profile(fr, normalize), first, last)
    if row is None:
        raise GeometryError(f"no face pixels in lip search band {first}..{last}")
    return row


def find_face_rows(fr: FaceRegion, model: GeometricModel, normalize: bool = True) -> FaceRows:
    ebr = eye_ball_row(fr, normalize)
    return FaceRows(ebr, mid_lip_row(fr, model, ebr, normalize), normalize)


# -- region predictions ---------------------------------------------------------

def predict_right_eye(ebr: int, model: GeometricModel) -> Rect:
    x1 = ebr - model.c
    y1 = model.a + 1
    return _bounded(Rect(x1, y1, x1 + model.n - 1, y1 + model.m - 1), model, "right eye")


def predict_left_eye(ebr: int, model: GeometricModel) -> Rect:
    x1 = ebr - model.c
    y1 = model.half_width + model.b
    return _bounded(Rect(x1, y1, x1 + model.n - 1, y1 + model.m - 1), model, "left eye")


def predict_right_eyebrow(ebr: int, model: GeometricModel) -> Rect:
    x1 = ebr - 3 * model.c
    y1 = model.initial_column + model.y
    rect = Rect(x1, y1, x1 + model.brow_rows - 1, model.half_width - model.g)
    return _bounded(rect, model, "right eyebrow")


def predict_left_eyebrow(ebr: int, model: GeometricModel) -> Rect:
    x1 = ebr - 3 * model.c
    y1 = model.half_width + model.g
    rect = Rect(x1, y1, x1 + model.brow_rows - 1, y1 + model.brow_cols - 1)
    return _bounded(rect, model, "left eyebrow")


def predict_lips(mlr: int, model: GeometricModel) -> Rect:
    x1 = mlr - model.e
    y1 = model.d + 1
    return _bounded(Rect(x1, y1, x1 + model.n1 - 1, y1 + model.m1 - 1), model, "lips")


def predict_nose(right_eye: Rect, lips: Rect, model: GeometricModel) -> Rect:
    """Nose spans from the right eye's inner corner to 10 columns short of the lips' right edge."""
    x1, y1 = right_eye.x1, right_eye.y2
    y2 = lips.y2 - 10
    if y2 < y1:
        raise GeometryError(f"nose width is negative (columns {y1}..{y2})")
    return _bounded(Rect(x1, y1, x1 + model.nose_rows - 1, y2), model, "nose")
