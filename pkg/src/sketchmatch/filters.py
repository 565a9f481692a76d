"""Median filtering and Canny edge detection.

All neighbourhood operations clamp coordinates to the image edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ParameterError
from .raster import as_gray


@dataclass(frozen=True)
class CannyParams:
    gaussian_sigma: float = 1.4
    low_ratio: float = 0.1
    high_ratio: float = 0.3

    def __post_init__(self):
        if not self.gaussian_sigma > 0:
            raise ParameterError(f"gaussian_sigma must be > 0, got {self.gaussian_sigma}")
        if not 0 < self.low_ratio < self.high_ratio <= 1:
            raise ParameterError(
                f"need 0 < low_ratio < high_ratio <= 1, got {self.low_ratio}, {self.high_ratio}")

    @property
    def half_width(self) -> int:
        return math.ceil(3 * self.gaussian_sigma)


def median_filter(img: np.ndarray, window: int = 3) -> np.ndarray:
    if window < 1 or window % 2 == 0:
        raise ParameterError(f"median window must be odd and >= 1, got {window}")
    img = as_gray(img)
    if window == 1:
        return img.copy()
    return ndimage.median_filter(img, size=window, mode="nearest")


def gaussian_kernel(sigma: float) -> np.ndarray:
    half = math.ceil(3 * sigma)
    x = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2 * sigma * sigma))
    return k / k.sum()


def gradients(img: np.ndarray, sigma: float):
    """Gaussian-smoothed Sobel gradients ``(gx, gy)`` along columns and rows."""
    k = gaussian_kernel(sigma)
    f = np.asarray(img, dtype=np.float64)
    f = ndimage.correlate1d(f, k, axis=0, mode="nearest")
    f = ndimage.correlate1d(f, k, axis=1, mode="nearest")
    gx = ndimage.sobel(f, axis=1, mode="nearest")
    gy = ndimage.sobel(f, axis=0, mode="nearest")
    return gx, gy


# neighbour offsets (dr, dc) for the four quantised gradient directions
_DIRECTION_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1))


def non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Zero every pixel that is not a ridge of ``mag`` across the edge.

    The comparison is strict against the neighbour on one side and non-strict
    on the other, so a two-pixel plateau keeps exactly one pixel.
    """
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    sector = (np.floor((angle + 22.5) / 45.0).astype(int)) % 4
    padded = np.pad(mag, 1, mode="edge")
    rows, cols = mag.shape
    keep = np.zeros(mag.shape, dtype=bool)
    for s, (dr, dc) in enumerate(_DIRECTION_OFFSETS):
        fwd = padded[1 + dr:1 + dr + rows, 1 + dc:1 + dc + cols]
        back = padded[1 - dr:1 - dr + rows, 1 - dc:1 - dc + cols]
        keep |= (sector == s) & (mag > back) & (mag >= fwd)
    return np.where(keep, mag, 0.0)


def hysteresis(nms: np.ndarray, low: float, high: float) -> np.ndarray:
    """Keep weak pixels that are 8-connected to at least one strong pixel."""
    weak = nms >= low
    strong = nms >= high
    labels, count = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return np.zeros(nms.shape, dtype=bool)
    keep = np.zeros(count + 1, dtype=bool)
    keep[np.unique(labels[strong])] = True
    keep[0] = False
    return keep[labels]


def canny(img: np.ndarray, params: CannyParams = CannyParams()) -> np.ndarray:
    """Binary edge map; ``True`` marks edge pixels.

    Thresholds are fractions of the maximum gradient magnitude, so a flat
    image has no edges at all.
    """
    img = as_gray(img)
    rows, cols = img.shape
    min_side = max(3, params.half_width + 1)
    if rows < min_side or cols < min_side:
        raise ParameterError(
            f"image {rows}x{cols} too small for sigma {params.gaussian_sigma} (need >= {min_side} per side)")
    # only intensity differences matter; subtracting the minimum in integers
    # makes the result exactly invariant to a constant offset
    gx, gy = gradients(img.astype(np.int16) - int(img.min()), params.gaussian_sigma)
    # rounding removes float noise so ties compare as ties
    mag = np.round(np.hypot(gx, gy), 9)
    peak = mag.max()
    if peak <= 0:
        return np.zeros(img.shape, dtype=bool)
    nms = non_max_suppression(mag, gx, gy)
    edges = hysteresis(nms, params.low_ratio * peak, params.high_ratio * peak)
    return edges & (nms > 0)
