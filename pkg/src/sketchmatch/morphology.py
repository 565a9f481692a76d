"""Binary morphology with disk structuring elements and face-region extraction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import NoFaceError, ParameterError
from .raster import binarize

FACE_SE_RADIUS = 2

_FOUR_CONNECTED = ndimage.generate_binary_structure(2, 1)


def disk_se(radius: int) -> tuple[tuple[int, int], ...]:
    """Offsets ``(dr, dc)`` with ``dr**2 + dc**2 <= radius**2``, in raster order."""
    if radius < 0:
        raise ParameterError(f"radius must be >= 0, got {radius}")
    return tuple((dr, dc)
                 for dr in range(-radius, radius + 1)
                 for dc in range(-radius, radius + 1)
                 if dr * dr + dc * dc <= radius * radius)


def _reach(se) -> int:
    return max(max(abs(dr), abs(dc)) for dr, dc in se)


def _shifted_views(b: np.ndarray, se):
    """Yield, for each offset o, the array whose value at p is ``b[p + o]``.

    Pixels outside ``b`` read as background.
    """
    r = _reach(se)
    rows, cols = b.shape
    padded = np.pad(b.astype(bool), r, constant_values=False)
    for dr, dc in se:
        yield padded[r + dr:r + dr + rows, r + dc:r + dc + cols]


def dilate(b: np.ndarray, se) -> np.ndarray:
    out = np.zeros(b.shape, dtype=bool)
    for view in _shifted_views(b, se):
        out |= view
    return out


def erode(b: np.ndarray, se) -> np.ndarray:
    """A pixel survives only if every offset lands in-bounds on foreground."""
    out = np.ones(b.shape, dtype=bool)
    for view in _shifted_views(b, se):
        out &= view
    return out


def opening(b, se):
    return dilate(erode(b, se), se)


def closing(b, se):
    return erode(dilate(b, se), se)


@dataclass(frozen=True)
class FaceRegion:
    """Face mask plus the gray image with everything outside the face set to 0."""

    mask: np.ndarray
    image: np.ndarray

    @property
    def area(self) -> int:
        return int(self.mask.sum())


def largest_component(mask: np.ndarray) -> np.ndarray:
    """Largest 4-connected foreground component (first in raster order on ties)."""
    labels, count = ndimage.label(mask, structure=_FOUR_CONNECTED)
    if count == 0:
        return np.zeros_like(mask, dtype=bool)
    sizes = np.bincount(labels.ravel())[1:]
    return labels == (int(np.argmax(sizes)) + 1)


def face_mask(img: np.ndarray, threshold: int | None = None) -> np.ndarray:
    """Binarize, close, open, keep the largest component and fill its holes."""
    se = disk_se(FACE_SE_RADIUS)
    b = binarize(img, threshold)
    b = dilate(b, se)
    b = erode(b, se)
    b = erode(b, se)
    b = dilate(b, se)
    return ndimage.binary_fill_holes(largest_component(b))


def extract_face_region(img: np.ndarray, threshold: int | None = None) -> FaceRegion:
    mask = face_mask(img, threshold)
    if not mask.any():
        raise NoFaceError("face region is empty after morphology")
    image = np.where(mask, img, 0).astype(np.uint8)
    return FaceRegion(mask=mask, image=image)
