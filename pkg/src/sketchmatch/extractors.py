"""Full per-face component extraction.

:func:`extract_all` chains face-region extraction, anchor-row discovery, the
region predictions, cropping, the nostril search that trims the nose, and
the lip edge pass that locates the upper lip.  Any failure aborts the whole
face with an :class:`~sketchmatch.errors.ExtractionError` naming the stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry
from .config import Config
from .errors import ExtractionError, MeasureError, ParameterError, SketchMatchError
from .filters import canny, median_filter
from .morphology import FaceRegion, extract_face_region
from .raster import Rect, crop, saturating_add

NORMALIZE_OFFSET = 64

COMPONENTS = ("right_eye", "left_eye", "right_brow", "left_brow", "lips", "nose_predicted", "nose_actual")


@dataclass(frozen=True)
class Component:
    rect: Rect
    image: np.ndarray


@dataclass(frozen=True)
class ComponentSet:
    face: FaceRegion
    right_eye: Component
    left_eye: Component
    right_brow: Component
    left_brow: Component
    lips: Component
    nose_predicted: Component
    nose_actual: Component
    rows: geometry.FaceRows
    nostril_row: int
    u_lip_row: int
    lip_edges: np.ndarray

    def components(self) -> dict[str, Component]:
        return {name: getattr(self, name) for name in COMPONENTS}

    @property
    def nostril_abs_row(self) -> int:
        return self.nose_predicted.rect.x1 + self.nostril_row - 1

    @property
    def u_lip_abs_row(self) -> int:
        return self.lips.rect.x1 + self.u_lip_row - 1


def find_nostril_row(nose_sub: np.ndarray) -> int:
    """Darkest row of the lower half of the predicted nose; ties go deeper."""
    rows = nose_sub.shape[0]
    if rows < 4:
        raise ParameterError(f"nose sub-image needs >= 4 rows, got {rows}")
    start = rows // 2  # 0-based first row of the lower half
    sums = nose_sub[start:].sum(axis=1, dtype=np.int64)
    # last occurrence of the minimum
    return start + (len(sums) - int(np.argmin(sums[::-1])))


def refine_nose(predicted: Component, nostril_row: int) -> Component:
    """Keep rows ``1 .. nostril_row + 2`` of the predicted nose, all columns."""
    height = min(nostril_row + 2, predicted.rect.rows)
    r = predicted.rect
    rect = Rect(r.x1, r.y1, r.x1 + height - 1, r.y2)
    return Component(rect, predicted.image[:height].copy())


def lip_edge_map(lip_sub: np.ndarray, config: Config = Config()) -> np.ndarray:
    """Median filter, lift by 64, Canny; the same for photos and sketches."""
    smoothed = median_filter(lip_sub, config.median_window)
    return canny(saturating_add(smoothed, NORMALIZE_OFFSET), config.canny)


def find_upper_lip_row(lip_edges: np.ndarray) -> int:
    rows = np.flatnonzero(lip_edges.any(axis=1))
    if rows.size == 0:
        raise MeasureError("lips", "no edge pixels in lip region")
    return int(rows[0]) + 1


def _component(img, rect):
    return Component(rect, crop(img, rect))


def extract_all(img: np.ndarray, config: Config = Config(), modality: str = "photo") -> ComponentSet:
    """Run every extraction step on a normalised 200 x 150 face.

    ``modality`` is accepted for symmetry with the measurement functions but
    does not change any geometry.
    """
    model = config.model
    if img.shape != (model.L, model.W):
        raise ParameterError(f"expected a {model.L}x{model.W} image, got {img.shape[0]}x{img.shape[1]}")
    stage = "face_region"
    try:
        face = extract_face_region(img, config.threshold)
        stage = "eye_ball_row"
        ebr = geometry.eye_ball_row(face, config.eye_row_normalize)
        stage = "right_eye"
        r_eye = _component(img, geometry.predict_right_eye(ebr, model))
        stage = "left_eye"
        l_eye = _component(img, geometry.predict_left_eye(ebr, model))
        stage = "right_brow"
        r_brow = _component(img, geometry.predict_right_eyebrow(ebr, model))
        stage = "left_brow"
        l_brow = _component(img, geometry.predict_left_eyebrow(ebr, model))
        stage = "mid_lip_row"
        mlr = geometry.mid_lip_row(face, model, ebr, config.eye_row_normalize)
        stage = "lips"
        lips = _component(img, geometry.predict_lips(mlr, model))
        stage = "nose"
        nose_pred = _component(img, geometry.predict_nose(r_eye.rect, lips.rect, model))
        nostril = find_nostril_row(nose_pred.image)
        nose_act = refine_nose(nose_pred, nostril)
        stage = "lips"
        edges = lip_edge_map(lips.image, config)
        u_lip = find_upper_lip_row(edges)
    except SketchMatchError as exc:
        raise ExtractionError(stage, exc) from exc
    return ComponentSet(
        face=face, right_eye=r_eye, left_eye=l_eye, right_brow=r_brow, left_brow=l_brow,
        lips=lips, nose_predicted=nose_pred, nose_actual=nose_act,
        rows=geometry.FaceRows(ebr, mlr, config.eye_row_normalize),
        nostril_row=nostril, u_lip_row=u_lip, lip_edges=edges,
    )

