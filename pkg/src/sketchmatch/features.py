"""Component measurements, the 8-ratio feature vector and mean-centering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config
from .errors import GeometryError, MeasureError, StateError
from .extractors import NORMALIZE_OFFSET, ComponentSet, lip_edge_map
from .filters import canny, median_filter
from .geometry import GeometricModel
from .raster import binarize, saturating_add

FEATURE_NAMES = (
    "face_area",        # face pixels / (W L)
    "eye_length",       # right / left
    "eye_width",        # right / left
    "brow_length",      # right / left
    "nose_length",      # nose rows / L
    "lip_aspect",       # lip length / lip width
    "lip_area",         # lip pixels / (n1 m1)
    "lip_nostril",      # upper-lip row - nostril row, over L
)
DIM = len(FEATURE_NAMES)


def horizontal_extent(b: np.ndarray) -> int:
    """Columns spanned by foreground: last - first + 1."""
    cols = np.flatnonzero(b.any(axis=0))
    if cols.size == 0:
        raise MeasureError("extent", "no foreground pixels")
    return int(cols[-1] - cols[0] + 1)


def vertical_extent(b: np.ndarray) -> int:
    rows = np.flatnonzero(b.any(axis=1))
    if rows.size == 0:
        raise MeasureError("extent", "no foreground pixels")
    return int(rows[-1] - rows[0] + 1)


def measure_eye(sub: np.ndarray, name: str = "eye") -> tuple[int, int]:
    """(length, width) of the dark blob in an eye crop."""
    dark = binarize(sub)
    if not dark.any():
        raise MeasureError(name, "no dark pixels in eye region")
    return horizontal_extent(dark), vertical_extent(dark)


def brow_edge_map(sub: np.ndarray, modality: str, config: Config = Config()) -> np.ndarray:
    img = median_filter(sub, config.median_window)
    if modality == "photo":
        img = saturating_add(img, NORMALIZE_OFFSET)
    return canny(img, config.canny)


def measure_brow(sub: np.ndarray, modality: str, config: Config = Config(), name: str = "brow") -> int:
    """Horizontal extent of the eyebrow's edge map.

    Photos are lifted by 64 grey levels before edge detection, sketches are not.
    """
    edges = brow_edge_map(sub, modality, config)
    if not edges.any():
        raise MeasureError(name, "no edges in eyebrow region")
    return horizontal_extent(edges)


def measure_lip(sub: np.ndarray, config: Config = Config()) -> tuple[int, int, int]:
    """(length, width, area) of the lips.

    Length and width come from the edge map's bounding box; area counts dark
    pixels of the binarized crop inside that box.
    """
    edges = lip_edge_map(sub, config)
    if not edges.any():
        raise MeasureError("lips", "no edges in lip region")
    rows = np.flatnonzero(edges.any(axis=1))
    cols = np.flatnonzero(edges.any(axis=0))
    box = (slice(rows[0], rows[-1] + 1), slice(cols[0], cols[-1] + 1))
    area = int(binarize(sub)[box].sum())
    return horizontal_extent(edges), vertical_extent(edges), area


def measure_nose(nose_actual: np.ndarray) -> int:
    return int(nose_actual.shape[0])


def lip_nostril_distance(cs: ComponentSet) -> int:
    dist = cs.u_lip_abs_row - cs.nostril_abs_row
    if dist < 0:
        raise GeometryError(
            f"upper lip (row {cs.u_lip_abs_row}) lies above the nostrils (row {cs.nostril_abs_row})")
    return dist


@dataclass(frozen=True)
class Measurements:
    face_area: int
    eye_len_r: int
    eye_len_l: int
    eye_wid_r: int
    eye_wid_l: int
    brow_len_r: int
    brow_len_l: int
    nose_len: int
    lip_len: int
    lip_wid: int
    lip_area: int
    lip_nostril_dist: int


def measure(cs: ComponentSet, modality: str, config: Config = Config()) -> Measurements:
    eye_len_r, eye_wid_r = measure_eye(cs.right_eye.image, "right_eye")
    eye_len_l, eye_wid_l = measure_eye(cs.left_eye.image, "left_eye")
    lip_len, lip_wid, lip_area = measure_lip(cs.lips.image, config)
    return Measurements(
        face_area=cs.face.area,
        eye_len_r=eye_len_r, eye_len_l=eye_len_l,
        eye_wid_r=eye_wid_r, eye_wid_l=eye_wid_l,
        brow_len_r=measure_brow(cs.right_brow.image, modality, config, "right_brow"),
        brow_len_l=measure_brow(cs.left_brow.image, modality, config, "left_brow"),
        nose_len=measure_nose(cs.nose_actual.image),
        lip_len=lip_len, lip_wid=lip_wid, lip_area=lip_area,
        lip_nostril_dist=lip_nostril_distance(cs),
    )


def assemble_vector(meas: Measurements, model: GeometricModel = GeometricModel()) -> np.ndarray:
    pairs = (
        ("face_area", meas.face_area, model.W * model.L),
        ("eye_length", meas.eye_len_r, meas.eye_len_l),
        ("eye_width", meas.eye_wid_r, meas.eye_wid_l),
        ("brow_length", meas.brow_len_r, meas.brow_len_l),
        ("nose_length", meas.nose_len, model.L),
        ("lip_aspect", meas.lip_len, meas.lip_wid),
        ("lip_area", meas.lip_area, model.n1 * model.m1),
        ("lip_nostril", meas.lip_nostril_dist, model.L),
    )
    out = np.empty(DIM)
    for i, (name, num, den) in enumerate(pairs):
        if den == 0:
            raise MeasureError(name, "zero denominator")
        out[i] = num / den
    return out


def feature_vector(cs: ComponentSet, modality: str, config: Config = Config()) -> np.ndarray:
    return assemble_vector(measure(cs, modality, config), config.model)


# -- centering ---------------------------------------------------------------
#
# Centered vectors are mean minus vector.  The sign is immaterial for
# Euclidean retrieval as long as gallery and probe use the same one.

def center(vectors, mode: str = "per-vector", mean=None) -> np.ndarray:
    """Center one vector (1-D) or a stack of vectors (2-D, one per row).

    ``per-vector`` subtracts each vector from the scalar mean of its own
    components.  ``grand-mean`` subtracts each vector from ``mean``, the
    componentwise mean of the gallery; it must be supplied.
    """
    v = np.asarray(vectors, dtype=np.float64)
    if v.size == 0:
        raise StateError("nothing to center")
    if mode == "per-vector":
        return v.mean(axis=-1, keepdims=True) - v
    if mode == "grand-mean":
        if mean is None:
            raise StateError("grand-mean centering needs the gallery mean")
        return np.asarray(mean, dtype=np.float64) - v
    raise ValueError(f"unknown centering mode {mode!r}")


def center_gallery(vectors, mode: str = "per-vector"):
    """Center a gallery stack; returns ``(centered, grand_mean or None)``."""
    v = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if v.shape[0] == 0:
        raise StateError("empty gallery")
    grand = v.mean(axis=0) if mode == "grand-mean" else None
    return center(v, mode, grand), grand
