"""Procedural frontal faces with known component boxes.

Each identity is a :class:`FaceGeometry`.  It can be rendered as a "photo" (flat
skin, mild lighting gradient, Gaussian noise) or as a "sketch" (brighter
blank skin, outlined components, lighter eyebrows, different noise)
of exactly the same geometry, so photo/sketch pairs share their ground
truth boxes.  Coordinates are 1-based (row, column) like everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .raster import FACE_COLS, FACE_ROWS, Rect, save_image

TRUTH_COMPONENTS = ("right_eye", "left_eye", "right_brow", "left_brow", "nose", "lips")

# intensities per modality
_PALETTE = {
    "photo": dict(bg=252, skin=192, eye=40, pupil=15, eye_line=40, brow=140, ridge=150,
                  nostril=60, lip=95, lip_gap=35, face_line=192, noise=4.0),
    "sketch": dict(bg=250, skin=195, eye=55, pupil=15, eye_line=25, brow=165, ridge=190,
                   nostril=80, lip=130, lip_gap=60, face_line=150, noise=3.0),
}


SUPERSAMPLE = 4


@dataclass(frozen=True)
class FaceGeometry:
    """Continuous face geometry; only the three anchor rows are integers."""

    identity: str
    face_row: float
    face_semi_rows: float
    face_semi_cols: float
    eye_row: int
    eye_r_col: float
    eye_l_col: float
    eye_len_r: float
    eye_len_l: float
    eye_wid_r: float
    eye_wid_l: float
    brow_top: float
    brow_thick: float
    brow_arch: float
    brow_len_r: float
    brow_len_l: float
    nostril_row: int
    mid_lip_row: int
    upper_lip: float
    lower_lip: float
    lip_len: float


def random_face(rng: np.random.Generator, identity: str) -> FaceGeometry:
    u = rng.uniform
    eye_row = int(rng.integers(72, 83))
    return FaceGeometry(
        identity=identity,
        face_row=100.0 + u(-1.0, 1.0),
        face_semi_rows=u(93.0, 98.0),
        face_semi_cols=u(68.0, 73.0),
        eye_row=eye_row,
        eye_r_col=u(46.0, 48.0),
        eye_l_col=u(102.0, 104.0),
        eye_len_r=u(20.0, 31.0),
        eye_len_l=u(20.0, 31.0),
        eye_wid_r=u(9.5, 13.0),
        eye_wid_l=u(9.5, 13.0),
        brow_top=eye_row - u(21.0, 22.5),
        brow_thick=u(3.0, 4.5),
        brow_arch=u(2.0, 3.0),
        brow_len_r=u(32.0, 44.0),
        brow_len_l=u(32.0, 44.0),
        nostril_row=eye_row + int(rng.integers(28, 39)),
        mid_lip_row=eye_row + int(rng.integers(72, 81)),
        upper_lip=u(4.0, 6.0),
        lower_lip=u(7.0, 10.5),
        lip_len=u(38.0, 50.5),
    )


def _fine_grid():
    """Sub-pixel sample positions; pixel ``i`` (1-based) covers ``[i - 0.5, i + 0.5)``."""
    off = (np.arange(SUPERSAMPLE) + 0.5) / SUPERSAMPLE - 0.5
    rr = (np.arange(1, FACE_ROWS + 1)[:, None] + off[None, :]).reshape(-1, 1)
    cc = (np.arange(1, FACE_COLS + 1)[:, None] + off[None, :]).reshape(1, -1)
    return rr, cc


def _coverage(inside: np.ndarray) -> np.ndarray:
    """Fraction of each pixel's sub-samples that are inside a shape."""
    return inside.reshape(FACE_ROWS, SUPERSAMPLE, FACE_COLS, SUPERSAMPLE).mean(axis=(1, 3))


def _ellipse(rr, cc, row, col, semi_r, semi_c):
    return ((rr - row) / semi_r) ** 2 + ((cc - col) / semi_c) ** 2 <= 1.0


def _brow(rr, cc, top, thick, arch, center, length):
    half = length / 2
    rel = (cc - center) / half
    row0 = top + arch * rel ** 2
    return (np.abs(rel) <= 1) & (rr >= row0) & (rr < row0 + thick)


def _ring(rr, cc, row, col, semi_r, semi_c, width=1.2):
    return (_ellipse(rr, cc, row, col, semi_r, semi_c)
            & ~_ellipse(rr, cc, row, col, semi_r - width, semi_c - width))


def component_coverage(face: FaceGeometry) -> dict:
    """Anti-aliased coverage map in ``[0, 1]`` for every drawn part."""
    rr, cc = _fine_grid()
    s = face
    shapes = {}
    shapes["face"] = _ellipse(rr, cc, s.face_row, 75.5, s.face_semi_rows, s.face_semi_cols)
    shapes["face_line"] = _ring(rr, cc, s.face_row, 75.5, s.face_semi_rows, s.face_semi_cols)
    for side, col, length, width in (("right", s.eye_r_col, s.eye_len_r, s.eye_wid_r),
                                      ("left", s.eye_l_col, s.eye_len_l, s.eye_wid_l)):
        shapes[f"{side}_eye"] = _ellipse(rr, cc, s.eye_row, col, width / 2, length / 2)
        shapes[f"{side}_eye_line"] = _ring(rr, cc, s.eye_row, col, width / 2, length / 2)
        shapes[f"{side}_pupil"] = _ellipse(rr, cc, s.eye_row, col, 2.5, 2.5)
    shapes["right_brow"] = _brow(rr, cc, s.brow_top, s.brow_thick, s.brow_arch, 46.0, s.brow_len_r)
    shapes["left_brow"] = _brow(rr, cc, s.brow_top, s.brow_thick, s.brow_arch, 104.0, s.brow_len_l)
    shapes["ridge"] = ((rr >= s.eye_row + 4) & (rr <= s.nostril_row - 4)
                       & (cc >= 75.5) & (cc < 77.5))
    shapes["nostrils"] = (_ellipse(rr, cc, s.nostril_row, 71.0, 2.5, 3.5)
                          | _ellipse(rr, cc, s.nostril_row, 82.0, 2.5, 3.5))
    half = s.lip_len / 2
    upper = _ellipse(rr, cc, s.mid_lip_row, 76.5, s.upper_lip, half) & (rr <= s.mid_lip_row)
    lower = _ellipse(rr, cc, s.mid_lip_row, 76.5, s.lower_lip, half - 2) & (rr >= s.mid_lip_row)
    shapes["lips"] = upper | lower
    shapes["lip_gap"] = shapes["lips"] & (np.abs(rr - s.mid_lip_row) < 0.5)
    return {name: _coverage(inside) for name, inside in shapes.items()}


def _bbox(cover) -> Rect:
    mask = cover >= 0.5
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return Rect(int(rows[0]) + 1, int(cols[0]) + 1, int(rows[-1]) + 1, int(cols[-1]) + 1)


def truth_boxes(face: FaceGeometry, coverage: dict | None = None) -> dict[str, Rect]:
    cov = coverage or component_coverage(face)
    return {
        "right_eye": _bbox(cov["right_eye"]),
        "left_eye": _bbox(cov["left_eye"]),
        "right_brow": _bbox(cov["right_brow"]),
        "left_brow": _bbox(cov["left_brow"]),
        "nose": _bbox(np.maximum(cov["ridge"], cov["nostrils"])),
        "lips": _bbox(cov["lips"]),
    }


# paint order; later layers cover earlier ones
_LAYERS = (
    ("face", "skin"), ("face_line", "face_line"),
    ("right_brow", "brow"), ("left_brow", "brow"),
    ("ridge", "ridge"), ("nostrils", "nostril"),
    ("right_eye", "eye"), ("right_eye_line", "eye_line"), ("right_pupil", "pupil"),
    ("left_eye", "eye"), ("left_eye_line", "eye_line"), ("left_pupil", "pupil"),
    ("lips", "lip"), ("lip_gap", "lip_gap"),
)


def render(face: FaceGeometry, modality: str = "photo", seed: int | None = 0,
           coverage: dict | None = None, palette: dict | None = None) -> np.ndarray:
    """Draw ``face`` as a 200 x 150 gray image.

    ``palette`` overrides the modality's intensities (same keys as the built-in ones).
    """
    p = dict(_PALETTE[modality], **(palette or {}))
    cov = coverage or component_coverage(face)
    img = np.full((FACE_ROWS, FACE_COLS), float(p["bg"]))
    for shape, colour in _LAYERS:
        value = float(p[colour])
        if shape == "face" and modality == "photo":
            # soft side lighting
            value = value + 0.08 * (np.arange(1, FACE_COLS + 1) - 75.5)[None, :]
        a = cov[shape]
        img = img * (1 - a) + value * a
    rng = np.random.default_rng(seed)
    img = img + rng.normal(0.0, p["noise"], img.shape)
    return np.clip(np.rint(img), 0, 255).astype(np.uint8)


@dataclass(frozen=True)
class SyntheticPair:
    face: FaceGeometry
    photo: np.ndarray
    sketch: np.ndarray
    truth: dict


def make_corpus(n: int = 40, seed: int = 0) -> list[SyntheticPair]:
    rng = np.random.default_rng(seed)
    pairs = []
    for i in range(n):
        face = random_face(rng, f"id{i:03d}")
        cov = component_coverage(face)
        pairs.append(SyntheticPair(
            face,
            render(face, "photo", seed=int(rng.integers(2**31)), coverage=cov),
            render(face, "sketch", seed=int(rng.integers(2**31)), coverage=cov),
            truth_boxes(face, cov),
        ))
    return pairs


def write_corpus(out_dir, n: int = 40, seed: int = 0, with_truth: bool = True) -> Path:
    """Write photos, sketches and a tab-separated manifest; returns the manifest path."""
    out = Path(out_dir)
    (out / "photos").mkdir(parents=True, exist_ok=True)
    (out / "sketches").mkdir(parents=True, exist_ok=True)
    lines = []
    for pair in make_corpus(n, seed):
        ident = pair.face.identity
        photo = Path("photos") / f"{ident}.pgm"
        sketch = Path("sketches") / f"{ident}.pgm"
        save_image(out / photo, pair.photo)
        save_image(out / sketch, pair.sketch)
        fields = [ident, photo.as_posix(), sketch.as_posix()]
        if with_truth:
            fields += [f"{c}={r.x1},{r.y1},{r.x2},{r.y2}" for c, r in pair.truth.items()]
        lines.append("\t".join(fields))
    manifest = out / "manifest.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest
