"""Grayscale rasters, netpbm I/O and the small pixel utilities everything else uses.

Gray images are 2-D ``uint8`` arrays (rows x cols), binary images are 2-D
``bool`` arrays with ``True`` marking foreground.  Rectangles use 1-based
inclusive (row, column) coordinates so the region formulas of the geometric
model can be written down verbatim; the conversion to numpy slices lives in
:meth:`Rect.slices`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyRegionError, FormatError, ParameterError

FACE_ROWS = 200
FACE_COLS = 150

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, 1-based and inclusive.

    ``x`` indexes rows and ``y`` indexes columns.
    """

    x1: int
    y1: int
    x2: int
    y2: int

    @property
    def rows(self) -> int:
        return self.x2 - self.x1 + 1

    @property
    def cols(self) -> int:
        return self.y2 - self.y1 + 1

    @property
    def area(self) -> int:
        if self.is_empty():
            return 0
        return self.rows * self.cols

    def is_empty(self) -> bool:
        return self.x2 < self.x1 or self.y2 < self.y1

    def clamp(self, rows: int, cols: int) -> Rect:
        """Intersect with the image ``[1, rows] x [1, cols]``; may return an empty rect."""
        return Rect(max(self.x1, 1), max(self.y1, 1), min(self.x2, rows), min(self.y2, cols))

    def contains(self, other: Rect) -> bool:
        return (self.x1 <= other.x1 and other.x2 <= self.x2
                and self.y1 <= other.y1 and other.y2 <= self.y2)

    def intersection(self, other: Rect) -> Rect:
        return Rect(max(self.x1, other.x1), max(self.y1, other.y1),
                    min(self.x2, other.x2), min(self.y2, other.y2))

    def iou(self, other: Rect) -> float:
        inter = self.intersection(other).area
        union = self.area + other.area - inter
        return inter / union if union else 0.0

    def slices(self) -> tuple[slice, slice]:
        return slice(self.x1 - 1, self.x2), slice(self.y1 - 1, self.y2)

    def __str__(self) -> str:
        return f"{self.x1} {self.y1} {self.x2} {self.y2}"


def as_gray(pixels) -> np.ndarray:
    """Validate and convert anything array-like into a gray image."""
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise ParameterError(f"gray image must be 2-D, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ParameterError("gray intensities must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


# -- netpbm ---------------------------------------------------------------

_MAGICS = {b"P2": (1, False), b"P5": (1, True), b"P3": (3, False), b"P6": (3, True)}


def _read_header(data: bytes):
    """Return (magic, width, height, maxval, offset of first raster byte)."""
    magic = data[:2]
    if magic not in _MAGICS:
        raise FormatError(f"unsupported magic number {magic!r}")
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and comments
        while pos < len(data):
            ch = data[pos:pos + 1]
            if ch == b"#":
                end = data.find(b"\n", pos)
                pos = len(data) if end < 0 else end + 1
            elif ch.isspace():
                pos += 1
            else:
                break
        m = re.compile(rb"\S+").match(data, pos)
        if m is None:
            raise FormatError("truncated header")
        token = m.group()
        if not token.isdigit():
            raise FormatError(f"malformed header token {token.decode(errors='replace')!r}")
        fields.append(int(token))
        pos = m.end()
    width, height, maxval = fields
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} (only 255 is accepted)")
    if width < 1 or height < 1:
        raise FormatError(f"bad dimensions {width}x{height}")
    # exactly one whitespace byte separates the header from binary rasters
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        if _MAGICS[magic][1]:
            raise FormatError("missing whitespace after maxval")
    return magic, width, height, maxval, pos + 1


def luma(rgb: np.ndarray) -> np.ndarray:
    """Per-pixel ``round(0.299 R + 0.587 G + 0.114 B)``."""
    wr, wg, wb = LUMA_WEIGHTS
    rgb = rgb.astype(np.float64)
    gray = wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]
    return np.clip(np.floor(gray + 0.5), 0, 255).astype(np.uint8)


def decode_netpbm(data: bytes) -> np.ndarray:
    magic, width, height, _, offset = _read_header(data)
    channels, binary = _MAGICS[magic]
    count = width * height * channels
    if binary:
        raster = np.frombuffer(data, dtype=np.uint8, count=-1, offset=offset)
        if raster.size < count:
            raise FormatError(f"raster truncated: expected {count} bytes, found {raster.size}")
        values = raster[:count]
    else:
        text = re.sub(rb"#[^\n]*", b"", data[offset - 1:])
        tokens = text.split()
        if len(tokens) < count:
            raise FormatError(f"raster truncated: expected {count} samples, found {len(tokens)}")
        try:
            ints = [int(t) for t in tokens[:count]]
        except ValueError as exc:
            raise FormatError(f"malformed sample: {exc}") from None
        values = np.array(ints, dtype=np.int64)
        if values.min() < 0 or values.max() > 255:
            raise FormatError("sample outside [0, 255]")
        values = values.astype(np.uint8)
    if channels == 1:
        return values.reshape(height, width).copy()
    return luma(values.reshape(height, width, 3))


def load_image(path) -> np.ndarray:
    """Load an 8-bit PGM (P2/P5) or PPM (P3/P6) as a gray image.

    Color files are reduced with the luma weights in :data:`LUMA_WEIGHTS`.
    Raises ``OSError`` when the file cannot be read and :class:`FormatError`
    for anything wrong with its contents.
    """
    data = Path(path).read_bytes()
    try:
        return decode_netpbm(data)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def encode_pgm(img: np.ndarray) -> bytes:
    img = as_gray(img)
    rows, cols = img.shape
    return b"P5\n%d %d\n255\n" % (cols, rows) + np.ascontiguousarray(img).tobytes()


def save_image(path, img: np.ndarray) -> None:
    """Write ``img`` as a binary P5 file."""
    Path(path).write_bytes(encode_pgm(img))


def mask_to_gray(mask: np.ndarray) -> np.ndarray:
    """Render a binary image for inspection: foreground black, background white."""
    return np.where(mask, 0, 255).astype(np.uint8)


# -- geometry of rasters ----------------------------------------------------

def normalize_size(img: np.ndarray, rows: int = FACE_ROWS, cols: int = FACE_COLS) -> np.ndarray:
    """Resample to ``rows x cols`` (200 x 150 by default).

    The largest centred window with the target aspect ratio is cut out and
    resampled with nearest-neighbour lookup.  Inputs that already have the
    target shape are returned unchanged.
    """
    img = as_gray(img)
    h, w = img.shape
    if (h, w) == (rows, cols):
        return img
    # window with aspect cols:rows, integer arithmetic to stay exact
    if w * rows > h * cols:
        win_h, win_w = h, max(1, (h * cols + rows // 2) // rows)
    else:
        win_h, win_w = max(1, (w * rows + cols // 2) // cols), w
    top = (h - win_h) // 2
    left = (w - win_w) // 2
    src_r = top + ((2 * np.arange(rows) + 1) * win_h) // (2 * rows)
    src_c = left + ((2 * np.arange(cols) + 1) * win_w) // (2 * cols)
    return img[np.ix_(src_r, src_c)]


def crop(img: np.ndarray, rect: Rect) -> np.ndarray:
    """Cut out ``rect`` after clamping it to the image bounds."""
    clamped = rect.clamp(*img.shape)
    if clamped.is_empty():
        raise EmptyRegionError(f"rectangle {rect} does not intersect a {img.shape[0]}x{img.shape[1]} image")
    return img[clamped.slices()].copy()


# -- intensity ----------------------------------------------------------------

def otsu_threshold(img: np.ndarray) -> int:
    """Threshold ``T`` maximising the between-class variance of ``{< T}`` vs ``{>= T}``.

    All 256 candidates are scanned; ties go to the smallest ``T``.  A constant
    image scores zero everywhere and therefore yields ``T = 0``.
    """
    hist = np.bincount(np.asarray(img, dtype=np.uint8).ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    levels = np.arange(256, dtype=np.float64)
    # cumulative counts/moments of the class strictly below T, for T = 0..255
    w0 = np.concatenate(([0.0], np.cumsum(hist)[:-1]))
    m0 = np.concatenate(([0.0], np.cumsum(hist * levels)[:-1]))
    w1 = total - w0
    m1 = (hist * levels).sum() - m0
    with np.errstate(divide="ignore", invalid="ignore"):
        score = w0 * w1 * (m0 / w0 - m1 / w1) ** 2
    score = np.where((w0 > 0) & (w1 > 0), score, 0.0)
    return int(np.argmax(score))


def binarize(img: np.ndarray, threshold: int | None = None) -> np.ndarray:
    """Dark pixels (``< T``) become foreground.

    ``threshold=None`` selects ``T`` with :func:`otsu_threshold`.
    """
    img = as_gray(img)
    t = otsu_threshold(img) if threshold is None else int(threshold)
    return img < t


def saturating_add(img: np.ndarray, offset: int) -> np.ndarray:
    if not 0 <= offset <= 255:
        raise ParameterError(f"offset must be in [0, 255], got {offset}")
    return np.minimum(as_gray(img).astype(np.int16) + offset, 255).astype(np.uint8)
