"""Pipeline configuration and the flat ``key = value`` config file format."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import FormatError, ParameterError
from .filters import CannyParams
from .geometry import GeometricModel

MODALITIES = ("photo", "sketch")
CENTERING_MODES = ("per-vector", "grand-mean")


@dataclass(frozen=True)
class Config:
    model: GeometricModel = field(default_factory=GeometricModel)
    canny: CannyParams = field(default_factory=CannyParams)
    median_window: int = 3
    threshold: int | None = None  # None selects Otsu
    eye_row_normalize: bool = True
    centering_mode: str = "per-vector"
    iou_tau: float = 0.3
    gallery_modality: str = "photo"
    probe_modality: str = "sketch"

    def __post_init__(self):
        if self.median_window < 1 or self.median_window % 2 == 0:
            raise ParameterError(f"median.window must be odd and >= 1, got {self.median_window}")
        if self.threshold is not None and not 0 <= self.threshold <= 256:
            raise ParameterError(f"fixed threshold must be in [0, 256], got {self.threshold}")
        if self.centering_mode not in CENTERING_MODES:
            raise ParameterError(f"unknown centering mode {self.centering_mode!r}")
        if not 0 <= self.iou_tau <= 1:
            raise ParameterError(f"eval.iou_tau must be in [0, 1], got {self.iou_tau}")
        for m in (self.gallery_modality, self.probe_modality):
            if m not in MODALITIES:
                raise ParameterError(f"unknown modality {m!r}")

    def fingerprint(self) -> str:
        """Hash of every setting that changes the feature vectors."""
        parts = [f"geom.{f.name}={getattr(self.model, f.name)!r}" for f in fields(self.model)]
        parts += [
            f"canny.sigma={self.canny.gaussian_sigma!r}",
            f"canny.low_ratio={self.canny.low_ratio!r}",
            f"canny.high_ratio={self.canny.high_ratio!r}",
            f"median.window={self.median_window!r}",
            f"binarize.mode={self.binarize_mode}",
            f"eye_row.normalize={self.eye_row_normalize!r}",
        ]
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()[:16]

    @property
    def binarize_mode(self) -> str:
        return "otsu" if self.threshold is None else f"fixed:{self.threshold}"


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_binarize(text: str):
    if text == "otsu":
        return None
    if text.startswith("fixed:"):
        return int(text[len("fixed:"):])
    raise ValueError(f"expected 'otsu' or 'fixed:<T>', got {text!r}")


def _parse_modality(text: str) -> str:
    if text not in MODALITIES:
        raise ValueError(f"expected photo or sketch, got {text!r}")
    return text


_GEOM_KEYS = {f"geom.{f.name}": f.name for f in fields(GeometricModel)}

_CANNY_KEYS = {
    "canny.sigma": ("gaussian_sigma", float),
    "canny.low_ratio": ("low_ratio", float),
    "canny.high_ratio": ("high_ratio", float),
}

_TOP_KEYS = {
    "median.window": ("median_window", int),
    "binarize.mode": ("threshold", _parse_binarize),
    "eye_row.normalize": ("eye_row_normalize", _parse_bool),
    "centering.mode": ("centering_mode", str),
    "eval.iou_tau": ("iou_tau", float),
    "modality.gallery": ("gallery_modality", _parse_modality),
    "modality.probe": ("probe_modality", _parse_modality),
}

KNOWN_KEYS = frozenset(_GEOM_KEYS) | frozenset(_CANNY_KEYS) | frozenset(_TOP_KEYS)


def parse_config(text: str, source: str = "<config>") -> Config:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Unknown keys and badly typed values raise :class:`FormatError`.
    """
    geom, canny, top = {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key in _GEOM_KEYS:
                name = _GEOM_KEYS[key]
                geom[name] = _parse_bool(value) if name == "symmetric_brows" else int(value)
            elif key in _CANNY_KEYS:
                name, conv = _CANNY_KEYS[key]
                canny[name] = conv(value)
            elif key in _TOP_KEYS:
                name, conv = _TOP_KEYS[key]
                top[name] = conv(value)
            else:
                raise FormatError(f"{source}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise FormatError(f"{source}:{lineno}: bad value for {key}: {exc}") from None
    try:
        return Config(model=GeometricModel(**geom), canny=CannyParams(**canny), **top)
    except ParameterError as exc:
        raise FormatError(f"{source}: {exc}") from None


def load_config(path) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not a text config file ({exc.reason})") from None
    return parse_config(text, str(path))
