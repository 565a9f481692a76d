"""Face-sketch recognition from geometric facial measurements.

Components (eyes, eyebrows, nose, lips, face region) are located with a
fixed geometric model anchored on the eye-ball row, measured on binary and
edge maps, turned into an 8-ratio feature vector and matched against a
photo gallery with Euclidean nearest neighbours.
"""

from .config import Config, load_config, parse_config
from .errors import (
    ExtractionError, FormatError, GeometryError, IncompatibleGalleryError, MeasureError,
    NoFaceError, ParameterError, SketchMatchError, StateError,
)
from .extractors import ComponentSet, extract_all
from .features import FEATURE_NAMES, assemble_vector, center, feature_vector, measure
from .geometry import GeometricModel
from .matcher import Gallery, Match, classify, knn_query
from .pipeline import analyze, enroll, query
from .raster import Rect, load_image, normalize_size, save_image

__all__ = [
    "Config", "load_config", "parse_config",
    "ExtractionError", "FormatError", "GeometryError", "IncompatibleGalleryError", "MeasureError",
    "NoFaceError", "ParameterError", "SketchMatchError", "StateError",
    "ComponentSet", "extract_all",
    "FEATURE_NAMES", "assemble_vector", "center", "feature_vector", "measure",
    "GeometricModel",
    "Gallery", "Match", "classify", "knn_query",
    "analyze", "enroll", "query",
    "Rect", "load_image", "normalize_size", "save_image",
]

__version__ = "0.1.0"
