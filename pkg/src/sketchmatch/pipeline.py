"""End-to-end helpers: image -> feature vector, enrollment and querying."""

from __future__ import annotations

import numpy as np

from .config import Config
from .errors import ExtractionError, SketchMatchError
from .extractors import ComponentSet, extract_all
from .features import center, center_gallery, feature_vector
from .matcher import DEFAULT_K, Gallery, Match, knn_query
from .raster import normalize_size


def analyze(img: np.ndarray, modality: str, config: Config = Config()):
    """Extract components and measure them; returns ``(ComponentSet, vector)``.

    Measurement failures are re-raised as :class:`ExtractionError` so callers
    only have one failure type to handle per face.
    """
    img = normalize_size(img, config.model.L, config.model.W)
    cs: ComponentSet = extract_all(img, config, modality)
    try:
        vec = feature_vector(cs, modality, config)
    except ExtractionError:
        raise
    except SketchMatchError as exc:
        raise ExtractionError(getattr(exc, "component", "features"), exc) from exc
    return cs, vec


def enroll(faces, config: Config = Config()):
    """Build a gallery from ``(identity, photo_path, image)`` triples.

    Entries are ordered by identity.  Returns ``(gallery, skipped)`` where
    ``skipped`` lists ``(identity, reason)`` for faces that failed; the
    gallery is ``None`` when nothing could be enrolled.
    """
    idents, paths, vecs, skipped = [], [], [], []
    for identity, path, img in sorted(faces, key=lambda t: t[0]):
        if identity in idents:
            skipped.append((identity, "duplicate identity"))
            continue
        try:
            _, vec = analyze(img, config.gallery_modality, config)
        except SketchMatchError as exc:
            skipped.append((identity, str(exc)))
            continue
        idents.append(identity)
        paths.append(str(path))
        vecs.append(vec)
    if not vecs:
        return None, skipped
    return build_gallery(idents, paths, vecs, config), skipped


def build_gallery(identities, paths, vectors, config: Config = Config()) -> Gallery:
    """Center raw feature vectors and wrap them as a gallery tagged with the config fingerprint."""
    centered, grand = center_gallery(np.array(vectors, dtype=np.float64), config.centering_mode)
    return Gallery(list(identities), [str(p) for p in paths], centered,
                   config.centering_mode, grand, config.fingerprint())


def probe_vector(img: np.ndarray, gallery: Gallery, config: Config = Config(), modality=None):
    """Centered probe vector, using the gallery's centering mode."""
    _, vec = analyze(img, modality or config.probe_modality, config)
    return center(vec, gallery.centering_mode, gallery.grand_mean)


def query(img: np.ndarray, gallery: Gallery, config: Config = Config(),
          k: int = DEFAULT_K, modality=None) -> list[Match]:
    probe = probe_vector(img, gallery, config, modality)
    return knn_query(gallery, probe, k, fingerprint=config.fingerprint())
