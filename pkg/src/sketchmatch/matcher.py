"""Gallery storage and nearest-neighbour retrieval."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .config import CENTERING_MODES
from .errors import FormatError, IncompatibleGalleryError, StateError
from .features import DIM

MAGIC = "SKETCHMATCH-GALLERY v1"
DEFAULT_K = 5


def fmt(value: float) -> str:
    return f"{value:.9g}"


def euclidean(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


@dataclass
class Gallery:
    identities: list[str]
    photo_paths: list[str]
    vectors: np.ndarray  # (M, DIM), already centered
    centering_mode: str = "per-vector"
    grand_mean: np.ndarray | None = None
    fingerprint: str = ""

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64).reshape(-1, DIM)
        if not len(self.identities) == len(self.photo_paths) == len(self.vectors):
            raise ValueError("identities, paths and vectors differ in length")
        if len(set(self.identities)) != len(self.identities):
            raise ValueError("gallery identities must be unique")
        if self.centering_mode not in CENTERING_MODES:
            raise ValueError(f"unknown centering mode {self.centering_mode!r}")
        if (self.grand_mean is None) != (self.centering_mode != "grand-mean"):
            raise ValueError("grand_mean must be present exactly in grand-mean mode")
        if self.grand_mean is not None:
            self.grand_mean = np.asarray(self.grand_mean, dtype=np.float64).reshape(DIM)

    def __len__(self):
        return len(self.identities)

    # -- text format ---------------------------------------------------------

    def dumps(self) -> str:
        lines = [MAGIC, f"mode={self.centering_mode} dim={DIM} fingerprint={self.fingerprint}"]
        if self.grand_mean is not None:
            lines.append("mean=" + " ".join(fmt(v) for v in self.grand_mean))
        for ident, path, vec in zip(self.identities, self.photo_paths, self.vectors):
            lines.append(f"{ident}\t{path}\t" + " ".join(fmt(v) for v in vec))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> Gallery:
        lines = text.splitlines()
        if not lines or lines[0].strip() != MAGIC:
            raise FormatError("not a gallery file (bad magic line)")
        if len(lines) < 2:
            raise FormatError("gallery header truncated")
        try:
            header = dict(tok.split("=", 1) for tok in lines[1].split())
            mode, dim, fingerprint = header["mode"], int(header["dim"]), header["fingerprint"]
        except (KeyError, ValueError):
            raise FormatError(f"malformed gallery header: {lines[1]!r}") from None
        if dim != DIM:
            raise FormatError(f"gallery dimension {dim}, expected {DIM}")
        body = lines[2:]
        grand = None
        if mode == "grand-mean":
            if not body or not body[0].startswith("mean="):
                raise FormatError("grand-mean gallery lacks a mean= line")
            grand = _parse_values(body[0][len("mean="):], 3)
            body = body[1:]
        idents, paths, vecs = [], [], []
        for lineno, line in enumerate(body, 3 + (grand is not None)):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"gallery line {lineno}: expected 3 tab-separated fields")
            idents.append(parts[0])
            paths.append(parts[1])
            vecs.append(_parse_values(parts[2], lineno))
        try:
            return cls(idents, paths, np.array(vecs).reshape(-1, DIM), mode, grand, fingerprint)
        except ValueError as exc:
            raise FormatError(f"invalid gallery: {exc}") from None

    @classmethod
    def load(cls, path) -> Gallery:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{path}: not a text gallery file ({exc.reason})") from None
        return cls.loads(text)


def _parse_values(text: str, lineno: int) -> np.ndarray:
    try:
        vals = np.array([float(t) for t in text.split()])
    except ValueError:
        raise FormatError(f"gallery line {lineno}: non-numeric value") from None
    if vals.size != DIM:
        raise FormatError(f"gallery line {lineno}: expected {DIM} values, found {vals.size}")
    return vals


class Match(NamedTuple):
    identity: str
    photo_path: str
    distance: float


def knn_query(gallery: Gallery, probe, k: int = DEFAULT_K, fingerprint: str | None = None) -> list[Match]:
    """The ``k`` nearest gallery entries, closest first.

    Equal distances keep enrollment order.  Pass ``fingerprint`` to refuse
    galleries enrolled under different extraction settings.
    """
    if fingerprint is not None and fingerprint != gallery.fingerprint:
        raise IncompatibleGalleryError(
            f"gallery fingerprint {gallery.fingerprint} does not match configuration {fingerprint}")
    if len(gallery) == 0:
        raise StateError("gallery is empty")
    probe = np.asarray(probe, dtype=np.float64)
    if probe.shape != (DIM,):
        raise ValueError(f"probe must have dimension {DIM}")
    dists = np.sqrt(np.sum((gallery.vectors - probe) ** 2, axis=1))
    order = np.argsort(dists, kind="stable")[:k]
    return [Match(gallery.identities[i], gallery.photo_paths[i], float(dists[i])) for i in order]


def classify(matches: list[Match], vote: bool = False) -> str:
    """Nearest identity, or the majority identity when ``vote`` is set.

    Voting ties go to the tied identity that ranks best.
    """
    if not matches:
        raise StateError("no matches to classify")
    if not vote:
        return matches[0].identity
    counts = Counter(m.identity for m in matches)
    best_rank = {}
    for rank, m in enumerate(matches):
        best_rank.setdefault(m.identity, rank)
    return min(counts, key=lambda ident: (-counts[ident], best_rank[ident]))
