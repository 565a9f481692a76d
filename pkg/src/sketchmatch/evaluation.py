"""Extraction success rates, rank-k accuracy / CMC, and the plain-text report."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import StateError
from .matcher import Match
from .raster import Rect

DEFAULT_IOU_TAU = 0.3
REPORT_COMPONENTS = ("right_eye", "left_eye", "right_brow", "left_brow", "nose", "lips")


@dataclass(frozen=True)
class ExtractionOutcome:
    image_id: str
    component: str
    predicted: Rect | None  # None when extraction failed
    truth: Rect | None = None
    tau: float = DEFAULT_IOU_TAU

    @property
    def success(self) -> bool | None:
        """IoU with the truth box reaches ``tau``; undefined without truth."""
        if self.truth is None:
            return None
        if self.predicted is None:
            return False
        return self.predicted.iou(self.truth) >= self.tau


def extraction_success_rate(outcomes: Iterable[ExtractionOutcome], component: str) -> float:
    """Percentage of images whose ``component`` was extracted successfully."""
    judged = [o.success for o in outcomes if o.component == component and o.truth is not None]
    if not judged:
        raise StateError(f"no judged outcomes for {component}")
    return 100.0 * sum(judged) / len(judged)


def overall_extraction_performance(outcomes: Iterable[ExtractionOutcome]) -> float:
    """All components pooled: successes / (images x components per image) x 100."""
    judged = [o for o in outcomes if o.truth is not None]
    if not judged:
        raise StateError("no judged outcomes")
    images = {o.image_id for o in judged}
    components = {o.component for o in judged}
    return 100.0 * sum(o.success for o in judged) / (len(images) * len(components))


def mate_rank(matches: Sequence[Match], true_identity: str) -> int | None:
    for rank, m in enumerate(matches, 1):
        if m.identity == true_identity:
            return rank
    return None


def rank_k_accuracy(results, k: int) -> float:
    """``results`` holds ``(probe_id, matches, true_identity)`` triples."""
    results = list(results)
    if not results:
        raise StateError("no query results")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    hits = 0
    for _, matches, truth in results:
        r = mate_rank(matches, truth)
        hits += r is not None and r <= k
    return 100.0 * hits / len(results)


def cmc(results, k: int = 5) -> np.ndarray:
    """Rank-k accuracy for every rank ``1..k``."""
    results = list(results)
    return np.array([rank_k_accuracy(results, r) for r in range(1, k + 1)])


# -- report -----------------------------------------------------------------

def format_extraction_block(rates: dict | None) -> str:
    """``rates`` maps component -> (photo %, sketch %); ``None`` means no truth boxes."""
    lines = ["Component extraction success (%)", f"{'component':<12} {'photo':>7} {'sketch':>7}"]
    for comp in REPORT_COMPONENTS:
        if rates is None or comp not in rates:
            lines.append(f"{comp:<12} {'n/a':>7} {'n/a':>7}")
        else:
            photo, sketch = rates[comp]
            lines.append(f"{comp:<12} {_pct(photo):>7} {_pct(sketch):>7}")
    return "\n".join(lines)


def _pct(v) -> str:
    return "n/a" if v is None else f"{v:.1f}"


def format_cmc_block(curve: Sequence[float]) -> str:
    ranks = range(1, len(curve) + 1)
    return "\n".join([
        "Matching percentage by rank",
        "rank " + " ".join(f"{r:>6d}" for r in ranks),
        "pct  " + " ".join(f"{v:>6.1f}" for v in curve),
    ])


def parse_cmc_block(text: str) -> list[float]:
    """Read the curve back from a report produced by :func:`format_report`."""
    m = re.search(r"^pct\s+(.*)$", text, flags=re.MULTILINE)
    if m is None:
        raise ValueError("no matching-percentage line in report")
    return [float(t) for t in m.group(1).split()]


def format_report(rates: dict | None, curve: Sequence[float]) -> str:
    return format_extraction_block(rates) + "\n\n" + format_cmc_block(curve) + "\n"
