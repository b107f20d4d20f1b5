"""Toxicity scores and threshold classification.

Scores come either from an external model (ingested as a ``video_id,score``
table) or from the bundled lexicon baseline.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Collection, Iterable, Mapping

from .sentiment import Distribution, class_distribution, read_term_table
from .textprep import TokenStream

log = logging.getLogger(__name__)

TOXIC, NON_TOXIC = "toxic", "non_toxic"
CLASSES = (TOXIC, NON_TOXIC)
DEFAULT_THRESHOLD = 0.5
HALF_SATURATION = 2.0


@dataclass(frozen=True)
class ToxicityLexicon:
    weights: Mapping[str, float]

    def __post_init__(self):
        for term, w in self.weights.items():
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"toxicity weight of {term!r} must be > 0, got {w}")


def load_toxicity_lexicon(path: str | Path | None = None) -> ToxicityLexicon:
    return ToxicityLexicon(read_term_table(path, "toxicity_lexicon.tsv"))


def score_toxicity_lexicon(stream: TokenStream, lexicon: ToxicityLexicon,
                           half_saturation: float = HALF_SATURATION) -> float:
    """``m / (m + c)`` where ``m`` is the summed weight of matched tokens."""
    m = math.fsum(lexicon.weights.get(tok, 0.0) for tok in stream.tokens)
    if m == 0.0:
        return 0.0
    return m / (m + half_saturation)


def check_threshold(threshold: float) -> float:
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"toxicity threshold must be in (0, 1], got {threshold}")
    return threshold


def classify_toxicity(score: float, threshold: float = DEFAULT_THRESHOLD) -> str:
    check_threshold(threshold)
    return TOXIC if score >= threshold else NON_TOXIC


def load_external_scores(path: str | Path,
                         known_ids: Collection[str] | None = None) -> dict[str, float]:
    """Read a ``video_id,score`` table produced by any external scorer.

    Unknown ids (not in ``known_ids``) are logged and kept.  A zero-byte or
    header-only file yields an empty map.
    """
    scores: dict[str, float] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if rows and rows[0] and rows[0][0].strip() == "video_id":
        rows = rows[1:]
    for lineno, row in enumerate(rows, 2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise ValueError(f"{path}:{lineno}: expected two columns, got {len(row)}")
        vid, raw = row[0].strip(), row[1].strip()
        try:
            score = float(raw)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: score for {vid} is not a number: {raw!r}") from None
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"{path}:{lineno}: score for {vid} out of [0, 1]: {score}")
        if vid in scores:
            raise ValueError(f"{path}:{lineno}: duplicate video_id {vid}")
        scores[vid] = score
    if known_ids is not None:
        unknown = sorted(set(scores) - set(known_ids))
        if unknown:
            log.warning("%d external toxicity scores for unknown videos: %s",
                        len(unknown), ", ".join(unknown[:10]))
    return scores


def toxicity_distribution(labels: Iterable[str]) -> Distribution:
    return class_distribution(labels, CLASSES)


def toxic_count_curve(scores: Iterable[float], thresholds: Iterable[float]) -> list[tuple[float, int]]:
    """Number of toxic videos at each threshold."""
    scores = list(scores)
    return [(t, sum(classify_toxicity(s, t) == TOXIC for s in scores)) for t in thresholds]
