"""Catalog coverage of a full recommendation run."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .simrec import PAPER, RecommendationSet, Recommender

Month = tuple[int, int]
CORPUS_SCOPE = "corpus"
WITHIN_MONTH_SCOPE = "within_month"


def recommended_ids(rec_sets: Mapping[str, RecommendationSet] | Iterable[RecommendationSet]) -> set[str]:
    sets = rec_sets.values() if isinstance(rec_sets, Mapping) else rec_sets
    out: set[str] = set()
    for s in sets:
        out.update(s.ids)
    return out


def aggregate_coverage(rec_sets: Mapping[str, RecommendationSet], n: int) -> float:
    """Fraction of the ``n`` corpus videos recommended at least once."""
    if n <= 0:
        raise ValueError("coverage of an empty corpus is undefined")
    return len(recommended_ids(rec_sets)) / n


def monthly_counts(rec_sets: Mapping[str, RecommendationSet],
                   buckets: Mapping[Month, Sequence[str]],
                   scope: str = CORPUS_SCOPE) -> dict[Month, tuple[int, int]]:
    """(recommended, published) per month.

    ``corpus`` scope counts a video as covered if any query recommends it;
    ``within_month`` only counts recommendations made by queries from the same month.
    """
    if scope == CORPUS_SCOPE:
        hit = recommended_ids(rec_sets)
        return {m: (sum(v in hit for v in ids), len(ids)) for m, ids in buckets.items() if ids}
    if scope == WITHIN_MONTH_SCOPE:
        out = {}
        for m, ids in buckets.items():
            if not ids:
                continue
            members = set(ids)
            hit = recommended_ids(rec_sets[q] for q in ids if q in rec_sets)
            out[m] = (len(hit & members), len(ids))
        return out
    raise ValueError(f"unknown coverage scope {scope!r}")


def coverage_over_time(rec_sets: Mapping[str, RecommendationSet],
                       buckets: Mapping[Month, Sequence[str]],
                       scope: str = CORPUS_SCOPE) -> dict[Month, float]:
    return {m: r / n for m, (r, n) in monthly_counts(rec_sets, buckets, scope).items()}


def cumulative_coverage(rec_sets: Mapping[str, RecommendationSet],
                        order: Sequence[str]) -> list[tuple[int, float]]:
    """Coverage of the union of the first ``i`` query videos' lists, for i = 1..N."""
    n = len(order)
    seen: set[str] = set()
    points = []
    for i, vid in enumerate(order, 1):
        seen.update(rec_sets[vid].ids)
        points.append((i, len(seen) / n))
    return points


def coverage_by_size(recommender: Recommender, ks: Iterable[int], mode: str = PAPER,
                     threads: int = 1) -> dict[int, float]:
    ks = sorted(set(ks))
    if not ks or ks[0] < 1:
        raise ValueError("need a non-empty list of k >= 1")
    n = len(recommender.ids)
    return {k: aggregate_coverage(recommender.recommend_all(k, mode, threads), n) for k in ks}


@dataclass(frozen=True)
class CoverageReport:
    aggregate: float
    monthly: dict[Month, float]
    cumulative: list[tuple[int, float]]
    by_size: dict[int, float]
    n_videos: int
    n_recommended: int
    monthly_counts: dict[Month, tuple[int, int]] = field(default_factory=dict)
    k: int = 5
    mode: str = PAPER
    scope: str = CORPUS_SCOPE

    def weighted_monthly_mean(self) -> Fraction:
        """Publication-weighted mean of the monthly values, as an exact fraction."""
        total = sum(n for _, n in self.monthly_counts.values())
        return Fraction(sum(r for r, _ in self.monthly_counts.values()), total)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode,
            "monthly_scope": self.scope,
            "n_videos": self.n_videos,
            "n_recommended": self.n_recommended,
            "aggregate": self.aggregate,
            "monthly": [{"month": f"{y:04d}-{m:02d}", "recommended": self.monthly_counts[(y, m)][0],
                         "videos": self.monthly_counts[(y, m)][1], "coverage": v}
                        for (y, m), v in self.monthly.items()],
            "cumulative_final": self.cumulative[-1][1] if self.cumulative else 0.0,
            "by_size": {str(k): v for k, v in self.by_size.items()},
        }


def coverage_report(recommender: Recommender, buckets: Mapping[Month, Sequence[str]],
                    order: Sequence[str], k: int = 5, ks: Iterable[int] = (1, 5, 10),
                    mode: str = PAPER, scope: str = CORPUS_SCOPE, threads: int = 1,
                    rec_sets: Mapping[str, RecommendationSet] | None = None) -> CoverageReport:
    if rec_sets is None:
        rec_sets = recommender.recommend_all(k, mode, threads)
    n = len(order)
    counts = monthly_counts(rec_sets, buckets, scope)
    return CoverageReport(
        aggregate=aggregate_coverage(rec_sets, n),
        monthly={m: r / c for m, (r, c) in counts.items()},
        cumulative=cumulative_coverage(rec_sets, order),
        by_size=coverage_by_size(recommender, ks, mode, threads),
        n_videos=n,
        n_recommended=len(recommended_ids(rec_sets)),
        monthly_counts=counts,
        k=k, mode=mode, scope=scope,
    )
