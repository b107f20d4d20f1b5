"""TF-IDF vectors, cosine similarity and attribute-filtered top-k recommendation.

Similarities are computed query-by-query through an inverted index, so the
cost of one query is proportional to the postings of its terms and the N x N
matrix never exists.  Every dot product is accumulated term by term in
ascending term id, which makes the indexed path and the dense fallback
bit-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .textprep import Vocabulary
from .topics import CountMatrix

PAPER = "paper"
FILTER_FIRST = "filter_first"
UNFILTERED = "unfiltered"
MODES = (PAPER, FILTER_FIRST, UNFILTERED)


@dataclass(frozen=True, eq=False)
class SparseVector:
    ids: np.ndarray
    weights: np.ndarray
    dim: int

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if ids.shape != weights.shape:
            raise ValueError("ids and weights must have the same length")
        if ids.size and (np.any(np.diff(ids) <= 0) or ids[0] < 0 or ids[-1] >= self.dim):
            raise ValueError("term ids must be strictly increasing and inside [0, dim)")
        if not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite")
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_dense(cls, dense: Sequence[float]) -> "SparseVector":
        dense = np.asarray(dense, dtype=np.float64)
        nz = np.flatnonzero(dense)
        return cls(nz, dense[nz], dense.size)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.ids] = self.weights
        return out

    @property
    def nnz(self) -> int:
        return int(self.ids.size)

    def norm(self) -> float:
        return math.sqrt(float(np.dot(self.weights, self.weights)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (self.dim == other.dim and np.array_equal(self.ids, other.ids)
                and np.array_equal(self.weights, other.weights))


def idf(vocab: Vocabulary) -> np.ndarray:
    """Smoothed inverse document frequency ``ln((1+N)/(1+df)) + 1``."""
    df = np.asarray(vocab.df, dtype=np.float64)
    return np.log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0


def tfidf_vectorize(matrix: CountMatrix, vocab: Vocabulary) -> list[SparseVector]:
    """Raw counts times smoothed idf, each row L2-normalized; empty rows stay empty."""
    if len(vocab) != matrix.shape[1]:
        raise ValueError("vocabulary does not match the count matrix columns")
    weights_idf = idf(vocab)
    counts = matrix.counts.tocsr()
    counts.sort_indices()
    vectors = []
    for d in range(counts.shape[0]):
        lo, hi = counts.indptr[d], counts.indptr[d + 1]
        ids = counts.indices[lo:hi]
        w = counts.data[lo:hi].astype(np.float64) * weights_idf[ids]
        if w.size:
            w = w / math.sqrt(float(np.dot(w, w)))
        vectors.append(SparseVector(ids, w, len(vocab)))
    return vectors


def cosine(a: SparseVector, b: SparseVector) -> float:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.nnz == 0 or b.nnz == 0:
        return 0.0
    _, ia, ib = np.intersect1d(a.ids, b.ids, assume_unique=True, return_indices=True)
    if ia.size == 0:
        return 0.0
    dot = float(np.dot(a.weights[ia], b.weights[ib]))
    return dot / (a.norm() * b.norm())


class InvertedIndex:
    """Term -> (document positions, weights) postings over a fixed vector list."""

    def __init__(self, vectors: Sequence[SparseVector]):
        self.n_docs = len(vectors)
        self.dim = vectors[0].dim if vectors else 0
        if any(v.dim != self.dim for v in vectors):
            raise ValueError("all vectors must share one dimension")
        lengths = np.array([v.nnz for v in vectors], dtype=np.int64)
        terms = np.concatenate([v.ids for v in vectors]) if vectors else np.zeros(0, np.int64)
        weights = np.concatenate([v.weights for v in vectors]) if vectors else np.zeros(0)
        docs = np.repeat(np.arange(self.n_docs, dtype=np.int64), lengths)
        order = np.lexsort((docs, terms))
        self._docs = docs[order]
        self._weights = weights[order]
        self._ptr = np.zeros(self.dim + 1, dtype=np.int64)
        np.cumsum(np.bincount(terms, minlength=self.dim), out=self._ptr[1:])
        self._vectors = list(vectors)
        self._docs.flags.writeable = False
        self._weights.flags.writeable = False

    def postings(self, term: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self._ptr[term], self._ptr[term + 1]
        return self._docs[lo:hi], self._weights[lo:hi]

    def scores(self, query: SparseVector) -> np.ndarray:
        """Dot products of ``query`` with every indexed vector (dense length-N array)."""
        acc = np.zeros(self.n_docs)
        for t, w in zip(query.ids.tolist(), query.weights.tolist()):
            lo, hi = self._ptr[t], self._ptr[t + 1]
            acc[self._docs[lo:hi]] += w * self._weights[lo:hi]
        return acc

    def query_scores(self, pos: int) -> np.ndarray:
        return self.scores(self._vectors[pos])


def dense_scores(vectors: Sequence[SparseVector], pos: int) -> np.ndarray:
    """Reference path: dense term-by-term accumulation of one row of the similarity matrix."""
    dense = np.array([v.to_dense() for v in vectors]) if vectors else np.zeros((0, 0))
    acc = np.zeros(len(vectors))
    q = dense[pos]
    for t in range(dense.shape[1]):
        acc += q[t] * dense[:, t]
    return acc


@dataclass(frozen=True)
class AttributeProfile:
    sentiment: str
    toxicity: str
    topic: int


@dataclass(frozen=True)
class RecommendationSet:
    query: str
    items: tuple[tuple[str, float], ...]
    n_requested: int

    @property
    def ids(self) -> list[str]:
        return [vid for vid, _ in self.items]

    def __len__(self) -> int:
        return len(self.items)


class Recommender:
    """Content-based recommender over a fixed corpus.

    ``ids`` and ``vectors`` are aligned; ``profiles`` maps video id to its
    attribute profile and is required for the filtering modes.
    """

    def __init__(self, ids: Sequence[str], vectors: Sequence[SparseVector],
                 profiles: Mapping[str, AttributeProfile] | None = None,
                 backend: str = "index"):
        if len(ids) != len(vectors):
            raise ValueError("ids and vectors must align")
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate video ids")
        if backend not in ("index", "dense"):
            raise ValueError(f"unknown backend {backend!r}")
        self.ids = list(ids)
        self.vectors = list(vectors)
        self.pos = {vid: i for i, vid in enumerate(self.ids)}
        self.profiles = dict(profiles) if profiles is not None else None
        if self.profiles is not None:
            missing = [vid for vid in self.ids if vid not in self.profiles]
            if missing:
                raise ValueError(f"{len(missing)} videos lack an attribute profile, e.g. {missing[0]}")
            ordered = [self.profiles[vid] for vid in self.ids]
            keys = {p: i for i, p in enumerate(dict.fromkeys(ordered))}
            self._profile_key = np.array([keys[p] for p in ordered], dtype=np.int64)
        self.backend = backend
        self.index = InvertedIndex(self.vectors) if backend == "index" else None
        # rank of each id in ascending id order, for the similarity tie-break
        self._id_rank = np.empty(len(self.ids), dtype=np.int64)
        self._id_rank[np.argsort(np.array(self.ids, dtype=object), kind="stable")] = \
            np.arange(len(self.ids))

    def _scores(self, pos: int) -> np.ndarray:
        if self.index is not None:
            return self.index.query_scores(pos)
        return dense_scores(self.vectors, pos)

    def recommend(self, query: str, k: int, mode: str = PAPER) -> RecommendationSet:
        """Top-``k`` most similar videos, ranked by (similarity desc, id asc).

        ``paper``: truncate to ``k`` first, then drop candidates whose profile
        differs from the query's, so fewer than ``k`` may remain.
        ``filter_first``: filter, then truncate.  ``unfiltered``: no filter.
        Zero-similarity candidates are never recommended.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
        if query not in self.pos:
            raise KeyError(f"unknown query video {query!r}")
        if mode != UNFILTERED and self.profiles is None:
            raise ValueError(f"mode {mode!r} needs attribute profiles")
        q = self.pos[query]
        sims = self._scores(q)
        cand = np.flatnonzero(sims > 0.0)
        cand = cand[cand != q]
        if mode != UNFILTERED:
            same = self._profile_key[cand] == self._profile_key[q]
        if mode == FILTER_FIRST:
            cand = cand[same]
        elif mode == PAPER:
            cand_same = same
        if cand.size > k:
            # keep everything tied with the k-th best so the id tie-break stays exact
            s = sims[cand]
            kth = np.partition(s, s.size - k)[s.size - k]
            keep = s >= kth
            cand = cand[keep]
            if mode == PAPER:
                cand_same = cand_same[keep]
        order = np.lexsort((self._id_rank[cand], -sims[cand]))[:k]
        if mode == PAPER:
            order = order[cand_same[order]]
        chosen = cand[order]
        items = tuple((self.ids[i], float(sims[i])) for i in chosen)
        return RecommendationSet(query, items, k)

    def recommend_all(self, k: int, mode: str = PAPER, threads: int = 1) -> dict[str, RecommendationSet]:
        """One recommendation set per video, keyed in corpus order."""
        if threads > 1 and len(self.ids) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                sets = list(pool.map(lambda vid: self.recommend(vid, k, mode), self.ids))
        else:
            sets = [self.recommend(vid, k, mode) for vid in self.ids]
        return {s.query: s for s in sets}
