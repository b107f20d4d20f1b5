"""LDA topic modelling with a collapsed Gibbs sampler.

Documents arrive as a sparse count matrix; inside the sampler each document is
expanded into one slot per token occurrence (terms ascending).  Random numbers
come from a ``numpy.random.Generator`` seeded once per fit, one uniform per
token per sweep, so a fit is bit-reproducible from ``(matrix, K, alpha, beta,
iterations, seed)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numba
import numpy as np
import scipy.sparse as sp

from .textprep import TokenStream, Vocabulary

# K-independent on purpose: with alpha proportional to 1/K the total prior mass
# K*alpha is constant, unused topics cost nothing and held-out scores stop
# discriminating between topic counts
DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 0.01
DEFAULT_ITERATIONS = 500
DEFAULT_HELDOUT_SWEEPS = 50
DEFAULT_FOLDS = 5
DEFAULT_CANDIDATES = tuple(range(2, 11))
MODEL_FORMAT = "ytanalytics-lda 1"


def default_alpha(k: int) -> float:
    return DEFAULT_ALPHA


@dataclass(frozen=True)
class CountMatrix:
    counts: sp.csr_matrix
    terms: tuple[str, ...]
    row_ids: tuple[str, ...]

    def __post_init__(self):
        if self.counts.shape != (len(self.row_ids), len(self.terms)):
            raise ValueError(f"count matrix shape {self.counts.shape} does not match "
                             f"{len(self.row_ids)} rows x {len(self.terms)} terms")

    @property
    def shape(self) -> tuple[int, int]:
        return self.counts.shape

    def subset(self, rows: Sequence[int]) -> "CountMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        return CountMatrix(self.counts[rows], self.terms, tuple(self.row_ids[i] for i in rows))


def count_vectorize(docs: Iterable[TokenStream | Sequence[str]], vocab: Vocabulary,
                    row_ids: Sequence[str] | None = None) -> CountMatrix:
    """Term-count matrix over ``vocab``; out-of-vocabulary tokens are dropped."""
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    n = 0
    for doc in docs:
        tokens = doc.tokens if isinstance(doc, TokenStream) else doc
        tally: dict[int, int] = {}
        for tok in tokens:
            t = vocab.id_of(tok)
            if t is not None:
                tally[t] = tally.get(t, 0) + 1
        for t in sorted(tally):
            indices.append(t)
            data.append(tally[t])
        indptr.append(len(indices))
        n += 1
    counts = sp.csr_matrix(
        (np.asarray(data, dtype=np.int64), np.asarray(indices, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(n, len(vocab)))
    ids = tuple(row_ids) if row_ids is not None else tuple(str(i) for i in range(n))
    return CountMatrix(counts, vocab.terms, ids)


# -- sampler kernels ---------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _gibbs_sweep(words, docs, z, n_dk, n_kw, n_k, alpha, beta, vbeta, uniforms, p):
    K = n_k.shape[0]
    inv = np.empty(K)
    for t in range(K):
        inv[t] = 1.0 / (n_k[t] + vbeta)
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        inv[k] = 1.0 / (n_k[k] + vbeta)
        total = 0.0
        for t in range(K):
            total += (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) * inv[t]
            p[t] = total
        u = uniforms[i] * total
        k = 0
        while k < K - 1 and p[k] <= u:
            k += 1
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1
        inv[k] = 1.0 / (n_k[k] + vbeta)


@numba.njit(cache=True, nogil=True)
def _foldin_sweep(words, docs, z, n_dk, phi, alpha, uniforms, p):
    K = phi.shape[0]
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        n_dk[d, k] -= 1
        total = 0.0
        for t in range(K):
            total += (n_dk[d, t] + alpha) * phi[t, w]
            p[t] = total
        u = uniforms[i] * total
        k = 0
        while k < K - 1 and p[k] <= u:
            k += 1
        z[i] = k
        n_dk[d, k] += 1


def _expand(counts: sp.csr_matrix) -> tuple[np.ndarray, np.ndarray]:
    """(word, doc) per token occurrence, documents in row order, terms ascending."""
    counts = counts.tocsr()
    counts.sort_indices()
    reps = counts.data.astype(np.int64)
    words = np.repeat(counts.indices.astype(np.int64), reps)
    row_of_entry = np.repeat(np.arange(counts.shape[0], dtype=np.int64), np.diff(counts.indptr))
    docs = np.repeat(row_of_entry, reps)
    return words, docs


@dataclass
class SamplerState:
    """Live sampler counts, handed to the per-sweep callback."""

    sweep: int
    words: np.ndarray
    docs: np.ndarray
    z: np.ndarray
    n_dk: np.ndarray
    n_kw: np.ndarray
    n_k: np.ndarray


@dataclass(frozen=True)
class LdaModel:
    k: int
    phi: np.ndarray
    theta: np.ndarray
    alpha: float
    beta: float
    seed: int
    iterations: int
    terms: tuple[str, ...]
    row_ids: tuple[str, ...]
    doc_topic_counts: np.ndarray | None = field(default=None, compare=False, repr=False)
    topic_word_counts: np.ndarray | None = field(default=None, compare=False, repr=False)

    def dominant_topics(self) -> np.ndarray:
        return np.argmax(self.theta, axis=1)


def _check_k(k: int, n_tokens: int) -> None:
    if k < 1:
        raise ValueError(f"topic count must be >= 1, got {k}")
    if k > n_tokens:
        raise ValueError(f"topic count {k} exceeds the {n_tokens} tokens in the matrix")


def fit_lda(matrix: CountMatrix, k: int, alpha: float | None = None, beta: float = DEFAULT_BETA,
            iterations: int = DEFAULT_ITERATIONS, seed: int = 0,
            callback: Callable[[SamplerState], None] | None = None) -> LdaModel:
    """Fit LDA by collapsed Gibbs sampling; phi/theta from the last sample."""
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    words, docs = _expand(matrix.counts)
    if words.size == 0:
        raise ValueError("count matrix is all zeros")
    _check_k(k, words.size)
    alpha = default_alpha(k) if alpha is None else float(alpha)
    n_docs, vocab_size = matrix.shape

    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=words.size).astype(np.int64)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, vocab_size), dtype=np.int64)
    np.add.at(n_dk, (docs, z), 1)
    np.add.at(n_kw, (z, words), 1)
    n_k = n_kw.sum(axis=1)
    p = np.empty(k, dtype=np.float64)
    vbeta = vocab_size * beta

    for sweep in range(1, iterations + 1):
        _gibbs_sweep(words, docs, z, n_dk, n_kw, n_k, alpha, beta, vbeta,
                     rng.random(words.size), p)
        if callback is not None:
            callback(SamplerState(sweep, words, docs, z, n_dk, n_kw, n_k))

    phi = (n_kw + beta) / (n_k[:, None] + vbeta)
    lengths = n_dk.sum(axis=1)
    theta = (n_dk + alpha) / (lengths[:, None] + k * alpha)
    return LdaModel(k, phi, theta, alpha, beta, int(seed), iterations, matrix.terms,
                    matrix.row_ids, n_dk, n_kw)


def _split_for_completion(counts: sp.csr_matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Alternate each held-out document's tokens between a fold-in and an evaluation half."""
    words, docs = _expand(counts)
    if words.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty, empty
    starts = np.r_[0, np.flatnonzero(np.diff(docs)) + 1]
    first_of_doc = np.repeat(starts, np.diff(np.r_[starts, words.size]))
    parity = (np.arange(words.size) - first_of_doc) % 2
    fold = parity == 0
    return words[fold], docs[fold], words[~fold], docs[~fold]


def heldout_log_likelihood(phi: np.ndarray, matrix: CountMatrix, alpha: float,
                           sweeps: int = DEFAULT_HELDOUT_SWEEPS, seed: int = 0) -> float:
    """Per-word held-out log-likelihood by document completion.

    Every other token of each document is folded in with ``phi`` frozen; the
    remaining tokens are scored under the resulting theta estimate.
    """
    k = phi.shape[0]
    fw, fd, ew, ed = _split_for_completion(matrix.counts)
    if ew.size == 0:
        raise ValueError("held-out documents contain fewer than two tokens each")
    n_docs = matrix.shape[0]
    rng = np.random.default_rng(seed)
    z = rng.integers(0, k, size=fw.size).astype(np.int64)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    np.add.at(n_dk, (fd, z), 1)
    p = np.empty(k, dtype=np.float64)
    for _ in range(sweeps):
        _foldin_sweep(fw, fd, z, n_dk, phi, alpha, rng.random(fw.size), p)
    theta = (n_dk + alpha) / (n_dk.sum(axis=1)[:, None] + k * alpha)
    probs = np.einsum("ik,ki->i", theta[ed], phi[:, ew])
    return float(np.sum(np.log(probs)) / ew.size)


@dataclass(frozen=True)
class TopicSelection:
    best_k: int
    scores: dict[int, float]
    fold_scores: dict[int, tuple[float, ...]]

    def table(self) -> list[tuple[int, float]]:
        return sorted(self.scores.items())


def fold_assignment(n_docs: int, folds: int, seed: int) -> list[np.ndarray]:
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    if n_docs < folds:
        raise ValueError(f"{n_docs} documents cannot be split into {folds} folds")
    perm = np.random.default_rng(seed).permutation(n_docs)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def select_topic_count(matrix: CountMatrix, candidates: Iterable[int] = DEFAULT_CANDIDATES,
                       folds: int = DEFAULT_FOLDS, seed: int = 0, alpha: float | None = None,
                       beta: float = DEFAULT_BETA, iterations: int = DEFAULT_ITERATIONS,
                       heldout_sweeps: int = DEFAULT_HELDOUT_SWEEPS,
                       threads: int = 1) -> TopicSelection:
    """Grid search over topic counts by k-fold held-out per-word log-likelihood.

    The best K maximizes the mean across folds; ties go to the smaller K.
    """
    candidates = sorted(set(int(c) for c in candidates))
    if not candidates:
        raise ValueError("no candidate topic counts")
    parts = fold_assignment(matrix.shape[0], folds, seed)
    all_rows = np.arange(matrix.shape[0])
    children = np.random.SeedSequence(seed).spawn(len(candidates) * folds)
    jobs = []
    for ci, k in enumerate(candidates):
        for f, test in enumerate(parts):
            child = children[ci * folds + f]
            fit_seed, eval_seed = (int(s) for s in child.generate_state(2))
            jobs.append((k, f, np.setdiff1d(all_rows, test), test, fit_seed, eval_seed))

    def run(job):
        k, f, train, test, fit_seed, eval_seed = job
        model = fit_lda(matrix.subset(train), k, alpha, beta, iterations, fit_seed)
        return heldout_log_likelihood(model.phi, matrix.subset(test), model.alpha,
                                      heldout_sweeps, eval_seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    fold_scores: dict[int, list[float]] = {k: [] for k in candidates}
    for job, score in zip(jobs, results):
        fold_scores[job[0]].append(score)
    scores = {k: math.fsum(v) / len(v) for k, v in fold_scores.items()}
    best = max(candidates, key=lambda k: (scores[k], -k))
    return TopicSelection(best, scores, {k: tuple(v) for k, v in fold_scores.items()})


def dominant_topic(model: LdaModel, doc: int) -> int:
    """Argmax of the document's theta row; ties go to the lowest topic id."""
    return int(np.argmax(model.theta[doc]))


def top_terms(model: LdaModel, topic: int, n: int = 8) -> list[tuple[str, float]]:
    if not 0 <= topic < model.k:
        raise ValueError(f"topic {topic} out of range for K={model.k}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    row = model.phi[topic]
    order = sorted(range(len(model.terms)), key=lambda t: (-row[t], model.terms[t]))
    return [(model.terms[t], float(row[t])) for t in order[:n]]


# -- persistence -------------------------------------------------------------

def save_model(model: LdaModel, path: str | Path) -> None:
    """Plain-text dump: key/value header, then the phi and theta tables."""
    lines = [
        f"# {MODEL_FORMAT}",
        f"k\t{model.k}",
        f"alpha\t{model.alpha!r}",
        f"beta\t{model.beta!r}",
        f"seed\t{model.seed}",
        f"iterations\t{model.iterations}",
        "terms\t" + "\t".join(model.terms),
        f"phi\t{model.phi.shape[0]}\t{model.phi.shape[1]}",
    ]
    lines += ["\t".join(repr(float(x)) for x in row) for row in model.phi]
    lines.append(f"theta\t{model.theta.shape[0]}\t{model.theta.shape[1]}")
    lines += [rid + "\t" + "\t".join(repr(float(x)) for x in row)
              for rid, row in zip(model.row_ids, model.theta)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LdaModel:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if not lines or lines[0] != f"# {MODEL_FORMAT}":
        raise ValueError(f"{path}: not a {MODEL_FORMAT} model file")
    head = {}
    i = 1
    while not lines[i].startswith("phi\t"):
        key, _, value = lines[i].partition("\t")
        head[key] = value
        i += 1
    _, rows, cols = lines[i].split("\t")
    phi = np.array([[float(x) for x in lines[i + 1 + r].split("\t")] for r in range(int(rows))])
    i += 1 + int(rows)
    _, trows, _ = lines[i].split("\t")
    row_ids, theta_rows = [], []
    for r in range(int(trows)):
        cells = lines[i + 1 + r].split("\t")
        row_ids.append(cells[0])
        theta_rows.append([float(x) for x in cells[1:]])
    k = int(head["k"])
    theta = np.array(theta_rows, dtype=np.float64).reshape(int(trows), k)
    terms = tuple(head["terms"].split("\t")) if head.get("terms") else ()
    return LdaModel(k, phi.reshape(k, int(cols)), theta, float(head["alpha"]), float(head["beta"]),
                    int(head["seed"]), int(head["iterations"]), terms, tuple(row_ids))
