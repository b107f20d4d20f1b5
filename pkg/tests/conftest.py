import math
import string
from itertools import permutations
from collections import Counter
from importlib import resources

import numpy as np
import pytest

from ytanalytics.simrec import (FILTER_FIRST, PAPER, UNFILTERED, AttributeProfile, SparseVector,
                                tfidf_vectorize)
from ytanalytics.textprep import EmptyVocabularyError, PrepOptions, build_vocabulary
from ytanalytics.topics import count_vectorize

ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def data_file(name):
    return resources.files("ytanalytics.data").joinpath(name)


# -- brute-force oracles -------------------------------------------------------

def dense_tfidf(docs):
    """Straight transcription of tf * (ln((1+N)/(1+df)) + 1), then L2 normalization."""
    terms = sorted({t for d in docs for t in d})
    n = len(docs)
    df = {t: sum(1 for d in docs if t in d) for t in terms}
    rows = []
    for d in docs:
        tf = Counter(d)
        row = [tf[t] * (math.log((1 + n) / (1 + df[t])) + 1) for t in terms]
        norm = math.sqrt(sum(x * x for x in row))
        rows.append([x / norm for x in row] if norm > 0 else row)
    return terms, rows


def dense_similarity(vectors):
    """All-pairs dot products from a dense matrix, accumulated one term at a time."""
    n = len(vectors)
    dim = vectors[0].dim if vectors else 0
    w = np.zeros((n, dim))
    for i, v in enumerate(vectors):
        w[i, v.ids] = v.weights
    sims = np.zeros((n, n))
    for t in range(dim):
        sims += np.outer(w[:, t], w[:, t])
    return sims


def oracle_recommend_all(ids, vectors, profiles, ks, modes):
    """Rank -> truncate -> filter by brute force, for every (k, mode) pair at once."""
    sims = dense_similarity(vectors)
    ranked = {}
    for q, qid in enumerate(ids):
        cands = [(sims[q, j], ids[j]) for j in range(len(ids)) if j != q and sims[q, j] != 0.0]
        cands.sort(key=lambda c: (-c[0], c[1]))
        ranked[qid] = cands
    out = {}
    for k in ks:
        for mode in modes:
            lists = {}
            for qid, cands in ranked.items():
                if mode == FILTER_FIRST:
                    top = [c for c in cands if profiles[c[1]] == profiles[qid]][:k]
                elif mode == PAPER:
                    top = [c for c in cands[:k] if profiles[c[1]] == profiles[qid]]
                else:
                    top = cands[:k]
                lists[qid] = [(vid, float(s)) for s, vid in top]
            out[k, mode] = lists
    return out


def vectors_for(docs, options=None):
    """TF-IDF vectors through the library path; an empty vocabulary gives empty vectors."""
    options = options or PrepOptions.unfiltered()
    try:
        vocab = build_vocabulary(docs, options)
    except EmptyVocabularyError:
        return [SparseVector(np.zeros(0, np.int64), np.zeros(0), 0) for _ in docs]
    return tfidf_vectorize(count_vectorize(docs, vocab), vocab)


# -- random corpora -------------------------------------------------------------

def random_token_corpus(rng, n_docs, vocab_size, max_len=12, empty_rate=0.1):
    words = [f"w{i}" for i in range(vocab_size)]
    docs = []
    for _ in range(n_docs):
        if rng.random() < empty_rate:
            docs.append([])
            continue
        length = int(rng.integers(1, max_len + 1))
        docs.append([words[j] for j in rng.integers(0, vocab_size, size=length)])
    if not any(docs):
        docs[0] = [words[0]]
    return docs


def random_ids(rng, n):
    letters = np.array(list(string.ascii_letters + string.digits))
    ids = set()
    while len(ids) < n:
        ids.add("".join(rng.choice(letters, size=6)))
    ids = sorted(ids)
    rng.shuffle(ids)
    return ids


def random_profiles(rng, ids, n_topics=2):
    sentiments = ("positive", "neutral", "negative")
    return {vid: AttributeProfile(sentiments[int(rng.integers(0, 3))],
                                  "toxic" if rng.random() < 0.1 else "non_toxic",
                                  int(rng.integers(0, n_topics)))
            for vid in ids}


def planted_topic_corpus(seed, n_per=50, length=40, words_per_topic=10):
    """Two disjoint vocabularies; each document draws all its tokens from one of them."""
    rng = np.random.default_rng(seed)
    vocabs = ([f"a{i}" for i in range(words_per_topic)], [f"b{i}" for i in range(words_per_topic)])
    docs, labels = [], []
    for label, vocab in enumerate(vocabs):
        for _ in range(n_per):
            docs.append([vocab[j] for j in rng.integers(0, words_per_topic, size=length)])
            labels.append(label)
    return docs, np.array(labels)


def best_permutation_purity(assigned, labels):
    assigned = np.asarray(assigned)
    labels = np.asarray(labels)
    ks = sorted(set(assigned.tolist()) | set(labels.tolist()))
    best = 0.0
    for perm in permutations(ks):
        mapping = dict(zip(ks, perm))
        best = max(best, float(np.mean([mapping[a] == b for a, b in zip(assigned, labels)])))
    return best


MODES_UNDER_TEST = (PAPER, FILTER_FIRST, UNFILTERED)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
