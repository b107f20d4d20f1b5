from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import planted_topic_corpus
from ytanalytics.textprep import PrepOptions, build_vocabulary
from ytanalytics.topics import (LdaModel, count_vectorize, dominant_topic, fit_lda, fold_assignment,
                                heldout_log_likelihood, load_model, save_model, select_topic_count,
                                top_terms)


def _matrix(docs):
    return count_vectorize(docs, build_vocabulary(docs, PrepOptions.unfiltered()))


def _model_with_theta(theta):
    theta = np.asarray(theta, dtype=float)
    k = theta.shape[1]
    return LdaModel(k, np.full((k, 1), 1.0), theta, 0.5, 0.01, 0, 1, ("x",),
                    tuple(str(i) for i in range(theta.shape[0])))


def test_count_vectorize_examples():
    vocab = build_vocabulary([["a"], ["b"], ["c"]], PrepOptions.unfiltered())
    m = count_vectorize([["b", "b", "c"], [], ["zzz"]], vocab, ["d1", "d2", "d3"])
    assert m.counts.toarray().tolist() == [[0, 2, 1], [0, 0, 0], [0, 0, 0]]
    assert m.row_ids == ("d1", "d2", "d3") and m.terms == ("a", "b", "c")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.sampled_from("pqrstuvw"), max_size=10), min_size=1, max_size=25))
def test_count_vectorize_matches_tally(docs):
    vocab = build_vocabulary(docs + [["p"]], PrepOptions.unfiltered())
    dense = count_vectorize(docs, vocab).counts.toarray()
    for row, doc in zip(dense, docs):
        tally = Counter(doc)
        assert row.tolist() == [tally[t] for t in vocab.terms]


def test_single_topic_degenerate_case():
    docs = [["a", "b", "b"], ["b", "c"], ["c", "c", "c", "a"]]
    m = _matrix(docs)
    model = fit_lda(m, 1, iterations=5, seed=3)
    assert np.array_equal(model.theta, np.ones((3, 1)))
    totals = m.counts.toarray().sum(axis=0)
    expected = (totals + model.beta) / (totals.sum() + len(totals) * model.beta)
    assert np.allclose(model.phi[0], expected, rtol=0, atol=1e-15)


def test_fit_is_bit_reproducible():
    docs, _ = planted_topic_corpus(1, n_per=20)
    m = _matrix(docs)
    a = fit_lda(m, 3, iterations=50, seed=9)
    b = fit_lda(m, 3, iterations=50, seed=9)
    c = fit_lda(m, 3, iterations=50, seed=10)
    assert np.array_equal(a.phi, b.phi) and np.array_equal(a.theta, b.theta)
    assert not np.array_equal(a.theta, c.theta)


def test_fit_errors():
    m = _matrix([["a", "b"], ["b"]])
    with pytest.raises(ValueError):
        fit_lda(m, 0)
    with pytest.raises(ValueError):
        fit_lda(m, 4)
    with pytest.raises(ValueError):
        fit_lda(m, 1, iterations=0)
    empty = count_vectorize([[], []], build_vocabulary([["a"]], PrepOptions.unfiltered()))
    with pytest.raises(ValueError):
        fit_lda(empty, 1)


def test_dominant_topic_tie_rule():
    model = _model_with_theta([[0.7, 0.3], [0.5, 0.5], [0.2, 0.8]])
    assert [dominant_topic(model, d) for d in range(3)] == [0, 0, 1]
    assert model.dominant_topics().tolist() == [0, 0, 1]


def test_top_terms_examples():
    m = _matrix([["b", "b", "b", "a"]])
    model = fit_lda(m, 1, iterations=3)
    assert [t for t, _ in top_terms(model, 0, 1)] == ["b"]
    assert [t for t, _ in top_terms(model, 0, 10)] == ["b", "a"]
    with pytest.raises(ValueError):
        top_terms(model, 1)


def test_planted_top_terms_come_from_one_vocabulary():
    docs, _ = planted_topic_corpus(4)
    model = fit_lda(_matrix(docs), 2, seed=4)
    prefixes = [{t[0] for t, _ in top_terms(model, k, 8)} for k in range(2)]
    assert all(len(p) == 1 for p in prefixes) and prefixes[0] != prefixes[1]


def test_select_single_candidate_is_reproducible():
    docs, _ = planted_topic_corpus(2, n_per=10)
    m = _matrix(docs)
    sel = select_topic_count(m, [3], folds=2, iterations=20, heldout_sweeps=5)
    assert sel.best_k == 3 and set(sel.scores) == {3} and len(sel.fold_scores[3]) == 2
    again = select_topic_count(m, [3], folds=2, iterations=20, heldout_sweeps=5)
    assert again.scores == sel.scores
    with pytest.raises(ValueError):
        select_topic_count(m, [])


def test_threads_do_not_change_selection():
    docs, _ = planted_topic_corpus(3, n_per=15)
    m = _matrix(docs)
    kw = dict(candidates=[1, 2, 3], folds=3, iterations=40, heldout_sweeps=10, seed=5)
    assert select_topic_count(m, threads=1, **kw) == select_topic_count(m, threads=3, **kw)


def test_fold_assignment_partitions():
    parts = fold_assignment(23, 5, seed=1)
    assert sorted(np.concatenate(parts).tolist()) == list(range(23))
    assert {len(p) for p in parts} <= {4, 5}
    with pytest.raises(ValueError):
        fold_assignment(3, 5, seed=1)


def test_heldout_prefers_the_right_phi():
    docs, _ = planted_topic_corpus(6)
    m = _matrix(docs)
    good = fit_lda(m, 2, seed=1)
    flat = np.full_like(good.phi, 1.0 / good.phi.shape[1])
    assert heldout_log_likelihood(good.phi, m, 0.5) > heldout_log_likelihood(flat, m, 0.5)


def test_model_roundtrip(tmp_path):
    docs, _ = planted_topic_corpus(5, n_per=8)
    model = fit_lda(_matrix(docs), 2, iterations=30, seed=2)
    path = tmp_path / "model.txt"
    save_model(model, path)
    back = load_model(path)
    assert back.k == 2 and back.terms == model.terms and back.row_ids == model.row_ids
    assert np.array_equal(back.phi, model.phi) and np.array_equal(back.theta, model.theta)
    (tmp_path / "junk.txt").write_text("hello\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_model(tmp_path / "junk.txt")
