"""End-to-end pipeline: ingest, preprocess, sentiment, toxicity, topics,
vectorize, recommend, coverage.  Every artifact lands in one output directory.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping

import numpy as np

from . import sentiment as sent
from . import toxicity as tox
from .corpus import Corpus, load_corpus, month_buckets
from .coverage import CORPUS_SCOPE, WITHIN_MONTH_SCOPE, CoverageReport, coverage_report
from .simrec import FILTER_FIRST, MODES, PAPER, AttributeProfile, RecommendationSet, Recommender, tfidf_vectorize
from .textprep import PrepOptions, TokenStream, build_vocabulary, load_stopwords, tokenize
from .topics import (DEFAULT_CANDIDATES, LdaModel, TopicSelection, count_vectorize, fit_lda,
                     save_model, select_topic_count, top_terms)

log = logging.getLogger(__name__)

REPORT_FORMAT = "ytanalytics-report 1"


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class PipelineConfig:
    corpus: str | None = None
    strict: bool = False
    out: str = "out"
    seed: int = 0
    threads: int = 1
    min_df: int = 2
    max_df: float = 0.95
    stopwords: str | None = None
    lexicon: str | None = None
    sent_thresholds: tuple[float, float] = sent.DEFAULT_THRESHOLDS
    tox_scores: str | None = None
    tox_lexicon: str | None = None
    tox_threshold: float = tox.DEFAULT_THRESHOLD
    topics: str | int = "auto"
    topic_candidates: tuple[int, ...] = DEFAULT_CANDIDATES
    folds: int = 5
    lda_iters: int = 500
    heldout_sweeps: int = 50
    lda_alpha: float | None = None
    lda_beta: float = 0.01
    n_top_terms: int = 8
    top_k: int = 5
    ks: tuple[int, ...] = (1, 5, 10)
    filter_mode: str = PAPER
    monthly_scope: str = CORPUS_SCOPE

    def __post_init__(self):
        self.sent_thresholds = tuple(float(x) for x in self.sent_thresholds)  # type: ignore
        self.topic_candidates = tuple(int(x) for x in self.topic_candidates)
        self.ks = tuple(int(x) for x in self.ks)
        if self.filter_mode == "filter-first":
            self.filter_mode = FILTER_FIRST
        if isinstance(self.topics, str) and self.topics != "auto":
            try:
                self.topics = int(self.topics)
            except ValueError:
                raise ConfigError(f"topics must be 'auto' or an integer, got {self.topics!r}") from None
        self.validate()

    def validate(self) -> None:
        try:
            sent.check_thresholds(self.sent_thresholds)  # type: ignore[arg-type]
            tox.check_threshold(self.tox_threshold)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        checks = [
            (self.min_df >= 1, "min_df must be >= 1"),
            (0.0 < self.max_df <= 1.0, "max_df must be in (0, 1]"),
            (self.topics == "auto" or (isinstance(self.topics, int) and self.topics >= 1),
             "topics must be 'auto' or a positive integer"),
            (len(self.topic_candidates) > 0 and min(self.topic_candidates) >= 1,
             "topic_candidates must be positive integers"),
            (self.folds >= 2, "folds must be >= 2"),
            (self.lda_iters >= 1, "lda_iters must be >= 1"),
            (self.heldout_sweeps >= 1, "heldout_sweeps must be >= 1"),
            (self.top_k >= 1, "top_k must be >= 1"),
            (len(self.ks) > 0 and min(self.ks) >= 1, "ks must be positive integers"),
            (self.filter_mode in MODES, f"filter_mode must be one of {MODES}"),
            (self.monthly_scope in (CORPUS_SCOPE, WITHIN_MONTH_SCOPE),
             "monthly_scope must be 'corpus' or 'within_month'"),
            (self.threads >= 1, "threads must be >= 1"),
            (self.seed >= 0, "seed must be non-negative"),
            (self.n_top_terms >= 1, "n_top_terms must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "PipelineConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        try:
            return cls(**values)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def resolve(cls, config_file: str | Path | None = None,
                overrides: Mapping[str, Any] | None = None) -> "PipelineConfig":
        """Defaults, then the JSON config file, then explicit overrides."""
        values: dict[str, Any] = {}
        if config_file is not None:
            try:
                loaded = json.loads(Path(config_file).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config {config_file}: {exc}") from None
            if not isinstance(loaded, dict):
                raise ConfigError("config file must hold a JSON object")
            values.update(loaded)
        values.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_mapping(values)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        for key in ("sent_thresholds", "topic_candidates", "ks"):
            d[key] = list(d[key])
        return d

    def prep_options(self) -> PrepOptions:
        return PrepOptions(min_df=self.min_df, max_df=self.max_df,
                           stopwords=load_stopwords(self.stopwords))

    def stage_seeds(self) -> dict[str, int]:
        children = np.random.SeedSequence(self.seed).spawn(2)
        return {name: int(c.generate_state(1)[0]) for name, c in zip(("select", "fit"), children)}


@dataclass
class VideoScores:
    compound: float
    sentiment: str
    toxicity_score: float
    toxicity: str
    topic: int

    @property
    def profile(self) -> AttributeProfile:
        return AttributeProfile(self.sentiment, self.toxicity, self.topic)


@dataclass
class Analysis:
    scores: dict[str, VideoScores]
    sentiment: sent.Distribution
    toxicity: tox.Distribution
    model: LdaModel
    selection: TopicSelection | None
    toxicity_source: dict[str, int]

    @property
    def profiles(self) -> dict[str, AttributeProfile]:
        return {vid: s.profile for vid, s in self.scores.items()}

    def topic_sizes(self) -> list[int]:
        sizes = [0] * self.model.k
        for s in self.scores.values():
            sizes[s.topic] += 1
        return sizes


@dataclass
class RunReport:
    config: PipelineConfig
    n_videos: int
    n_rejected: int
    analysis: Analysis | None = None
    coverage: CoverageReport | None = None
    n_terms: int | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        """Deterministic content of ``report.json`` (timings are kept out of it)."""
        # output location and worker count do not influence results
        config = {k: v for k, v in self.config.to_dict().items() if k not in ("out", "threads")}
        out: dict[str, Any] = {"format": REPORT_FORMAT, "config": config,
                               "corpus": {"videos": self.n_videos, "rejected_rows": self.n_rejected}}
        a = self.analysis
        if a is not None:
            out["sentiment"] = a.sentiment.to_dict()
            out["toxicity"] = {**a.toxicity.to_dict(), "threshold": self.config.tox_threshold,
                               "score_source": a.toxicity_source}
            sizes = a.topic_sizes()
            out["topics"] = {
                "k": a.model.k,
                "selection": None if a.selection is None else {
                    "best_k": a.selection.best_k,
                    "mean_heldout_loglik_per_word": {str(k): v for k, v in a.selection.table()},
                },
                "videos_per_topic": sizes,
                "top_terms": [[t for t, _ in top_terms(a.model, k, self.config.n_top_terms)]
                              for k in range(a.model.k)],
            }
        if self.n_terms is not None:
            out["tfidf_terms"] = self.n_terms
        if self.coverage is not None:
            out["coverage"] = self.coverage.to_dict()
        return out


@contextmanager
def _stage(name: str, timings: dict[str, float]) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except (ValueError, KeyError, OSError, InvariantViolation) as exc:
        raise StageError(name, exc) from exc
    finally:
        timings[name] = time.perf_counter() - start
    log.info("stage %s done in %.2fs", name, timings[name])


def ingest(config: PipelineConfig) -> Corpus:
    if config.corpus is None:
        raise ConfigError("no corpus given")
    return load_corpus(config.corpus, strict=config.strict)


def analyze(config: PipelineConfig, corpus: Corpus,
            timings: dict[str, float] | None = None) -> Analysis:
    """Sentiment, toxicity and topic assignment for every video."""
    timings = {} if timings is None else timings
    ids = corpus.ids
    with _stage("preprocess", timings):
        streams = [tokenize(r.description) for r in corpus]
    with _stage("sentiment", timings):
        lexicon = sent.load_lexicon(config.lexicon)
        compounds = [sent.score_compound(s, lexicon) for s in streams]
        sent_classes = [sent.classify_sentiment(c, config.sent_thresholds) for c in compounds]
        sent_dist = sent.sentiment_distribution(sent_classes)
    with _stage("toxicity", timings):
        tox_scores, source = _toxicity_scores(config, corpus, streams)
        tox_classes = [tox.classify_toxicity(s, config.tox_threshold) for s in tox_scores]
        tox_dist = tox.toxicity_distribution(tox_classes)
    with _stage("topics", timings):
        model, selection = _fit_topics(config, ids, streams)
        dominant = [int(t) for t in model.dominant_topics()]
    scores = {vid: VideoScores(c, sc, ts, tc, t) for vid, c, sc, ts, tc, t
              in zip(ids, compounds, sent_classes, tox_scores, tox_classes, dominant)}
    analysis = Analysis(scores, sent_dist, tox_dist, model, selection, source)
    with _stage("check-analysis", timings):
        for name, dist in (("sentiment", sent_dist), ("toxicity", tox_dist)):
            if dist.total != len(corpus):
                raise InvariantViolation(f"{name} counts sum to {dist.total}, corpus has {len(corpus)}")
        if sum(analysis.topic_sizes()) != len(corpus):
            raise InvariantViolation("topic sizes do not sum to the corpus size")
    return analysis


def _toxicity_scores(config: PipelineConfig, corpus: Corpus,
                     streams: list[TokenStream]) -> tuple[list[float], dict[str, int]]:
    external: dict[str, float] = {}
    if config.tox_scores is not None:
        external = tox.load_external_scores(config.tox_scores, known_ids=corpus.index)
    lexicon = tox.load_toxicity_lexicon(config.tox_lexicon) if len(external) < len(corpus) else None
    scores, n_ext = [], 0
    for rec, stream in zip(corpus, streams):
        if rec.video_id in external:
            scores.append(external[rec.video_id])
            n_ext += 1
        else:
            scores.append(tox.score_toxicity_lexicon(stream, lexicon))
    if external and n_ext < len(corpus):
        log.warning("%d videos lack an external toxicity score; lexicon baseline used for them",
                    len(corpus) - n_ext)
    return scores, {"external": n_ext, "lexicon": len(corpus) - n_ext}


def _fit_topics(config: PipelineConfig, ids: list[str],
                streams: list[TokenStream]) -> tuple[LdaModel, TopicSelection | None]:
    vocab = build_vocabulary(streams, config.prep_options())
    matrix = count_vectorize(streams, vocab, ids)
    seeds = config.stage_seeds()
    selection = None
    if config.topics == "auto":
        selection = select_topic_count(matrix, config.topic_candidates, config.folds,
                                       seeds["select"], config.lda_alpha, config.lda_beta,
                                       config.lda_iters, config.heldout_sweeps, config.threads)
        k = selection.best_k
    else:
        k = int(config.topics)
    model = fit_lda(matrix, k, config.lda_alpha, config.lda_beta, config.lda_iters, seeds["fit"])
    return model, selection


def build_recommender(config: PipelineConfig, corpus: Corpus,
                      profiles: Mapping[str, AttributeProfile] | None) -> tuple[Recommender, int]:
    streams = [tokenize(r.combined_text) for r in corpus]
    vocab = build_vocabulary(streams, config.prep_options())
    vectors = tfidf_vectorize(count_vectorize(streams, vocab, corpus.ids), vocab)
    return Recommender(corpus.ids, vectors, profiles), len(vocab)


def check_coverage(report: CoverageReport) -> None:
    values = [report.aggregate, *report.monthly.values(), *report.by_size.values(),
              *(c for _, c in report.cumulative)]
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise InvariantViolation("coverage value outside [0, 1]")
    if report.cumulative and report.cumulative[-1][1] != report.aggregate:
        raise InvariantViolation("final cumulative coverage differs from aggregate coverage")
    sizes = [report.by_size[k] for k in sorted(report.by_size)]
    if any(b < a for a, b in zip(sizes, sizes[1:])):
        raise InvariantViolation("coverage decreases with recommendation size")
    if report.scope == CORPUS_SCOPE and report.monthly_counts:
        if report.weighted_monthly_mean() * report.n_videos != report.n_recommended:
            raise InvariantViolation("monthly coverage does not average to aggregate coverage")


def recommend_and_cover(config: PipelineConfig, corpus: Corpus,
                        profiles: Mapping[str, AttributeProfile],
                        timings: dict[str, float]) -> tuple[dict[str, RecommendationSet], CoverageReport, int]:
    with _stage("vectorize", timings):
        recommender, n_terms = build_recommender(config, corpus, profiles)
    with _stage("recommend", timings):
        rec_sets = recommender.recommend_all(config.top_k, config.filter_mode, config.threads)
    with _stage("coverage", timings):
        report = coverage_report(recommender, month_buckets(corpus), corpus.ids, config.top_k,
                                 config.ks, config.filter_mode, config.monthly_scope,
                                 config.threads, rec_sets)
        check_coverage(report)
    return rec_sets, report, n_terms


def run_pipeline(config: PipelineConfig, write: bool = True) -> RunReport:
    timings: dict[str, float] = {}
    with _stage("ingest", timings):
        corpus = ingest(config)
    report = RunReport(config, len(corpus), len(corpus.rejected), timings=timings)
    report.analysis = analyze(config, corpus, timings)
    rec_sets, report.coverage, report.n_terms = recommend_and_cover(
        config, corpus, report.analysis.profiles, timings)
    if write:
        with _stage("write", timings):
            out = Path(config.out)
            write_analysis(out, corpus, report.analysis, config)
            write_recommendations(out / "recommendations.csv", rec_sets)
            write_coverage(out, report.coverage)
            write_report(out, report)
    return report


# -- artifact writers and readers ---------------------------------------------

def _writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = path.open("w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def write_report(out: Path, report: RunReport) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    (out / "resolved_config.json").write_text(
        json.dumps(report.config.to_dict(), indent=2) + "\n", encoding="utf-8")
    (out / "timings.json").write_text(json.dumps(report.timings, indent=2) + "\n", encoding="utf-8")


def write_analysis(out: Path, corpus: Corpus, analysis: Analysis, config: PipelineConfig) -> None:
    fh, w = _writer(out / "profiles.csv")
    with fh:
        w.writerow(["video_id", "publish_date", "sentiment_compound", "sentiment",
                    "toxicity_score", "toxicity", "topic"])
        for rec in corpus:
            s = analysis.scores[rec.video_id]
            w.writerow([rec.video_id, rec.publish_date.isoformat(), repr(s.compound), s.sentiment,
                        repr(s.toxicity_score), s.toxicity, s.topic])
    fh, w = _writer(out / "topics_top_terms.csv")
    with fh:
        w.writerow(["topic", "rank", "term", "weight"])
        for k in range(analysis.model.k):
            for rank, (term, weight) in enumerate(top_terms(analysis.model, k, config.n_top_terms), 1):
                w.writerow([k, rank, term, repr(weight)])
    if analysis.selection is not None:
        fh, w = _writer(out / "topic_selection.csv")
        with fh:
            w.writerow(["k", "mean_heldout_loglik_per_word", "fold_scores"])
            for k, score in analysis.selection.table():
                w.writerow([k, repr(score), " ".join(repr(s) for s in analysis.selection.fold_scores[k])])
    save_model(analysis.model, out / "lda_model.txt")


def load_profiles(path: str | Path) -> dict[str, AttributeProfile]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return {row["video_id"]: AttributeProfile(row["sentiment"], row["toxicity"], int(row["topic"]))
                for row in csv.DictReader(fh)}


def write_recommendations(path: Path, rec_sets: Mapping[str, RecommendationSet]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["query_id", "rank", "rec_id", "similarity"])
        for q, rs in rec_sets.items():
            for rank, (vid, sim) in enumerate(rs.items, 1):
                w.writerow([q, rank, vid, repr(sim)])


def load_recommendations(path: str | Path, ids: list[str], k: int) -> dict[str, RecommendationSet]:
    items: dict[str, list[tuple[int, str, float]]] = {vid: [] for vid in ids}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["query_id"] not in items:
                raise ValueError(f"recommendation for unknown video {row['query_id']!r}")
            items[row["query_id"]].append((int(row["rank"]), row["rec_id"], float(row["similarity"])))
    return {vid: RecommendationSet(vid, tuple((r, s) for _, r, s in sorted(v)), k)
            for vid, v in items.items()}


def write_coverage(out: Path, report: CoverageReport) -> None:
    fh, w = _writer(out / "coverage_by_size.csv")
    with fh:
        w.writerow(["k", "coverage"])
        for k, v in report.by_size.items():
            w.writerow([k, repr(v)])
    fh, w = _writer(out / "coverage_monthly.csv")
    with fh:
        w.writerow(["month", "videos", "recommended", "coverage"])
        for (y, m), v in report.monthly.items():
            r, n = report.monthly_counts[(y, m)]
            w.writerow([f"{y:04d}-{m:02d}", n, r, repr(v)])
    fh, w = _writer(out / "coverage_cumulative.csv")
    with fh:
        w.writerow(["processed", "coverage"])
        for i, v in report.cumulative:
            w.writerow([i, repr(v)])
