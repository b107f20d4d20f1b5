"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import pipeline as pl
from .corpus import CorpusError, load_corpus, month_buckets, save_corpus
from .coverage import coverage_report
from .synth import SynthParams, generate_synthetic

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INVARIANT = 0, 1, 2, 3

log = logging.getLogger("ytanalytics")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return out


# flag -> (config key, argparse kwargs)
COMMON_FLAGS = {
    "--corpus": ("corpus", {"metavar": "PATH"}),
    "--strict": ("strict", {"action": "store_const", "const": True}),
    "--out": ("out", {"metavar": "DIR"}),
    "--seed": ("seed", {"type": int}),
    "--threads": ("threads", {"type": int}),
    "--min-df": ("min_df", {"type": int}),
    "--max-df": ("max_df", {"type": float}),
    "--stopwords": ("stopwords", {"metavar": "PATH"}),
    "--lexicon": ("lexicon", {"metavar": "PATH"}),
    "--sent-thresholds": ("sent_thresholds", {"type": _floats, "metavar": "POS,NEG"}),
    "--tox-scores": ("tox_scores", {"metavar": "PATH"}),
    "--tox-lexicon": ("tox_lexicon", {"metavar": "PATH"}),
    "--tox-threshold": ("tox_threshold", {"type": float}),
    "--topics": ("topics", {"metavar": "auto|K"}),
    "--topic-candidates": ("topic_candidates", {"type": _ints, "metavar": "LIST"}),
    "--folds": ("folds", {"type": int}),
    "--lda-iters": ("lda_iters", {"type": int}),
    "--lda-seed": ("seed", {"type": int, "dest": "lda_seed",
                            "help": "alias of --seed (all randomness derives from one seed)"}),
    "--lda-alpha": ("lda_alpha", {"type": float}),
    "--lda-beta": ("lda_beta", {"type": float}),
    "--heldout-sweeps": ("heldout_sweeps", {"type": int}),
    "--top-k": ("top_k", {"type": int}),
    "--ks": ("ks", {"type": _ints, "metavar": "LIST"}),
    "--filter-mode": ("filter_mode", {"choices": ["paper", "filter-first", "filter_first", "unfiltered"]}),
    "--monthly-scope": ("monthly_scope", {"choices": ["corpus", "within_month"]}),
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="JSON config file; flags override it")
    for flag, (key, kwargs) in COMMON_FLAGS.items():
        kwargs = dict(kwargs)
        kwargs.setdefault("dest", key)
        p.add_argument(flag, default=None, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ytanalytics", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "ingest": "validate the corpus and write a normalized copy",
        "analyze": "sentiment, toxicity and topics per video",
        "recommend": "filtered top-k recommendations",
        "coverage": "coverage metrics of a recommendation run",
        "run": "the whole pipeline",
    }
    for name, help_ in helps.items():
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        if name in ("recommend", "coverage"):
            p.add_argument("--profiles", metavar="PATH",
                           help="profiles.csv from 'analyze' (recomputed when absent)")
        if name == "coverage":
            p.add_argument("--recommendations", metavar="PATH",
                           help="recommendations.csv from 'recommend' at --top-k")
    s = sub.add_parser("synth", help="write a synthetic corpus with planted labels")
    s.add_argument("--output", required=True, metavar="PATH")
    s.add_argument("--n", type=int, default=SynthParams.n)
    s.add_argument("--n-topics", type=int, default=SynthParams.n_topics)
    s.add_argument("--sentiment-mix", type=_floats, default=list(SynthParams.sentiment_mix),
                   metavar="POS,NEU,NEG")
    s.add_argument("--toxic-fraction", type=float, default=SynthParams.toxic_fraction)
    s.add_argument("--mean-tokens", type=int, default=SynthParams.mean_tokens)
    s.add_argument("--tail-vocab", type=int, default=SynthParams.tail_vocab)
    s.add_argument("--seed", type=int, default=0)
    return parser


def _config(args: argparse.Namespace) -> pl.PipelineConfig:
    overrides = {key: getattr(args, key, None) for key in {k for k, _ in COMMON_FLAGS.values()}}
    if getattr(args, "lda_seed", None) is not None and overrides.get("seed") is None:
        overrides["seed"] = args.lda_seed
    config = pl.PipelineConfig.resolve(args.config, overrides)
    if config.corpus is None:
        raise UsageError("--corpus is required (flag or config file)")
    return config


def _echo_config(config: pl.PipelineConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "resolved_config.json").write_text(json.dumps(config.to_dict(), indent=2) + "\n",
                                              encoding="utf-8")
    return out


def _profiles(args, config, corpus, timings):
    if getattr(args, "profiles", None):
        profiles = pl.load_profiles(args.profiles)
        missing = [vid for vid in corpus.ids if vid not in profiles]
        if missing:
            raise pl.StageError("profiles", ValueError(f"{len(missing)} videos missing from {args.profiles}"))
        return profiles
    return pl.analyze(config, corpus, timings).profiles


def cmd_ingest(args) -> int:
    config = _config(args)
    corpus = load_corpus(config.corpus, strict=config.strict)
    out = _echo_config(config)
    save_corpus(corpus, out / "corpus.csv")
    summary = {"videos": len(corpus), "rejected_rows": [str(e) for e in corpus.rejected],
               "months": {f"{y:04d}-{m:02d}": len(ids) for (y, m), ids in month_buckets(corpus).items()}}
    (out / "ingest.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"{len(corpus)} videos loaded, {len(corpus.rejected)} rows rejected")
    return EXIT_OK


def cmd_analyze(args) -> int:
    config = _config(args)
    corpus = pl.ingest(config)
    out = _echo_config(config)
    report = pl.RunReport(config, len(corpus), len(corpus.rejected))
    report.analysis = pl.analyze(config, corpus, report.timings)
    pl.write_analysis(out, corpus, report.analysis, config)
    pl.write_report(out, report)
    print(json.dumps({k: report.to_dict()[k] for k in ("sentiment", "toxicity", "topics")}, indent=2))
    return EXIT_OK


def cmd_recommend(args) -> int:
    config = _config(args)
    corpus = pl.ingest(config)
    out = _echo_config(config)
    timings: dict[str, float] = {}
    profiles = _profiles(args, config, corpus, timings)
    recommender, _ = pl.build_recommender(config, corpus, profiles)
    rec_sets = recommender.recommend_all(config.top_k, config.filter_mode, config.threads)
    pl.write_recommendations(out / "recommendations.csv", rec_sets)
    print(f"{sum(len(s) for s in rec_sets.values())} recommendations for {len(rec_sets)} videos")
    return EXIT_OK


def cmd_coverage(args) -> int:
    config = _config(args)
    corpus = pl.ingest(config)
    out = _echo_config(config)
    timings: dict[str, float] = {}
    profiles = _profiles(args, config, corpus, timings)
    recommender, _ = pl.build_recommender(config, corpus, profiles)
    rec_sets = None
    if args.recommendations:
        rec_sets = pl.load_recommendations(args.recommendations, corpus.ids, config.top_k)
    report = coverage_report(recommender, month_buckets(corpus), corpus.ids, config.top_k,
                             config.ks, config.filter_mode, config.monthly_scope,
                             config.threads, rec_sets)
    pl.check_coverage(report)
    pl.write_coverage(out, report)
    run = pl.RunReport(config, len(corpus), len(corpus.rejected), coverage=report, timings=timings)
    pl.write_report(out, run)
    print(json.dumps(report.to_dict()["by_size"]), f"aggregate={report.aggregate:.4f}")
    return EXIT_OK


def cmd_run(args) -> int:
    config = _config(args)
    report = pl.run_pipeline(config)
    d = report.to_dict()
    print(f"{report.n_videos} videos -> {config.out}")
    print("sentiment %:", d["sentiment"]["percentages"])
    print("toxicity %:", d["toxicity"]["percentages"])
    print("topics: K =", d["topics"]["k"], "sizes", d["topics"]["videos_per_topic"])
    print("coverage: aggregate %.4f, by size %s" % (report.coverage.aggregate, d["coverage"]["by_size"]))
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        params = SynthParams(n=args.n, n_topics=args.n_topics,
                             sentiment_mix=tuple(args.sentiment_mix),  # type: ignore[arg-type]
                             toxic_fraction=args.toxic_fraction, mean_tokens=args.mean_tokens,
                             tail_vocab=args.tail_vocab)
        params.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    sidecar = generate_synthetic(args.output, params, args.seed)
    print(f"wrote {args.output} and {sidecar}")
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "analyze": cmd_analyze, "recommend": cmd_recommend,
            "coverage": cmd_coverage, "run": cmd_run, "synth": cmd_synth}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, pl.ConfigError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except pl.StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT if isinstance(exc.cause, pl.InvariantViolation) else EXIT_DATA
    except pl.InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (CorpusError, ValueError, KeyError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
