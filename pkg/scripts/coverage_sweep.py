"""Coverage against list size for each filter mode, over several synthetic corpora.

Writes one CSV row per (seed, mode, k).  Profiles come from the full analysis
(sentiment, toxicity, LDA topic), so the filter acts on estimated labels.
"""

import argparse
import csv
import sys
from dataclasses import dataclass, field

from ytanalytics import pipeline as pl
from ytanalytics.corpus import Corpus
from ytanalytics.coverage import coverage_by_size
from ytanalytics.simrec import MODES
from ytanalytics.synth import SynthParams, generate_records


@dataclass
class SweepConfig:
    n: int = 300
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    ks: list[int] = field(default_factory=lambda: list(range(1, 11)))
    topics: str = "auto"


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=SweepConfig.n)
    p.add_argument("--seeds", type=int, nargs="+", default=SweepConfig().seeds)
    p.add_argument("--ks", type=int, nargs="+", default=SweepConfig().ks)
    p.add_argument("--topics", default=SweepConfig.topics, help="'auto' or a fixed K")
    cfg = SweepConfig(**vars(p.parse_args()))

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["seed", "k_topics", "mode", "k", "coverage"])
    for seed in cfg.seeds:
        records, _ = generate_records(SynthParams(n=cfg.n), seed=seed)
        corpus = Corpus(tuple(records))
        config = pl.PipelineConfig(seed=seed, topics=cfg.topics)
        analysis = pl.analyze(config, corpus)
        rec, _ = pl.build_recommender(config, corpus, analysis.profiles)
        for mode in MODES:
            for k, value in coverage_by_size(rec, cfg.ks, mode).items():
                w.writerow([seed, analysis.model.k, mode, k, f"{value:.4f}"])


if __name__ == "__main__":
    main()
