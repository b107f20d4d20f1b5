"""How the document-topic prior affects held-out topic-count selection.

For each alpha rule and seed, run cross-validated selection on a planted
corpus and report the chosen K.  Used to pick the default prior.
"""

import argparse
from dataclasses import dataclass, field

import numpy as np

from ytanalytics.corpus import Corpus
from ytanalytics.synth import SynthParams, generate_records
from ytanalytics.textprep import PrepOptions, build_vocabulary, tokenize
from ytanalytics.topics import count_vectorize, select_topic_count

RULES = {
    "50/K": lambda k: 50.0 / k,
    "1/K": lambda k: 1.0 / k,
    "0.5": lambda k: 0.5,
    "0.1": lambda k: 0.1,
}


@dataclass
class StudyConfig:
    n: int = 300
    planted_topics: int = 2
    seeds: list[int] = field(default_factory=lambda: [0, 1, 2, 3, 4])
    candidates: list[int] = field(default_factory=lambda: list(range(1, 7)))
    iterations: int = 300


def select_with_rule(matrix, rule, cfg, seed):
    # the prior may depend on K, so each candidate is scored on its own
    scores = {}
    for k in cfg.candidates:
        sel = select_topic_count(matrix, [k], seed=seed, alpha=RULES[rule](k),
                                 iterations=cfg.iterations)
        scores[k] = sel.scores[k]
    return max(cfg.candidates, key=lambda k: (scores[k], -k)), scores


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=StudyConfig.n)
    p.add_argument("--planted-topics", type=int, default=StudyConfig.planted_topics)
    p.add_argument("--seeds", type=int, nargs="+", default=StudyConfig().seeds)
    p.add_argument("--iterations", type=int, default=StudyConfig.iterations)
    args = p.parse_args()
    cfg = StudyConfig(n=args.n, planted_topics=args.planted_topics, seeds=args.seeds,
                      iterations=args.iterations)

    for rule in RULES:
        picks = []
        for seed in cfg.seeds:
            records, _ = generate_records(SynthParams(n=cfg.n, n_topics=cfg.planted_topics), seed=seed)
            streams = [tokenize(r.description) for r in Corpus(tuple(records))]
            vocab = build_vocabulary(streams, PrepOptions())
            best, _ = select_with_rule(count_vectorize(streams, vocab), rule, cfg, seed)
            picks.append(best)
        hits = int(np.sum(np.array(picks) == cfg.planted_topics))
        print(f"alpha={rule:>5}: chosen K per seed {picks}  ({hits}/{len(picks)} correct)")


if __name__ == "__main__":
    main()
