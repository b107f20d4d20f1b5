"""Run the whole pipeline on a bundled corpus and print the headline numbers."""

import argparse
import json
from dataclasses import dataclass
from importlib import resources

from ytanalytics.pipeline import PipelineConfig, run_pipeline


@dataclass
class DemoConfig:
    corpus: str = "synthetic_500.csv"
    out: str = "out/demo"
    seed: int = 0


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--corpus", default=DemoConfig.corpus,
                   help="bundled file name (demo_corpus.csv, synthetic_500.csv) or a path")
    p.add_argument("--out", default=DemoConfig.out)
    p.add_argument("--seed", type=int, default=DemoConfig.seed)
    cfg = DemoConfig(**vars(p.parse_args()))

    bundled = resources.files("ytanalytics.data").joinpath(cfg.corpus)
    corpus = str(bundled) if bundled.is_file() else cfg.corpus
    report = run_pipeline(PipelineConfig(corpus=corpus, out=cfg.out, seed=cfg.seed))
    d = report.to_dict()
    summary = {
        "videos": d["corpus"]["videos"],
        "sentiment_pct": d["sentiment"]["percentages"],
        "toxic_pct": d["toxicity"]["percentages"]["toxic"],
        "k": d["topics"]["k"],
        "heldout_by_k": d["topics"]["selection"]["mean_heldout_loglik_per_word"]
        if d["topics"]["selection"] else None,
        "top_terms": d["topics"]["top_terms"],
        "coverage_by_size": d["coverage"]["by_size"],
        "monthly_range": [min(m["coverage"] for m in d["coverage"]["monthly"]),
                          max(m["coverage"] for m in d["coverage"]["monthly"])],
    }
    print(json.dumps(summary, indent=2))
    print("timings:", {k: round(v, 2) for k, v in report.timings.items()})


if __name__ == "__main__":
    main()
