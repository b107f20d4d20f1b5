"""Wall-clock scaling of vectorization and recommend_all with corpus size."""

import argparse
import time
from dataclasses import dataclass, field

from ytanalytics.corpus import Corpus
from ytanalytics.pipeline import PipelineConfig
from ytanalytics.simrec import AttributeProfile, Recommender, tfidf_vectorize
from ytanalytics.synth import SynthParams, generate_records
from ytanalytics.textprep import build_vocabulary, tokenize
from ytanalytics.topics import count_vectorize


@dataclass
class BenchConfig:
    sizes: list[int] = field(default_factory=lambda: [1000, 2500, 5000, 10000])
    k: int = 5
    mode: str = "paper"
    threads: int = 1
    seed: int = 8


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--sizes", type=int, nargs="+", default=BenchConfig().sizes)
    p.add_argument("--k", type=int, default=BenchConfig.k)
    p.add_argument("--mode", default=BenchConfig.mode)
    p.add_argument("--threads", type=int, default=BenchConfig.threads)
    p.add_argument("--seed", type=int, default=BenchConfig.seed)
    cfg = BenchConfig(**vars(p.parse_args()))

    print(f"{'n':>7} {'terms':>6} {'vectorize_s':>12} {'recommend_s':>12} {'per_query_ms':>13}")
    for n in cfg.sizes:
        records, labels = generate_records(SynthParams(n=n), seed=cfg.seed)
        corpus = Corpus(tuple(records))
        profiles = {lab.video_id: AttributeProfile(lab.sentiment, "toxic" if lab.toxic else "non_toxic",
                                                   lab.topic) for lab in labels}
        t0 = time.perf_counter()
        streams = [tokenize(r.combined_text) for r in corpus]
        vocab = build_vocabulary(streams, PipelineConfig().prep_options())
        vectors = tfidf_vectorize(count_vectorize(streams, vocab, corpus.ids), vocab)
        rec = Recommender(corpus.ids, vectors, profiles)
        t1 = time.perf_counter()
        rec.recommend_all(cfg.k, cfg.mode, cfg.threads)
        t2 = time.perf_counter()
        print(f"{n:>7} {len(vocab):>6} {t1 - t0:>12.2f} {t2 - t1:>12.2f} {1000 * (t2 - t1) / n:>13.3f}")


if __name__ == "__main__":
    main()
