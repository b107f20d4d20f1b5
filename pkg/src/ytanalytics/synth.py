"""Synthetic video corpora with planted topics, sentiment and toxicity.

Each description token comes from the video's own topic vocabulary with
probability ``topic_share`` and otherwise from another topic's vocabulary, so
topics overlap without a shared background component (which a topic model
would pick up as an extra topic).  Every vocabulary is a small core of
frequent words plus a Zipf-weighted tail.
Positive/negative videos get a few lexicon words of the right polarity and
toxic videos get enough toxic terms to cross the default 0.5 threshold.
The planted labels are written to a ``<stem>.truth.csv`` sidecar.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import VideoRecord, save_corpus
from .sentiment import NEGATIVE, NEUTRAL, POSITIVE, load_lexicon
from .toxicity import load_toxicity_lexicon

TOPIC_CORES = (
    "covid coronavirus health pandemic vaccine virus symptoms doctor hospital booster "
    "variant infection immunity omicron masks testing patients medicine research cases "
    "people world data information community".split(),
    "news channel live update breaking report headlines today broadcast anchor press "
    "coverage bulletin reporter studio stream watch interview minister government "
    "video week daily latest episode".split(),
)
POSITIVE_WORDS = ("good great happy love hope excellent wonderful helpful thank support safe "
                  "better best glad").split()
NEGATIVE_WORDS = ("bad sad terrible death fear crisis worst pain loss danger tragic sick "
                  "worry dead awful").split()
CATEGORIES = ("News & Politics", "People & Blogs", "Education", "Science & Technology",
              "Entertainment")


@dataclass(frozen=True)
class SynthParams:
    n: int = 500
    n_topics: int = 2
    sentiment_mix: tuple[float, float, float] = (0.5, 0.35, 0.15)
    toxic_fraction: float = 0.01
    mean_tokens: int = 40
    tail_vocab: int = 200
    topic_share: float = 0.8
    start: dt.date = dt.date(2023, 1, 1)
    end: dt.date = dt.date(2024, 10, 25)

    def validate(self) -> None:
        if self.n < 0:
            raise ValueError(f"n must be >= 0, got {self.n}")
        if self.n_topics < 1:
            raise ValueError(f"n_topics must be >= 1, got {self.n_topics}")
        mix = self.sentiment_mix
        if len(mix) != 3 or min(mix) < 0 or abs(sum(mix) - 1.0) > 1e-9:
            raise ValueError(f"sentiment_mix must be 3 non-negative shares summing to 1, got {mix}")
        if not 0.0 <= self.toxic_fraction <= 1.0:
            raise ValueError(f"toxic_fraction must be in [0, 1], got {self.toxic_fraction}")
        if self.mean_tokens < 1:
            raise ValueError(f"mean_tokens must be >= 1, got {self.mean_tokens}")
        if self.tail_vocab < 0:
            raise ValueError(f"tail_vocab must be >= 0, got {self.tail_vocab}")
        if not 0.0 <= self.topic_share <= 1.0:
            raise ValueError(f"topic_share must be in [0, 1], got {self.topic_share}")
        if self.end < self.start:
            raise ValueError("end date precedes start date")


@dataclass(frozen=True)
class PlantedLabels:
    video_id: str
    topic: int
    sentiment: str
    toxic: bool


class _Pool:
    def __init__(self, core: list[str], tail: list[str]):
        self.words = np.array(core + tail, dtype=object)
        core_w = np.full(len(core), 1.0)
        tail_w = 1.0 / np.arange(1, len(tail) + 1) ** 1.1 if tail else np.zeros(0)
        # the whole tail carries a quarter of the pool's mass
        if len(tail):
            tail_w = tail_w / tail_w.sum() * (len(core) / 3.0)
        w = np.concatenate([core_w, tail_w])
        self.p = w / w.sum()

    def draw(self, rng: np.random.Generator, size: int) -> list[str]:
        return list(self.words[rng.choice(self.words.size, size=size, p=self.p)])


def _topic_pool(t: int, tail: int) -> _Pool:
    core = TOPIC_CORES[t] if t < len(TOPIC_CORES) else [f"topic{t}word{j}" for j in range(25)]
    return _Pool(list(core), [f"t{t}x{j}" for j in range(tail)])


def _toxic_terms() -> list[str]:
    valences = load_lexicon().valences
    weights = load_toxicity_lexicon().weights
    return sorted(t for t, w in weights.items() if w >= 1.0 and t not in valences)


def truth_path(corpus_path: str | Path) -> Path:
    p = Path(corpus_path)
    return p.with_name(p.stem + ".truth.csv")


def generate_records(params: SynthParams, seed: int) -> tuple[list[VideoRecord], list[PlantedLabels]]:
    params.validate()
    rng = np.random.default_rng(seed)
    n = params.n
    topic_pools = [_topic_pool(t, params.tail_vocab) for t in range(params.n_topics)]
    toxic_terms = _toxic_terms()

    topics = rng.integers(0, params.n_topics, size=n)
    sentiments = rng.choice(np.array([POSITIVE, NEUTRAL, NEGATIVE], dtype=object), size=n,
                            p=np.asarray(params.sentiment_mix, dtype=float))
    n_toxic = int(round(n * params.toxic_fraction))
    toxic = np.zeros(n, dtype=bool)
    toxic[rng.permutation(n)[:n_toxic]] = True
    span = (params.end - params.start).days
    offsets = rng.integers(0, span + 1, size=n)

    records, labels = [], []
    for i in range(n):
        vid = f"syn{i:06d}"
        t = int(topics[i])
        length = max(3, int(rng.poisson(params.mean_tokens)))
        n_own = length if params.n_topics == 1 else int((rng.random(length) < params.topic_share).sum())
        words = topic_pools[t].draw(rng, n_own)
        for _ in range(length - n_own):
            other = (t + 1 + int(rng.integers(0, params.n_topics - 1))) % params.n_topics
            words += topic_pools[other].draw(rng, 1)
        words = [words[j] for j in rng.permutation(len(words))]
        title = topic_pools[t].draw(rng, int(rng.integers(3, 7)))

        extra: list[str] = []
        if sentiments[i] == POSITIVE:
            extra += list(rng.choice(POSITIVE_WORDS, size=int(rng.integers(2, 4))))
        elif sentiments[i] == NEGATIVE:
            extra += list(rng.choice(NEGATIVE_WORDS, size=int(rng.integers(2, 4))))
        if toxic[i]:
            extra += list(rng.choice(toxic_terms, size=2, replace=False))
        for w in extra:
            words.insert(int(rng.integers(0, len(words) + 1)), w)

        description = " ".join(words).capitalize() + "."
        records.append(VideoRecord(
            video_id=vid,
            url=f"https://www.youtube.com/watch?v={vid}",
            title=" ".join(title).title(),
            description=description,
            publish_date=params.start + dt.timedelta(days=int(offsets[i])),
            view_count=int(rng.integers(0, 100_000)),
            like_count=int(rng.integers(0, 2_000)),
            comment_count=int(rng.integers(1, 300)),
            duration_seconds=int(rng.integers(0, 3_600)),
            categories=(CATEGORIES[int(rng.integers(0, len(CATEGORIES)))],),
            tags=tuple(sorted(set(title[:3]))),
            language="en",
        ))
        labels.append(PlantedLabels(vid, t, str(sentiments[i]), bool(toxic[i])))
    return records, labels


def generate_synthetic(path: str | Path, params: SynthParams | None = None, seed: int = 0) -> Path:
    """Write a corpus file and its ``.truth.csv`` sidecar; returns the sidecar path."""
    params = params or SynthParams()
    records, labels = generate_records(params, seed)
    save_corpus(records, path)
    sidecar = truth_path(path)
    with sidecar.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["video_id", "topic", "sentiment", "toxic"])
        for lab in labels:
            writer.writerow([lab.video_id, lab.topic, lab.sentiment, int(lab.toxic)])
    return sidecar


def load_truth(path: str | Path) -> dict[str, PlantedLabels]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return {row["video_id"]: PlantedLabels(row["video_id"], int(row["topic"]), row["sentiment"],
                                               row["toxic"] == "1")
                for row in csv.DictReader(fh)}
