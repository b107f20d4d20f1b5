"""Rule-based lexicon sentiment scoring (VADER-style heuristics).

Only the tokens that matter to the rules -- lexicon terms, boosters and
negators -- take part in the modifier windows and in the mixed-case check,
so inserting unrelated words never changes a score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .textprep import TokenStream

ALPHA = 15.0
NEGATION_SCALAR = -0.74
BOOSTER_INCR = 0.293
BOOSTER_DECR = -0.293
CAPS_INCR = 0.733
EXCLAIM_INCR = 0.292
EXCLAIM_MAX = 4
WINDOW = 3
# booster influence fades with distance from the modified term
DISTANCE_SCALE = (1.0, 0.95, 0.9)

POSITIVE, NEUTRAL, NEGATIVE = "positive", "neutral", "negative"
CLASSES = (POSITIVE, NEUTRAL, NEGATIVE)
DEFAULT_THRESHOLDS = (0.05, -0.05)

NEGATORS = frozenset("""
aint arent cannot cant couldnt darent didnt doesnt ain't aren't can't couldn't
daren't didn't doesn't dont hadnt hasnt havent isnt mightnt mustnt neither don't
hadn't hasn't haven't isn't mightn't mustn't neednt needn't never none nope nor
not nothing nowhere oughtnt shant shouldnt uhuh wasnt werent oughtn't shan't
shouldn't uh-uh wasn't weren't without wont wouldnt won't wouldn't rarely seldom
despite
""".split())

_UP = """
absolutely amazingly awfully completely considerable considerably decidedly deeply
enormous enormously entirely especially exceptional exceptionally extreme extremely
fabulously flipping fully greatly hella highly hugely incredible incredibly
intensely major majorly more most particularly purely quite really remarkably so
substantially thoroughly total totally tremendous tremendously uber unbelievably
unusually utter utterly very
""".split()
_DOWN = """
almost barely hardly kinda kindof kind-of less little marginal marginally occasional
occasionally partly scarce scarcely slight slightly somewhat sorta sortof sort-of
""".split()
BOOSTERS = {**{w: BOOSTER_INCR for w in _UP}, **{w: BOOSTER_DECR for w in _DOWN}}


@dataclass(frozen=True)
class SentimentLexicon:
    valences: Mapping[str, float]
    boosters: Mapping[str, float] = field(default_factory=lambda: dict(BOOSTERS))
    negators: frozenset[str] = NEGATORS

    def __post_init__(self):
        for term, v in self.valences.items():
            if not -4.0 <= v <= 4.0:
                raise ValueError(f"valence of {term!r} out of [-4, 4]: {v}")
        for term, inc in self.boosters.items():
            if not (math.isfinite(inc) and abs(inc) < 1.0):
                raise ValueError(f"booster increment of {term!r} must satisfy |x| < 1: {inc}")

    def mirrored(self) -> "SentimentLexicon":
        """Same lexicon with every valence sign flipped."""
        return SentimentLexicon({t: -v for t, v in self.valences.items()},
                                self.boosters, self.negators)

    def is_relevant(self, token: str) -> bool:
        return token in self.valences or token in self.boosters or token in self.negators


def read_term_table(path: str | Path | None, default: str) -> dict[str, float]:
    """Parse ``term<TAB>number`` lines; '#' starts a comment line."""
    if path is None:
        text = resources.files("ytanalytics.data").joinpath(default).read_text("utf-8")
        source = default
    else:
        text = Path(path).read_text("utf-8")
        source = str(path)
    table: dict[str, float] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"{source}:{lineno}: expected term<TAB>value")
        try:
            table[parts[0].strip()] = float(parts[1])
        except ValueError:
            raise ValueError(f"{source}:{lineno}: bad number {parts[1]!r}") from None
    return table


def load_lexicon(path: str | Path | None = None) -> SentimentLexicon:
    return SentimentLexicon(read_term_table(path, "sentiment_lexicon.tsv"))


def normalize(s: float, alpha: float = ALPHA) -> float:
    return s / math.sqrt(s * s + alpha)


def valence_sum(stream: TokenStream, lexicon: SentimentLexicon) -> float:
    relevant = [(tok, emph) for tok, emph in zip(stream.tokens, stream.emphasis)
                if lexicon.is_relevant(tok)]
    n_caps = sum(emph for _, emph in relevant)
    mixed_case = 0 < n_caps < len(relevant)

    total = 0.0
    for i, (tok, emph) in enumerate(relevant):
        if tok in lexicon.boosters or tok in lexicon.negators:
            continue
        v = lexicon.valences[tok]
        if v == 0.0:
            continue
        positive = v > 0
        if emph and mixed_case:
            v += CAPS_INCR if positive else -CAPS_INCR
        negated = False
        for dist in range(1, WINDOW + 1):
            j = i - dist
            if j < 0:
                break
            prev = relevant[j][0]
            if prev in lexicon.boosters:
                inc = lexicon.boosters[prev] * DISTANCE_SCALE[dist - 1]
                v += inc if positive else -inc
            elif prev in lexicon.negators:
                negated = True
        if negated:
            v *= NEGATION_SCALAR
        total += v

    if total != 0.0 and stream.exclaim:
        amp = EXCLAIM_INCR * min(stream.exclaim, EXCLAIM_MAX)
        total += amp if total > 0 else -amp
    return total


def score_compound(stream: TokenStream, lexicon: SentimentLexicon, alpha: float = ALPHA) -> float:
    """Compound score ``s / sqrt(s^2 + alpha)`` of the rule-adjusted valence sum."""
    return normalize(valence_sum(stream, lexicon), alpha)


def check_thresholds(thresholds: tuple[float, float]) -> tuple[float, float]:
    t_pos, t_neg = thresholds
    if not t_neg < t_pos:
        raise ValueError(f"need t_neg < t_pos, got t_pos={t_pos}, t_neg={t_neg}")
    return t_pos, t_neg


def classify_sentiment(compound: float,
                       thresholds: tuple[float, float] = DEFAULT_THRESHOLDS) -> str:
    t_pos, t_neg = check_thresholds(thresholds)
    if compound >= t_pos:
        return POSITIVE
    if compound <= t_neg:
        return NEGATIVE
    return NEUTRAL


@dataclass(frozen=True)
class Distribution:
    counts: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def percentages(self) -> dict[str, float]:
        n = self.total
        return {c: (100.0 * k / n if n else 0.0) for c, k in self.counts.items()}

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts),
                "percentages": {c: round(p, 2) for c, p in self.percentages.items()},
                "total": self.total}


def class_distribution(labels: Iterable[str], classes: Iterable[str]) -> Distribution:
    counts = {c: 0 for c in classes}
    for label in labels:
        if label not in counts:
            raise ValueError(f"unknown class {label!r}")
        counts[label] += 1
    return Distribution(counts)


def sentiment_distribution(labels: Iterable[str]) -> Distribution:
    return class_distribution(labels, CLASSES)
