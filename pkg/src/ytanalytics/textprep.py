"""Tokenization and vocabulary building shared by every text pathway."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

URL_RE = re.compile(r"\b[A-Za-z][A-Za-z0-9+.\-]*://\S+")
HANDLE_RE = re.compile(r"(?<!\w)@\w+")
# words may carry internal hyphens/apostrophes and a leading '#'
TOKEN_RE = re.compile(r"#?\w+(?:['’\-]\w+)*")


class EmptyVocabularyError(ValueError):
    pass


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[str, ...]
    emphasis: tuple[bool, ...]
    exclaim: int = 0
    question: int = 0

    def __post_init__(self):
        if len(self.tokens) != len(self.emphasis):
            raise ValueError("emphasis flags must align with tokens")

    def __len__(self) -> int:
        return len(self.tokens)


@lru_cache(maxsize=None)
def _read_word_list(path: str | None) -> frozenset[str]:
    if path is None:
        text = resources.files("ytanalytics.data").joinpath("stopwords_en.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    words = (w.strip().lower() for w in text.splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """The bundled English list, or one word per line from ``path``."""
    return _read_word_list(None if path is None else str(path))


@dataclass(frozen=True)
class PrepOptions:
    lowercase: bool = True
    min_df: int = 2
    max_df: float = 0.95
    stopwords: frozenset[str] | None = field(default_factory=load_stopwords)

    @classmethod
    def unfiltered(cls) -> "PrepOptions":
        return cls(min_df=1, max_df=1.0, stopwords=None)


def _is_emphasized(surface: str) -> bool:
    return len(surface) > 1 and surface.isupper()


def tokenize(text: str, options: PrepOptions | None = None) -> TokenStream:
    """Split ``text`` into word tokens.

    URLs and @handles are removed before splitting.  Emphasis (all-caps
    surface form) and the '!'/'?' counts are recorded before lowercasing.
    """
    lowercase = True if options is None else options.lowercase
    text = HANDLE_RE.sub(" ", URL_RE.sub(" ", text))
    tokens: list[str] = []
    emphasis: list[bool] = []
    for m in TOKEN_RE.finditer(text):
        surface = m.group()
        flag = _is_emphasized(surface)
        if not lowercase:
            tokens.append(surface)
            emphasis.append(flag)
            continue
        # lowercasing can change the character classes (e.g. dotted capital I);
        # re-split so every emitted token is a fixed point of tokenize
        for sub in TOKEN_RE.finditer(surface.lower()):
            tokens.append(sub.group())
            emphasis.append(flag)
    return TokenStream(tuple(tokens), tuple(emphasis), text.count("!"), text.count("?"))


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    df: tuple[int, ...]
    n_docs: int

    def __post_init__(self):
        object.__setattr__(self, "_ids", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: object) -> bool:
        return term in self._ids  # type: ignore[attr-defined]

    def id_of(self, term: str) -> int | None:
        return self._ids.get(term)  # type: ignore[attr-defined]

    @property
    def ids(self) -> dict[str, int]:
        return dict(self._ids)  # type: ignore[attr-defined]


def _tokens_of(doc: TokenStream | Sequence[str]) -> Sequence[str]:
    return doc.tokens if isinstance(doc, TokenStream) else doc


def build_vocabulary(docs: Iterable[TokenStream | Sequence[str]],
                     options: PrepOptions | None = None) -> Vocabulary:
    """Document-frequency filtered vocabulary with ids in lexicographic term order.

    A term is kept when ``min_df <= df <= max_df * N`` and it is not a stopword.
    """
    options = options or PrepOptions()
    df: Counter[str] = Counter()
    n_docs = 0
    for doc in docs:
        n_docs += 1
        df.update(set(_tokens_of(doc)))
    if n_docs == 0:
        raise ValueError("cannot build a vocabulary from zero documents")
    stop = options.stopwords or frozenset()
    max_count = options.max_df * n_docs
    kept = sorted(t for t, c in df.items()
                  if c >= options.min_df and c <= max_count and t not in stop)
    if not kept:
        raise EmptyVocabularyError(
            f"empty vocabulary: no term of {n_docs} documents survives filtering")
    return Vocabulary(tuple(kept), tuple(df[t] for t in kept), n_docs)
