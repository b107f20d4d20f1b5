"""Loading, validating and indexing the video table."""

from __future__ import annotations

import csv
import datetime as dt
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

log = logging.getLogger(__name__)

COLUMNS = (
    "video_id",
    "url",
    "title",
    "description",
    "publish_date",
    "view_count",
    "like_count",
    "comment_count",
    "duration_seconds",
    "categories",
    "tags",
    "language",
)
REQUIRED_COLUMNS = ("video_id", "title", "description", "publish_date")
COUNT_COLUMNS = ("view_count", "like_count", "comment_count", "duration_seconds")
LIST_COLUMNS = ("categories", "tags")
MULTI_SEP = "|"


class CorpusError(ValueError):
    """A row or the table as a whole failed validation."""

    def __init__(self, message: str, row: int | None = None, field: str | None = None):
        self.row = row
        self.field = field
        where = []
        if row is not None:
            where.append(f"row {row}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = (", ".join(where) + ": ") if where else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    title: str
    description: str
    publish_date: dt.date
    url: str = ""
    view_count: int = 0
    like_count: int = 0
    comment_count: int = 0
    duration_seconds: int = 0
    categories: tuple[str, ...] = ()
    tags: tuple[str, ...] = ()
    language: str = "und"

    @property
    def month(self) -> tuple[int, int]:
        return (self.publish_date.year, self.publish_date.month)

    @property
    def combined_text(self) -> str:
        return f"{self.title} {self.description}"


@dataclass(frozen=True)
class Corpus:
    """Immutable, deterministically ordered collection of videos.

    Records are sorted by ``(publish_date, video_id)`` regardless of the order
    they were given in.  ``rejected`` holds the per-row errors of a lenient load.
    """

    records: tuple[VideoRecord, ...]
    rejected: tuple[CorpusError, ...] = field(default=(), compare=False)

    def __post_init__(self):
        ordered = tuple(sorted(self.records, key=lambda r: (r.publish_date, r.video_id)))
        object.__setattr__(self, "records", ordered)
        index = {}
        for pos, rec in enumerate(ordered):
            if not rec.video_id:
                raise CorpusError("empty video_id", field="video_id")
            if rec.video_id in index:
                raise CorpusError(f"duplicate video_id {rec.video_id!r}", field="video_id")
            index[rec.video_id] = pos
        object.__setattr__(self, "_index", index)

    @property
    def index(self) -> dict[str, int]:
        return self._index  # type: ignore[attr-defined]

    @property
    def ids(self) -> list[str]:
        return [r.video_id for r in self.records]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[VideoRecord]:
        return iter(self.records)

    def __getitem__(self, video_id: str) -> VideoRecord:
        return self.records[self._index[video_id]]  # type: ignore[attr-defined]

    def __contains__(self, video_id: object) -> bool:
        return video_id in self._index  # type: ignore[attr-defined]


def parse_date(value: str) -> dt.date:
    """Parse ``YYYY-MM-DD``; anything after the date (``T...`` or `` ...``) is ignored."""
    value = value.strip()
    if len(value) > 10 and value[10] in "T ":
        value = value[:10]
    return dt.date.fromisoformat(value)


def _parse_count(value: str) -> int:
    value = value.strip()
    if value == "":
        return 0
    n = int(float(value)) if "." in value or "e" in value.lower() else int(value)
    if n < 0:
        raise ValueError(f"negative count {value!r}")
    return n


def _parse_list(value: str) -> tuple[str, ...]:
    if value == "":
        return ()
    return tuple(value.split(MULTI_SEP))


def _parse_row(row: dict[str, str], rownum: int) -> VideoRecord:
    kwargs = {}
    for name in COLUMNS:
        raw = row.get(name)
        if raw is None:
            continue
        try:
            if name == "publish_date":
                kwargs[name] = parse_date(raw)
            elif name in COUNT_COLUMNS:
                kwargs[name] = _parse_count(raw)
            elif name in LIST_COLUMNS:
                kwargs[name] = _parse_list(raw)
            elif name == "language":
                kwargs[name] = raw.strip() or "und"
            else:
                kwargs[name] = raw
        except ValueError as exc:
            raise CorpusError(str(exc), row=rownum, field=name) from None
    if not kwargs["video_id"].strip():
        raise CorpusError("empty video_id", row=rownum, field="video_id")
    return VideoRecord(**kwargs)


def load_corpus(path: str | Path, strict: bool = False) -> Corpus:
    """Read a comma-separated video table with a header row.

    Row numbers in errors count the header as row 1.  In lenient mode bad rows
    are dropped and collected in ``Corpus.rejected``; with ``strict=True`` the
    first bad row raises.  A missing required column always raises.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        if not header:
            # a zero-byte file has no header; treat it as a table with no columns
            raise CorpusError(f"missing required column {REQUIRED_COLUMNS[0]!r}", row=1,
                              field=REQUIRED_COLUMNS[0])
        for name in REQUIRED_COLUMNS:
            if name not in header:
                raise CorpusError(f"missing required column {name!r}", row=1, field=name)

        records: list[VideoRecord] = []
        rejected: list[CorpusError] = []
        seen: set[str] = set()
        for offset, row in enumerate(reader):
            rownum = offset + 2
            try:
                if None in row:
                    raise CorpusError("too many cells", row=rownum)
                short = [c for c in REQUIRED_COLUMNS if row.get(c) is None]
                if short:
                    raise CorpusError("too few cells", row=rownum, field=short[0])
                rec = _parse_row(row, rownum)
                if rec.video_id in seen:
                    raise CorpusError(f"duplicate video_id {rec.video_id!r}", row=rownum,
                                      field="video_id")
            except CorpusError as err:
                if strict:
                    raise
                log.warning("rejected %s", err)
                rejected.append(err)
                continue
            seen.add(rec.video_id)
            records.append(rec)
    return Corpus(tuple(records), tuple(rejected))


def _format_row(rec: VideoRecord) -> list[str]:
    out = []
    for name in COLUMNS:
        value = getattr(rec, name)
        if name == "publish_date":
            out.append(value.isoformat())
        elif name in LIST_COLUMNS:
            out.append(MULTI_SEP.join(value))
        else:
            # csv cannot write NUL, and a loaded table cannot contain one
            out.append(str(value).replace("\x00", ""))
    return out


def save_corpus(corpus: Corpus | list[VideoRecord], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        # CRLF rows: the writer only quotes a bare '\r' when it is part of the terminator
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(COLUMNS)
        for rec in corpus:
            writer.writerow(_format_row(rec))


def month_buckets(corpus: Corpus) -> "OrderedDict[tuple[int, int], list[str]]":
    """Group video ids by publish year-month, months ascending, corpus order within."""
    buckets: OrderedDict[tuple[int, int], list[str]] = OrderedDict()
    for rec in corpus:
        buckets.setdefault(rec.month, []).append(rec.video_id)
    return buckets
