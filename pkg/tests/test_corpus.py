import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import data_file
from ytanalytics.corpus import (COLUMNS, Corpus, CorpusError, VideoRecord, load_corpus,
                                month_buckets, parse_date, save_corpus)

HEADER = ",".join(COLUMNS)


def _write(tmp_path, body, header=HEADER):
    path = tmp_path / "videos.csv"
    path.write_text(header + "\n" + body, encoding="utf-8")
    return path


def test_demo_corpus_loads_sorted():
    corpus = load_corpus(data_file("demo_corpus.csv"), strict=True)
    assert len(corpus) == 12
    keys = [(r.publish_date, r.video_id) for r in corpus]
    assert keys == sorted(keys)
    assert corpus.ids[0] in corpus
    assert corpus[corpus.ids[3]].video_id == corpus.ids[3]


def test_minimal_columns_get_defaults(tmp_path):
    path = _write(tmp_path, "a1,Title,Some text,2023-04-05T10:00:00Z\n",
                  header="video_id,title,description,publish_date")
    (rec,) = load_corpus(path, strict=True)
    assert rec.view_count == 0 and rec.tags == () and rec.language == "und"
    assert rec.publish_date == dt.date(2023, 4, 5)
    assert rec.combined_text == "Title Some text"


@pytest.mark.parametrize("missing", ["video_id", "title", "description", "publish_date"])
def test_missing_required_column_always_raises(tmp_path, missing):
    cols = [c for c in ("video_id", "title", "description", "publish_date") if c != missing]
    path = _write(tmp_path, "", header=",".join(cols))
    with pytest.raises(CorpusError) as err:
        load_corpus(path)
    assert err.value.row == 1 and err.value.field == missing


def test_zero_byte_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(CorpusError):
        load_corpus(path)


def test_lenient_collects_bad_rows_with_row_numbers(tmp_path):
    body = ("v1,,t,d,2023-01-02,1,2,3,4,,,en\n"
            "v2,,t,d,not-a-date,1,2,3,4,,,en\n"
            "v3,,t,d,2023-01-03,-5,2,3,4,,,en\n"
            "v1,,t,d,2023-01-04,1,2,3,4,,,en\n"
            ",,t,d,2023-01-04,1,2,3,4,,,en\n")
    corpus = load_corpus(_write(tmp_path, body))
    assert corpus.ids == ["v1"]
    assert [(e.row, e.field) for e in corpus.rejected] == [
        (3, "publish_date"), (4, "view_count"), (5, "video_id"), (6, "video_id")]


def test_strict_raises_on_first_bad_row(tmp_path):
    body = "v1,,t,d,2023-01-02,1,2,3,4,,,en\nv2,,t,d,2023-13-40,1,2,3,4,,,en\n"
    with pytest.raises(CorpusError) as err:
        load_corpus(_write(tmp_path, body), strict=True)
    assert err.value.row == 3


def test_too_many_cells_rejected(tmp_path):
    corpus = load_corpus(_write(tmp_path, "v1,,t,d,2023-01-02,1,2,3,4,,,en,extra\n"))
    assert len(corpus) == 0 and len(corpus.rejected) == 1


def test_multivalued_and_quoted_fields_roundtrip(tmp_path):
    rec = VideoRecord("x1", "Say \"hi\", friend", "line one\nline two, with comma",
                      dt.date(2024, 2, 29), url="https://youtu.be/x1", view_count=10,
                      categories=("News", "Blogs"), tags=("a", "b c"), language="en")
    path = tmp_path / "out.csv"
    save_corpus([rec], path)
    (back,) = load_corpus(path, strict=True)
    assert back == rec


def test_short_row_rejected(tmp_path):
    corpus = load_corpus(_write(tmp_path, "v1,,t\n"))
    assert len(corpus) == 0
    assert corpus.rejected[0].row == 2 and corpus.rejected[0].field == "description"


def test_parse_date_variants():
    assert parse_date("2023-05-01") == dt.date(2023, 5, 1)
    assert parse_date(" 2023-05-01 12:00:00 ") == dt.date(2023, 5, 1)
    with pytest.raises(ValueError):
        parse_date("05/01/2023")


def test_corpus_rejects_duplicates_directly():
    r = VideoRecord("a", "", "", dt.date(2023, 1, 1))
    with pytest.raises(CorpusError):
        Corpus((r, r))


_dates = st.dates(min_value=dt.date(2020, 1, 1), max_value=dt.date(2025, 12, 31))
_ids = st.text("abcdefghijklmnopqrstuvwxyz0123456789_-", min_size=1, max_size=11)


@settings(max_examples=50, deadline=None)
@given(st.dictionaries(_ids, _dates, min_size=1, max_size=40))
def test_month_buckets_partition_corpus(dates):
    corpus = Corpus(tuple(VideoRecord(vid, "", "", d) for vid, d in dates.items()))
    buckets = month_buckets(corpus)
    flat = [vid for ids in buckets.values() for vid in ids]
    assert flat == corpus.ids
    assert list(buckets) == sorted(buckets)
    for (y, m), ids in buckets.items():
        assert all(corpus[v].publish_date.year == y and corpus[v].publish_date.month == m for v in ids)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(_ids, st.text(st.characters(blacklist_characters="\x00"), max_size=30),
                          _dates), min_size=1, max_size=15, unique_by=lambda t: t[0]))
def test_save_load_roundtrip(tmp_path_factory, rows):
    records = [VideoRecord(vid, "t", text, d) for vid, text, d in rows]
    path = tmp_path_factory.mktemp("rt") / "c.csv"
    save_corpus(records, path)
    assert load_corpus(path, strict=True) == Corpus(tuple(records))


def test_header_only_file_is_empty_corpus(tmp_path):
    corpus = load_corpus(_write(tmp_path, ""), strict=True)
    assert len(corpus) == 0 and month_buckets(corpus) == {}


def test_negative_like_count_names_row_and_field(tmp_path):
    with pytest.raises(CorpusError) as err:
        load_corpus(_write(tmp_path, "v1,,t,d,2023-01-02,1,-3,3,4,,,en\n"), strict=True)
    assert (err.value.row, err.value.field) == (2, "like_count")
    assert "row 2" in str(err.value) and "like_count" in str(err.value)


def test_month_buckets_examples():
    dates = [dt.date(2023, 1, 5), dt.date(2023, 1, 20), dt.date(2023, 2, 1)]
    corpus = Corpus(tuple(VideoRecord(f"v{i}", "", "", d) for i, d in enumerate(dates)))
    assert {m: len(ids) for m, ids in month_buckets(corpus).items()} == {(2023, 1): 2, (2023, 2): 1}

    months = [(2023 + (i // 12), i % 12 + 1) for i in range(22)]
    corpus = Corpus(tuple(VideoRecord(f"m{i}", "", "", dt.date(y, m, 1))
                          for i, (y, m) in enumerate(months)))
    buckets = month_buckets(corpus)
    assert list(buckets) == months
    assert all(len(ids) == 1 for ids in buckets.values())
