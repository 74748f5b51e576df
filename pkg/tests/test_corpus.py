import json
from datetime import datetime, timedelta

import pytest
from hypothesis import given, strategies as st

from review_aspects.corpus import (
    Corpus,
    RecordError,
    bin_records,
    compute_time_interval,
    interval_week,
    load_corpus,
    write_corpus,
)
from review_aspects.preprocess import LongestMatchSegmenter

from conftest import BASE, record


def line(rid="r1", purchase="2016-03-17T10:00:00", review="2016-03-20T09:00:00", **extra):
    data = {"id": rid, "product": "phone", "purchase_time": purchase, "review_time": review,
            "tokens": [{"w": "screen", "pos": "n"}, {"w": "good", "pos": "a"}]}
    data.update(extra)
    return json.dumps({k: v for k, v in data.items() if v is not None})


# -- intervals -------------------------------------------------------------

def test_same_calendar_day_is_zero():
    assert compute_time_interval("2016-03-17T10:00", "2016-03-17T23:00") == 0


def test_exact_week():
    assert compute_time_interval("2016-03-17", "2016-03-24") == 7


def test_interval_is_floor_of_elapsed_days():
    assert compute_time_interval("2016-03-17T23:00", "2016-03-18T01:00") == 0
    assert compute_time_interval("2016-03-17T10:00", "2016-03-19T09:59:59") == 1


def test_negative_interval_rejected():
    with pytest.raises(RecordError) as info:
        compute_time_interval("2016-03-17", "2016-03-16")
    assert info.value.reason == "negative_interval"


@pytest.mark.parametrize("bad", ["2016/03/17", "yesterday", "", 20160317])
def test_bad_timestamp(bad):
    with pytest.raises(RecordError) as info:
        compute_time_interval(bad, "2016-03-18")
    assert info.value.reason == "invalid_timestamp"


@pytest.mark.parametrize("days, week", [(0, 1), (6, 1), (7, 2), (76, 11), (90, 13)])
def test_interval_week(days, week):
    assert interval_week(days) == week


@given(
    st.datetimes(min_value=datetime(2000, 1, 1), max_value=datetime(2030, 1, 1)),
    st.timedeltas(min_value=timedelta(0), max_value=timedelta(days=200)),
    st.timedeltas(min_value=timedelta(days=-3000), max_value=timedelta(days=3000)),
)
def test_interval_translation_invariant(start, gap, shift):
    start = start.replace(microsecond=0)
    gap = timedelta(seconds=int(gap.total_seconds()))
    shift = timedelta(seconds=int(shift.total_seconds()))
    assert compute_time_interval(start, start + gap) == compute_time_interval(start + shift, start + gap + shift)
    assert compute_time_interval(start, start + gap) == gap.days


# -- loading ---------------------------------------------------------------

def test_three_valid_lines(write):
    p = write("c.jsonl", "\n".join(line(f"r{i}") for i in range(3)) + "\n")
    corpus, report = load_corpus(p)
    assert len(corpus) == 3 and len(report) == 0
    assert [r.interval_days for r in corpus] == [2, 2, 2]
    assert corpus.records[0].surfaces == ["screen", "good"]


def test_rejection_reasons(write, tmp_path):
    lines = [
        line("ok"),
        line("late", review="2016-07-15T10:00:00"),  # 120 days
        line("nopurchase", purchase=None),
        "{not json",
        line("neg", review="2016-03-01"),
        line("ok"),
        line("badts", review="03/20/2016"),
        line("empty", tokens=[]),
        line("text", tokens=None, text="screen good"),
    ]
    p = write("c.jsonl", "\n".join(lines) + "\n")
    corpus, report = load_corpus(p, max_interval=90)
    assert [r.id for r in corpus] == ["ok"]
    assert report.rejections == [
        (2, "interval_out_of_range"),
        (3, "missing_field"),
        (4, "malformed_json"),
        (5, "negative_interval"),
        (6, "duplicate_id"),
        (7, "invalid_timestamp"),
        (8, "empty_tokens"),
        (9, "tokenizer_unavailable"),
    ]
    out = tmp_path / "rej.csv"
    report.write_csv(out)
    assert out.read_text().splitlines()[:2] == ["line,reason", "2,interval_out_of_range"]


def test_text_records_use_segmenter(write):
    p = write("c.jsonl", line("t", tokens=None, text="screengood") + "\n")
    seg = LongestMatchSegmenter({"screen": "n"}, {"good": "a", "go": "v"})
    corpus, report = load_corpus(p, segmenter=seg)
    assert len(report) == 0
    assert [(t.surface, t.pos) for t in corpus.records[0].tokens] == [("screen", "n"), ("good", "a")]


def test_product_filter_counts_separately(write):
    p = write("c.jsonl", line("a") + "\n" + line("b", product="tablet") + "\n")
    corpus, report = load_corpus(p, product="phone")
    assert [r.id for r in corpus] == ["a"]
    assert report.filtered == 1 and len(report) == 0


def test_reload_is_identical(write, tmp_path):
    p = write("c.jsonl", "\n".join(line(f"r{i}", review=f"2016-04-{i + 1:02d}") for i in range(9)) + "\n")
    first, _ = load_corpus(p)
    again = tmp_path / "again.jsonl"
    write_corpus(first.records, again)
    second, _ = load_corpus(again)
    assert first == second
    assert load_corpus(p)[0] == first


def test_corpus_rejects_out_of_range_record():
    with pytest.raises(ValueError):
        Corpus((record("a", "x", ti=91),), max_interval=90)


# -- binning ---------------------------------------------------------------

@given(st.lists(st.tuples(st.integers(0, 90), st.integers(0, 400)), max_size=40))
def test_bins_partition_corpus(specs):
    recs = tuple(
        record(f"r{i}", "screen/n", ti, purchase=BASE + timedelta(days=d)) for i, (ti, d) in enumerate(specs)
    )
    corpus = Corpus(recs)
    for axis in ("interval_day", "interval_week", "purchase_date"):
        bins = bin_records(corpus, axis)
        ids = [rid for group in bins.values() for rid in group]
        assert sorted(ids) == sorted(r.id for r in recs)
    assert all(1 <= w <= 13 for w in bin_records(corpus, "interval_week"))


def test_bin_keys():
    corpus = Corpus((record("a", "x", 0), record("b", "x", 76), record("c", "x", 90)))
    assert bin_records(corpus, "interval_week") == {1: ["a"], 11: ["b"], 13: ["c"]}
    assert bin_records(corpus, "purchase_date") == {BASE.date(): ["a", "b", "c"]}
    with pytest.raises(ValueError):
        bin_records(corpus, "month")
