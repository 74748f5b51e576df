import math
import random

import pytest
from hypothesis import given, strategies as st

from review_aspects.temporal import (
    AttentionSummary,
    EmptySeriesError,
    IntervalSeries,
    all_interval_series,
    aspect_count_ratio,
    aspect_count_ratio_series,
    attention_ranking,
    attention_share,
    attention_y1,
    average_attention,
    format_attention_table,
    mention_counts,
    read_attention_series,
    write_attention_series,
)

from conftest import Corpus, corpus_of, model_of


def test_share_k1():
    ser = IntervalSeries(1, 1, {0: 10, 1: 90})
    assert attention_share(ser, 0) == pytest.approx(0.1)
    assert attention_y1(ser, 0) == pytest.approx(-1.0)
    assert attention_y1(ser, 5) is None


def test_share_k2():
    ser = IntervalSeries(1, 2, {0: 4 + 6, 1: 40})
    assert attention_share(ser, 0) == pytest.approx(0.1)
    assert attention_y1(ser, 0) == pytest.approx(-1.0)


def test_empty_series():
    with pytest.raises(EmptySeriesError, match="empty series"):
        attention_share(IntervalSeries(1, 1, {0: 0}), 0)


def test_review_level_counting():
    model = model_of(["screen", "display"])
    corpus = corpus_of(
        ("screen good", 5), ("screen", 5), ("the screen", 5),
        ("screen and screen again", 6),
        ("screen display", 7),
    )
    ser = mention_counts(corpus, model, 1)
    assert ser.attribute_counts["screen"] == {5: 3, 6: 1, 7: 1}
    assert ser.attribute_counts["display"] == {7: 1}
    assert (ser.sums[5], ser.sums[6], ser.sums[7]) == (3, 1, 2)
    assert ser.counts[7] == 1.0
    assert len(ser.sums) == 91


def test_unknown_aspect():
    with pytest.raises(KeyError):
        mention_counts(corpus_of(), model_of(["a"]), 2)


@given(st.lists(st.integers(0, 90), min_size=1, max_size=60))
def test_k1_shares_sum_to_one(tis):
    corpus = corpus_of(*[("screen", ti) for ti in tis])
    ser = all_interval_series(corpus, model_of(["screen"]))[1]
    assert abs(sum(attention_share(ser, ti) for ti in range(91)) - 1.0) <= 1e-9
    shares = sorted({attention_share(ser, ti) for ti in range(91)} - {0.0})
    ys = [attention_y1(IntervalSeries(1, 1, {0: s * 1e6, 1: 1e6 - s * 1e6}), 0) for s in shares]
    assert ys == sorted(ys)


def test_aspect_count_ratio():
    model = model_of(["screen"], ["battery"])
    corpus = corpus_of(("screen battery", 0), ("screen", 1), ("nothing", 2))
    assert aspect_count_ratio(corpus, model, 0) == 1.0
    assert aspect_count_ratio(corpus, model, 1) == 0.5
    assert aspect_count_ratio(corpus, model, 2) == 0.0
    assert aspect_count_ratio(corpus, model, 1, universe=32) == 1 / 32
    with pytest.raises(ValueError):
        aspect_count_ratio(corpus, model, 0, universe=0)


@given(st.lists(st.tuples(st.sampled_from(["a", "b", "c", "x"]), st.integers(0, 5)), max_size=20),
       st.sampled_from(["a", "b", "c"]), st.integers(0, 5))
def test_ratio_monotone_under_added_mentions(specs, word, ti):
    model = model_of(["a"], ["b"], ["c"])
    before = aspect_count_ratio_series(corpus_of(*specs), model)
    after = aspect_count_ratio_series(corpus_of(*specs, (word, ti)), model)
    assert all(after[t] >= before[t] for t in before)


def test_average_attention_single_aspect():
    corpus = corpus_of(*[("screen", ti) for ti in range(0, 90, 10)])
    model = model_of(["screen"])
    assert average_attention(corpus, model, 1) == pytest.approx(9 / 90)


def test_average_attention_shared_intervals():
    model = model_of(["screen", "display"], ["battery"], ["price"])
    corpus = corpus_of(("screen", 0), ("display battery", 0), ("battery", 1))
    # ti 0: screen 1, display 1, battery 1 -> 3 in total; aspect 1 mean count 1
    assert average_attention(corpus, model, 1, T=90) == pytest.approx((1 / 3) / 90)
    assert average_attention(corpus, model, 2, T=90) == pytest.approx((1 / 3 + 1) / 90)
    assert average_attention(corpus, model, 3) == 0.0
    with pytest.raises(KeyError):
        average_attention(corpus, model, 4)


def test_average_attention_ignores_order_and_background_text():
    model = model_of(["screen"], ["battery"])
    specs = [("screen", 0), ("battery", 0), ("battery x", 3), ("screen", 9), ("nothing", 3)]
    ref = {a.id: average_attention(corpus_of(*specs), model, a.id) for a in model.clusters}
    random.Random(0).shuffle(specs)
    specs += [("other words", 3), ("other words", 4)]
    assert {a.id: average_attention(corpus_of(*specs), model, a.id) for a in model.clusters} == ref


def test_ranking_and_format():
    model = model_of(["screen"], ["battery"], ["price"])
    corpus = corpus_of(("screen", 0), ("battery", 0), ("battery", 1))
    ranking = attention_ranking(corpus, model)
    assert [(r.rank, r.label) for r in ranking] == [(1, "battery"), (2, "screen"), (3, "price")]
    rows = format_attention_table([AttentionSummary(20, "screen", 0.005091, 1)])
    assert rows == [["1", "screen", "0.00509"]]
    assert format_attention_table(ranking, top=2)[1] == ["2", "screen", f"{0.5 / 90:.5f}"]


def test_series_csv_roundtrip(tmp_path):
    model = model_of(["screen", "display"])
    corpus = corpus_of(("screen", 0), ("display", 0), ("screen", 2))
    series = all_interval_series(corpus, model)
    p = tmp_path / "s.csv"
    write_attention_series(series, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "aspect_id,ti,count,share,y1"
    assert lines[1] == f"1,0,1.0,{2 / 2 / 3:.8f},{math.log10(1 / 3):.6f}"
    assert lines[2] == "1,1,0.0,0.00000000,"
    assert read_attention_series(p)[1][2] == 0.5


def test_series_bounds_from_corpus():
    corpus = Corpus((), max_interval=30)
    ser = all_interval_series(corpus, model_of(["a"]))[1]
    assert sorted(ser.sums) == list(range(31))
