"""User-attention metrics over purchase-review intervals.

Counting is review-based: a review that mentions an attribute several times
adds one to that attribute's count at the review's interval.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .aspects import AspectModel, Mention, map_mentions
from .corpus import Corpus

DEFAULT_T = 90


class EmptySeriesError(ValueError):
    pass


@dataclass
class IntervalSeries:
    aspect_id: int
    k: int
    sums: dict[int, int]  # ti -> total over member attributes of distinct-review counts
    attribute_counts: dict[str, dict[int, int]] = field(default_factory=dict)

    @property
    def counts(self) -> dict[int, float]:
        """Mean per-attribute review count at each interval."""
        return {ti: s / self.k for ti, s in self.sums.items()}

    @property
    def total(self) -> int:
        return sum(self.sums.values())


@dataclass(frozen=True)
class AttentionSummary:
    aspect_id: int
    label: str
    y2: float
    rank: int


def attribute_interval_counts(corpus: Corpus, mentions: dict[str, list[Mention]]) -> dict[str, Counter]:
    """attribute -> Counter(ti -> number of distinct reviews mentioning it)."""
    out: dict[str, Counter] = defaultdict(Counter)
    for rec in corpus.records:
        for attr in {m.attribute for m in mentions.get(rec.id, ())}:
            out[attr][rec.interval_days] += 1
    return out


def _series(aspect, per_attr: dict[str, Counter], max_interval: int) -> IntervalSeries:
    sums = {ti: 0 for ti in range(max_interval + 1)}
    attr_counts = {}
    for m in aspect.members:
        c = per_attr.get(m, Counter())
        attr_counts[m] = dict(sorted(c.items()))
        for ti, n in c.items():
            sums[ti] += n
    return IntervalSeries(aspect.id, aspect.k, sums, attr_counts)


def mention_counts(
    corpus: Corpus,
    model: AspectModel,
    aspect_id: int,
    mentions: dict[str, list[Mention]] | None = None,
) -> IntervalSeries:
    aspect = model.aspect(aspect_id)
    if mentions is None:
        mentions = map_mentions(corpus, model)
    return _series(aspect, attribute_interval_counts(corpus, mentions), corpus.max_interval)


def all_interval_series(
    corpus: Corpus,
    model: AspectModel,
    mentions: dict[str, list[Mention]] | None = None,
) -> dict[int, IntervalSeries]:
    if mentions is None:
        mentions = map_mentions(corpus, model)
    per_attr = attribute_interval_counts(corpus, mentions)
    return {a.id: _series(a, per_attr, corpus.max_interval) for a in model.clusters}


def attention_share(series: IntervalSeries, ti: int) -> float:
    """(1/k * sum_j n_ti,j) / (sum over all ti and j of n_ti,j)."""
    total = series.total
    if total == 0:
        raise EmptySeriesError("empty series")
    return series.sums.get(ti, 0) / series.k / total


def attention_y1(series: IntervalSeries, ti: int) -> float | None:
    """log10 of the attention share; ``None`` where the share is zero."""
    share = attention_share(series, ti)
    return math.log10(share) if share > 0 else None


def aspects_mentioned_by_interval(corpus: Corpus, mentions: dict[str, list[Mention]]) -> dict[int, set[int]]:
    out: dict[int, set[int]] = {ti: set() for ti in range(corpus.max_interval + 1)}
    for rec in corpus.records:
        for m in mentions.get(rec.id, ()):
            out[rec.interval_days].add(m.aspect_id)
    return out


def aspect_count_ratio(
    corpus: Corpus,
    model: AspectModel,
    ti: int,
    universe: int | None = None,
    mentions: dict[str, list[Mention]] | None = None,
) -> float:
    """Share of the aspect universe with at least one mention at interval ``ti``."""
    return aspect_count_ratio_series(corpus, model, universe, mentions).get(ti, 0.0)


def aspect_count_ratio_series(
    corpus: Corpus,
    model: AspectModel,
    universe: int | None = None,
    mentions: dict[str, list[Mention]] | None = None,
) -> dict[int, float]:
    universe = len(model.clusters) if universe is None else universe
    if universe <= 0:
        raise ValueError("aspect universe must be positive")
    if mentions is None:
        mentions = map_mentions(corpus, model)
    seen = aspects_mentioned_by_interval(corpus, mentions)
    return {ti: len(ids) / universe for ti, ids in seen.items()}


def _interval_totals(per_attr: dict[str, Counter], attributes) -> Counter:
    totals: Counter = Counter()
    for attr in attributes:
        totals.update(per_attr.get(attr, {}))
    return totals


def average_attention(
    corpus: Corpus,
    model: AspectModel,
    aspect_id: int,
    T: int = DEFAULT_T,
    mentions: dict[str, list[Mention]] | None = None,
) -> float:
    """Interval-averaged attention of one aspect.

    At each interval the aspect's mean per-attribute review count is divided
    by the review counts summed over every attribute of every aspect; the
    ratios are summed over 0..max_interval and divided by ``T``. Intervals
    without any mention contribute nothing.
    """
    model.aspect(aspect_id)
    return average_attention_all(corpus, model, T, mentions)[aspect_id]


def average_attention_all(
    corpus: Corpus,
    model: AspectModel,
    T: int = DEFAULT_T,
    mentions: dict[str, list[Mention]] | None = None,
) -> dict[int, float]:
    if mentions is None:
        mentions = map_mentions(corpus, model)
    per_attr = attribute_interval_counts(corpus, mentions)
    totals = _interval_totals(per_attr, model.attributes)
    out = {}
    for a in model.clusters:
        ser = _series(a, per_attr, corpus.max_interval)
        acc = 0.0
        for ti, s in ser.sums.items():
            if totals.get(ti, 0) > 0:
                acc += (s / a.k) / totals[ti]
        out[a.id] = acc / T
    return out


def attention_ranking(
    corpus: Corpus,
    model: AspectModel,
    T: int = DEFAULT_T,
    mentions: dict[str, list[Mention]] | None = None,
) -> list[AttentionSummary]:
    """Aspects by descending average attention, ties by aspect id."""
    y2 = average_attention_all(corpus, model, T, mentions)
    order = sorted(model.clusters, key=lambda a: (-y2[a.id], a.id))
    return [AttentionSummary(a.id, a.label, y2[a.id], rank) for rank, a in enumerate(order, start=1)]


def write_attention_series(series: dict[int, IntervalSeries], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["aspect_id", "ti", "count", "share", "y1"])
        for aid in sorted(series):
            ser = series[aid]
            total = ser.total
            for ti, s in sorted(ser.sums.items()):
                count = s / ser.k
                share = count / total if total else 0.0
                y1 = f"{math.log10(share):.6f}" if share > 0 else ""
                w.writerow([aid, ti, repr(count), f"{share:.8f}", y1])


def read_attention_series(path) -> dict[int, dict[int, float]]:
    """aspect_id -> {ti: mean per-attribute count} from an attention series CSV."""
    out: dict[int, dict[int, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["aspect_id"]), {})[int(row["ti"])] = float(row["count"])
    return out


def format_attention_table(ranking: list[AttentionSummary], top: int | None = None) -> list[list[str]]:
    rows = ranking if top is None else ranking[:top]
    return [[str(r.rank), r.label, f"{r.y2:.5f}"] for r in rows]


def write_attention_table(ranking: list[AttentionSummary], path, top: int | None = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["rank", "aspect", "average_attention"])
        w.writerows(format_attention_table(ranking, top))
