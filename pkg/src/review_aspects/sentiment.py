"""Attribute-level sentiment with negation and distance weighting, and per-interval aspect means."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Collection, Iterable, Sequence

from .aspects import AspectModel, Mention, map_mentions
from .corpus import Corpus
from .resources import SentimentLexicon

SENTENCE_END = frozenset({"。", "！", "？", "!", "?", ".", "；", ";"})

Span = tuple[int, int]  # [start, end) token indices


@dataclass(frozen=True)
class MentionSentiment:
    review_id: str
    aspect_id: int
    attribute: str
    ti: int
    score: int
    raw_sum: float


@dataclass
class AspectSentimentSeries:
    aspect_id: int
    means: dict[int, float] = field(default_factory=dict)
    counts: dict[int, int] = field(default_factory=dict)  # non-neutral mentions behind each mean
    mentions: dict[int, int] = field(default_factory=dict)  # all mentions, neutral included


def _surfaces(tokens) -> list[str]:
    return [getattr(t, "surface", t) for t in tokens]


def negation_coefficient(tokens: Sequence, k: int, negations: Collection[str]) -> int:
    """Sign applied to the sentiment word at position ``k``.

    Looks at the two preceding tokens only: one negation word flips the
    polarity, two cancel out, none leaves it unchanged.
    """
    window = _surfaces(tokens[max(0, k - 2):k])
    return -1 if sum(w in negations for w in window) == 1 else 1


def _distance(k: int, spans: Iterable[Span]) -> int:
    best = None
    for start, end in spans:
        if k < start:
            d = start - k
        elif k >= end:
            d = k - (end - 1)
        else:
            d = 0
        best = d if best is None else min(best, d)
    return max(1, best)


def _sentence_ids(surfaces: Sequence[str]) -> list[int]:
    ids, cur = [], 0
    for w in surfaces:
        ids.append(cur)
        if w in SENTENCE_END:
            cur += 1
    return ids


def sentiment_sum(
    tokens: Sequence,
    spans: Span | Sequence[Span],
    lexicon: SentimentLexicon,
    negations: Collection[str],
    sentence_split: bool = False,
) -> float:
    """Sum of c * SO / dist over the sentiment words of a review.

    ``spans`` are the attribute's occurrences; the distance to a sentiment
    word is taken from the nearest one and never drops below 1. With
    ``sentence_split`` only sentences holding an occurrence are scanned.
    """
    if not spans:
        raise ValueError("attribute has no span")
    if isinstance(spans[0], int):
        spans = [spans]
    surfaces = _surfaces(tokens)
    allowed = None
    if sentence_split:
        sids = _sentence_ids(surfaces)
        allowed = {sids[s] for s, _ in spans}
    total = 0.0
    for k, word in enumerate(surfaces):
        so = lexicon.get(word)
        if so is None or (allowed is not None and sids[k] not in allowed):
            continue
        c = negation_coefficient(surfaces, k, negations)
        total += c * so / _distance(k, spans)
    return total


def _sign(x: float) -> int:
    return 1 if x > 0 else -1 if x < 0 else 0


def attribute_sentiment(
    tokens: Sequence,
    attribute_span: Span | Sequence[Span],
    lexicon: SentimentLexicon,
    negations: Collection[str],
    *,
    review_id: str = "",
    aspect_id: int = 0,
    attribute: str = "",
    ti: int = 0,
    sentence_split: bool = False,
) -> MentionSentiment:
    raw = sentiment_sum(tokens, attribute_span, lexicon, negations, sentence_split)
    return MentionSentiment(review_id, aspect_id, attribute, ti, _sign(raw), raw)


def score_mentions(
    corpus: Corpus,
    model: AspectModel,
    lexicon: SentimentLexicon,
    negations: Collection[str],
    mentions: dict[str, list[Mention]] | None = None,
    sentence_split: bool = False,
) -> list[MentionSentiment]:
    """One score per (review, attribute); repeated occurrences share the nearest-distance rule."""
    if mentions is None:
        mentions = map_mentions(corpus, model)
    out: list[MentionSentiment] = []
    for rec in corpus.records:
        found = mentions.get(rec.id)
        if not found:
            continue
        spans: dict[tuple[int, str], list[Span]] = {}
        for m in found:
            spans.setdefault((m.aspect_id, m.attribute), []).append((m.index, m.index + m.length))
        surfaces = rec.surfaces
        for (aid, attr), occ in spans.items():
            out.append(
                attribute_sentiment(
                    surfaces, occ, lexicon, negations,
                    review_id=rec.id, aspect_id=aid, attribute=attr,
                    ti=rec.interval_days, sentence_split=sentence_split,
                )
            )
    return out


def sentiment_series(scores: Iterable[MentionSentiment], model: AspectModel) -> dict[int, AspectSentimentSeries]:
    """Per aspect and interval, the mean of the non-neutral (+1/-1) mention scores."""
    series = {a.id: AspectSentimentSeries(a.id) for a in model.clusters}
    sums: dict[tuple[int, int], int] = {}
    for s in scores:
        ser = series[s.aspect_id]
        ser.mentions[s.ti] = ser.mentions.get(s.ti, 0) + 1
        if s.score == 0:
            continue
        ser.counts[s.ti] = ser.counts.get(s.ti, 0) + 1
        sums[s.aspect_id, s.ti] = sums.get((s.aspect_id, s.ti), 0) + s.score
    for (aid, ti), total in sums.items():
        series[aid].means[ti] = total / series[aid].counts[ti]
    for ser in series.values():
        ser.means = dict(sorted(ser.means.items()))
        ser.counts = dict(sorted(ser.counts.items()))
        ser.mentions = dict(sorted(ser.mentions.items()))
    return series


def aspect_sentiment_series(
    corpus: Corpus,
    model: AspectModel,
    lexicon: SentimentLexicon,
    negations: Collection[str],
    mentions: dict[str, list[Mention]] | None = None,
    sentence_split: bool = False,
) -> dict[int, AspectSentimentSeries]:
    scores = score_mentions(corpus, model, lexicon, negations, mentions, sentence_split)
    return sentiment_series(scores, model)


def write_mention_scores(scores: Iterable[MentionSentiment], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["review_id", "aspect_id", "attribute", "ti", "score", "raw_sum"])
        for s in scores:
            w.writerow([s.review_id, s.aspect_id, s.attribute, s.ti, s.score, repr(s.raw_sum)])


def write_sentiment_series(series: dict[int, AspectSentimentSeries], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["aspect_id", "ti", "mentions", "scored", "mean"])
        for aid in sorted(series):
            ser = series[aid]
            for ti, n in ser.mentions.items():
                mean = ser.means.get(ti)
                w.writerow([aid, ti, n, ser.counts.get(ti, 0), "" if mean is None else f"{mean:.6f}"])
