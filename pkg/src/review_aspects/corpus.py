"""Review records, JSON-lines ingestion and interval binning."""

from __future__ import annotations

import csv
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Iterable, Literal

from .preprocess import LongestMatchSegmenter, TaggedToken, TokenizerError, tokenize

logger = logging.getLogger(__name__)

DEFAULT_MAX_INTERVAL = 90

_TIMESTAMP_RE = re.compile(r"^\d{4}-\d{2}-\d{2}(T\d{2}:\d{2}(:\d{2})?)?$")

BinAxis = Literal["interval_day", "interval_week", "purchase_date"]


class RecordError(ValueError):
    """A single review failed validation; ``reason`` is the report code."""

    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


def parse_timestamp(value) -> datetime:
    """Parse ``YYYY-MM-DD`` or ``YYYY-MM-DDTHH:MM[:SS]``; a bare date is midnight."""
    if isinstance(value, datetime):
        return value
    if not isinstance(value, str) or not _TIMESTAMP_RE.match(value):
        raise RecordError("invalid_timestamp", repr(value))
    try:
        return datetime.fromisoformat(value)
    except ValueError as exc:
        raise RecordError("invalid_timestamp", repr(value)) from exc


def format_timestamp(ts: datetime) -> str:
    return ts.strftime("%Y-%m-%dT%H:%M:%S")


def compute_time_interval(purchase, review) -> int:
    """Whole days elapsed between purchase and review (floor)."""
    start = parse_timestamp(purchase)
    end = parse_timestamp(review)
    if end < start:
        raise RecordError("negative_interval", f"review {end} precedes purchase {start}")
    return (end - start) // timedelta(days=1)


def interval_week(interval_days: int) -> int:
    """1-based week index: days 0-6 are week 1, day 90 is week 13."""
    return interval_days // 7 + 1


@dataclass(frozen=True)
class ReviewRecord:
    id: str
    product: str
    tokens: tuple[TaggedToken, ...]
    purchase_time: datetime
    review_time: datetime
    interval_days: int

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "product": self.product,
            "purchase_time": format_timestamp(self.purchase_time),
            "review_time": format_timestamp(self.review_time),
            "tokens": [{"w": t.surface, "pos": t.pos} for t in self.tokens],
        }


@dataclass(frozen=True)
class Corpus:
    records: tuple[ReviewRecord, ...]
    product: str | None = None
    max_interval: int = DEFAULT_MAX_INTERVAL

    def __post_init__(self):
        seen = set()
        for r in self.records:
            if r.id in seen:
                raise ValueError(f"duplicate record id {r.id!r}")
            seen.add(r.id)
            if not 0 <= r.interval_days <= self.max_interval:
                raise ValueError(f"record {r.id!r} interval {r.interval_days} outside 0..{self.max_interval}")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


@dataclass
class RejectionReport:
    rejections: list[tuple[int, str]] = field(default_factory=list)
    filtered: int = 0

    def add(self, line: int, reason: str) -> None:
        self.rejections.append((line, reason))

    def __len__(self) -> int:
        return len(self.rejections)

    def counts(self) -> dict[str, int]:
        return dict(Counter(reason for _, reason in self.rejections))

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["line", "reason"])
            w.writerows(self.rejections)


def make_record(
    data: dict,
    max_interval: int = DEFAULT_MAX_INTERVAL,
    segmenter: LongestMatchSegmenter | None = None,
) -> ReviewRecord:
    """Validate one decoded JSON object and build a record from it."""
    if not isinstance(data, dict):
        raise RecordError("invalid_field", "line is not a JSON object")
    for key in ("id", "product", "purchase_time", "review_time"):
        if data.get(key) is None:
            raise RecordError("missing_field", key)
    if data.get("tokens") is None and data.get("text") is None:
        raise RecordError("missing_field", "tokens|text")
    if not isinstance(data["id"], str) or not isinstance(data["product"], str):
        raise RecordError("invalid_field", "id and product must be strings")

    interval = compute_time_interval(data["purchase_time"], data["review_time"])
    if interval > max_interval:
        raise RecordError("interval_out_of_range", f"{interval} > {max_interval}")

    if data.get("tokens") is None and segmenter is None:
        raise RecordError("tokenizer_unavailable", "raw text needs a dictionary")
    try:
        tokens = tokenize(data, segmenter=segmenter)
    except (TokenizerError, KeyError, TypeError, IndexError) as exc:
        raise RecordError("invalid_field", f"tokens: {exc}") from exc
    if not tokens:
        raise RecordError("empty_tokens")

    return ReviewRecord(
        id=data["id"],
        product=data["product"],
        tokens=tuple(tokens),
        purchase_time=parse_timestamp(data["purchase_time"]),
        review_time=parse_timestamp(data["review_time"]),
        interval_days=interval,
    )


def load_corpus(
    path,
    max_interval: int = DEFAULT_MAX_INTERVAL,
    product: str | None = None,
    segmenter: LongestMatchSegmenter | None = None,
) -> tuple[Corpus, RejectionReport]:
    """Load a JSON-lines review file.

    Bad lines never abort the load; each is recorded in the report with its
    1-based line number and a reason code. Records of other products are
    skipped when ``product`` is given and counted as ``filtered``.
    """
    report = RejectionReport()
    records: list[ReviewRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError:
                report.add(lineno, "malformed_json")
                continue
            try:
                rec = make_record(data, max_interval, segmenter)
            except RecordError as exc:
                report.add(lineno, exc.reason)
                continue
            if product is not None and rec.product != product:
                report.filtered += 1
                continue
            if rec.id in seen:
                report.add(lineno, "duplicate_id")
                continue
            seen.add(rec.id)
            records.append(rec)
    if report.rejections:
        logger.info("rejected %d lines from %s: %s", len(report), path, report.counts())
    return Corpus(tuple(records), product, max_interval), report


def write_corpus(records: Iterable[ReviewRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False, separators=(",", ":")) + "\n")


def bin_records(corpus: Corpus, axis: BinAxis) -> dict:
    """Group record ids by interval day, interval week or purchase date."""
    if axis == "interval_day":
        key = lambda r: r.interval_days  # noqa: E731
    elif axis == "interval_week":
        key = lambda r: interval_week(r.interval_days)  # noqa: E731
    elif axis == "purchase_date":
        key = lambda r: r.purchase_time.date()  # noqa: E731
    else:
        raise ValueError(f"unknown axis {axis!r}")
    bins: dict = {}
    for rec in corpus.records:
        bins.setdefault(key(rec), []).append(rec.id)
    return dict(sorted(bins.items()))
