"""Deterministic synthetic review corpora with planted attention and sentiment.

Each aspect emits ``round(a * (ti + 1) ** -b)`` single-aspect reviews at every
interval ``ti``, so attention counts are exact rather than sampled. Sentiment
polarity is drawn per review with probability ``p_pos(ti)``; some reviews
express it through a negated word of the opposite polarity, or a doubly negated
word of the same polarity, to exercise the negation rule.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .aspects import Aspect, AspectModel, write_aspect_model
from .corpus import Corpus, ReviewRecord, write_corpus
from .preprocess import TaggedToken
from .resources import write_embeddings

PositiveSchedule = float | Mapping[int, float] | Callable[[int], float]


def ramp(early: float, late: float, early_until: int = 10, late_from: int = 30) -> Callable[[int], float]:
    """``early`` up to ``early_until``, ``late`` from ``late_from``, linear in between."""

    def p(ti: int) -> float:
        if ti <= early_until:
            return early
        if ti >= late_from:
            return late
        t = (ti - early_until) / (late_from - early_until)
        return early + t * (late - early)

    return p


@dataclass(frozen=True)
class AspectPlan:
    label: str
    members: tuple[str, ...]
    a: float
    b: float
    p_pos: PositiveSchedule = 0.5
    active_until: int | None = None  # last interval at which the aspect is emitted

    def positive_probability(self, ti: int) -> float:
        if callable(self.p_pos):
            return float(self.p_pos(ti))
        if isinstance(self.p_pos, Mapping):
            return float(self.p_pos.get(ti, 0.5))
        return float(self.p_pos)

    def planned_count(self, ti: int) -> int:
        if self.active_until is not None and ti > self.active_until:
            return 0
        return int(round(self.a * (ti + 1) ** (-self.b)))


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    aspects: tuple[AspectPlan, ...]
    max_interval: int = 90
    product: str = "synthetic-phone"
    purchase_start: date = date(2016, 3, 17)
    purchase_end: date = date(2017, 5, 31)
    background_reviews: int = 0
    single_negation_rate: float = 0.15
    double_negation_rate: float = 0.05
    positive_words: tuple[str, ...] = ("good", "great", "excellent", "smooth", "awesome")
    negative_words: tuple[str, ...] = ("bad", "poor", "terrible", "laggy", "awful")
    negation_words: tuple[str, ...] = ("not", "never", "hardly")
    filler: tuple[tuple[str, str], ...] = (
        ("I", "r"), ("really", "d"), ("bought", "v"), ("today", "t"), ("this", "r"), ("so", "d"),
    )
    stop_nouns: tuple[str, ...] = ("thing",)
    embedding_dim: int = 32
    embedding_noise: float = 0.12

    def __post_init__(self):
        seen: set[str] = set()
        for plan in self.aspects:
            if not plan.members:
                raise ValueError(f"aspect {plan.label!r} has no members")
            if not (plan.a > 0 and np.isfinite(plan.a) and np.isfinite(plan.b)):
                raise ValueError(f"aspect {plan.label!r}: a must be positive and a, b finite")
            for m in plan.members:
                if m in seen:
                    raise ValueError(f"member {m!r} appears in more than one aspect")
                seen.add(m)
            for ti in range(self.max_interval + 1):
                p = plan.positive_probability(ti)
                if not 0.0 <= p <= 1.0:
                    raise ValueError(f"aspect {plan.label!r}: p_pos({ti}) = {p} outside [0, 1]")
        if self.single_negation_rate + self.double_negation_rate > 1:
            raise ValueError("negation rates sum above 1")


@dataclass
class GroundTruth:
    planted: dict[str, tuple[float, float]]
    members: dict[str, tuple[str, ...]]
    counts: dict[str, dict[int, int]]
    expected_sentiment: dict[str, dict[int, float]] = field(default_factory=dict)

    def aspect_model(self) -> AspectModel:
        """The planted partition in aspect-model form, center = first member."""
        return AspectModel([
            Aspect(i, ms[0], list(ms)) for i, (_, ms) in enumerate(self.members.items(), start=1)
        ])


# --------------------------------------------------------------------------
# Named scenarios
# --------------------------------------------------------------------------


def default_scenario(seed: int = 20160317) -> ScenarioSpec:
    """Eight aspects with a in [50, 500] and b in [0.8, 1.5], about 50k reviews."""
    aspects = (
        AspectPlan("screen", ("screen", "display"), 500, 1.5, ramp(0.9, 0.6)),
        AspectPlan("battery", ("battery", "charge", "endurance"), 500, 1.2, ramp(0.3, 0.45)),
        AspectPlan("price", ("price", "cost"), 450, 1.4, ramp(0.8, 0.6)),
        AspectPlan("appearance", ("appearance", "look", "design"), 400, 1.0, ramp(0.95, 0.7)),
        AspectPlan("system", ("system", "software"), 300, 1.3, ramp(0.7, 0.55)),
        AspectPlan("camera", ("camera", "lens"), 200, 1.0, ramp(0.85, 0.65)),
        AspectPlan("logistics", ("logistics", "delivery", "courier"), 100, 0.8, ramp(0.9, 0.5)),
        AspectPlan("sound", ("sound", "speaker"), 50, 0.8, 0.6),
    )
    return ScenarioSpec(seed=seed, aspects=aspects, background_reviews=40600)


def sentiment_scenario(seed: int = 7) -> ScenarioSpec:
    """One positive-leaning and one negative-leaning aspect whose tendency is sharpest early."""
    aspects = (
        AspectPlan("screen", ("screen", "display"), 12000, 1.5, ramp(0.9, 0.6)),
        AspectPlan("battery", ("battery", "endurance"), 12000, 1.5, ramp(0.1, 0.4)),
    )
    return ScenarioSpec(seed=seed, aspects=aspects)


def early_aspects_scenario(seed: int = 11) -> ScenarioSpec:
    """Four common aspects plus four that only appear in the first week."""
    common = default_scenario().aspects[:4]
    extra = (
        AspectPlan("gift", ("gift", "bonus"), 40, 0.5, 0.8, active_until=7),
        AspectPlan("seller", ("seller", "service"), 30, 0.5, 0.7, active_until=7),
        AspectPlan("packaging", ("packaging", "box"), 30, 0.3, 0.6, active_until=7),
        AspectPlan("invoice", ("invoice", "receipt"), 25, 0.3, 0.5, active_until=7),
    )
    return ScenarioSpec(seed=seed, aspects=common + extra)


SCENARIOS: dict[str, Callable[..., ScenarioSpec]] = {
    "default": default_scenario,
    "sentiment": sentiment_scenario,
    "early-aspects": early_aspects_scenario,
}


# --------------------------------------------------------------------------
# Generation
# --------------------------------------------------------------------------


def _sentiment_tokens(spec: ScenarioSpec, rng: np.random.Generator, polarity: int) -> list[tuple[str, str]]:
    u = rng.random()
    if u < spec.double_negation_rate:
        negs, word_pol = 2, polarity
    elif u < spec.double_negation_rate + spec.single_negation_rate:
        negs, word_pol = 1, -polarity
    else:
        negs, word_pol = 0, polarity
    words = spec.positive_words if word_pol > 0 else spec.negative_words
    out = [("is", "v")]
    out += [(spec.negation_words[rng.integers(len(spec.negation_words))], "d") for _ in range(negs)]
    out.append((words[rng.integers(len(words))], "a"))
    return out


def _filler(spec: ScenarioSpec, rng: np.random.Generator) -> list[tuple[str, str]]:
    return [spec.filler[i] for i in rng.integers(len(spec.filler), size=int(rng.integers(0, 3)))]


def generate_corpus(spec: ScenarioSpec) -> tuple[Corpus, GroundTruth]:
    rng = np.random.default_rng(spec.seed)
    window_days = (spec.purchase_end - spec.purchase_start).days + 1
    drafts: list[tuple[int, list[tuple[str, str]]]] = []
    truth = GroundTruth({}, {}, {}, {})

    for plan in spec.aspects:
        truth.planted[plan.label] = (plan.a, plan.b)
        truth.members[plan.label] = plan.members
        truth.counts[plan.label] = {}
        truth.expected_sentiment[plan.label] = {}
        turn = 0
        for ti in range(spec.max_interval + 1):
            n = plan.planned_count(ti)
            truth.counts[plan.label][ti] = n
            p = plan.positive_probability(ti)
            if n:
                truth.expected_sentiment[plan.label][ti] = 2 * p - 1
            for _ in range(n):
                attr = plan.members[turn % len(plan.members)]
                turn += 1
                polarity = 1 if rng.random() < p else -1
                tokens = _filler(spec, rng) + [(attr, "n")] + _sentiment_tokens(spec, rng, polarity) + [("。", "w")]
                drafts.append((ti, tokens))

    for _ in range(spec.background_reviews):
        ti = int(rng.integers(spec.max_interval + 1))
        tokens = _filler(spec, rng)
        if spec.stop_nouns and rng.random() < 0.5:
            tokens += [("this", "r"), (spec.stop_nouns[rng.integers(len(spec.stop_nouns))], "n")]
        tokens += _sentiment_tokens(spec, rng, 1 if rng.random() < 0.5 else -1) + [("。", "w")]
        drafts.append((ti, tokens))

    if not drafts:
        raise ValueError("scenario produces zero reviews")

    order = rng.permutation(len(drafts))
    base = datetime.combine(spec.purchase_start, datetime.min.time())
    records = []
    for idx, j in enumerate(order):
        ti, tokens = drafts[j]
        purchase = base + timedelta(days=int(rng.integers(window_days)), seconds=int(rng.integers(86400)))
        review = purchase + timedelta(days=ti, seconds=int(rng.integers(86400)))
        records.append(ReviewRecord(
            id=f"r{idx:06d}",
            product=spec.product,
            tokens=tuple(TaggedToken(w, pos, i) for i, (w, pos) in enumerate(tokens)),
            purchase_time=purchase,
            review_time=review,
            interval_days=ti,
        ))
    return Corpus(tuple(records), spec.product, spec.max_interval), truth


def synthetic_embeddings(spec: ScenarioSpec) -> dict[str, np.ndarray]:
    """Near-identical vectors within an aspect, near-orthogonal across aspects."""
    rng = np.random.default_rng([spec.seed, 1])
    dim = max(spec.embedding_dim, len(spec.aspects))
    basis, _ = np.linalg.qr(rng.standard_normal((dim, len(spec.aspects))))
    out = {}
    for col, plan in enumerate(spec.aspects):
        for m in plan.members:
            noise = rng.standard_normal(dim) * spec.embedding_noise / np.sqrt(dim)
            out[m] = basis[:, col] + noise
    return out


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def write_scenario(spec: ScenarioSpec, out_dir) -> dict[str, Path]:
    """Write the corpus and every resource file a pipeline run needs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus, truth = generate_corpus(spec)
    paths = {
        "corpus": out / "corpus.jsonl",
        "ground_truth": out / "ground_truth.csv",
        "planted_aspects": out / "planted_aspects.csv",
        "embeddings": out / "embeddings.txt",
        "lexicon": out / "lexicon.tsv",
        "negations": out / "negations.txt",
        "stoplist": out / "stoplist.txt",
    }
    write_corpus(corpus.records, paths["corpus"])
    with open(paths["ground_truth"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["aspect", "a", "b"])
        for label, (a, b) in truth.planted.items():
            w.writerow([label, a, b])
    write_aspect_model(truth.aspect_model(), paths["planted_aspects"])
    write_embeddings(synthetic_embeddings(spec), paths["embeddings"])
    lex = [f"{w}\t+1" for w in spec.positive_words] + [f"{w}\t-1" for w in spec.negative_words]
    _atomic_write_text(paths["lexicon"], "\n".join(lex) + "\n")
    _atomic_write_text(paths["negations"], "\n".join(spec.negation_words) + "\n")
    _atomic_write_text(paths["stoplist"], "# generic nouns that are not product attributes\n"
                       + "\n".join(spec.stop_nouns) + "\n")
    return paths


def read_ground_truth(path) -> dict[str, tuple[float, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return {row["aspect"]: (float(row["a"]), float(row["b"])) for row in csv.DictReader(fh)}


def planted_members(spec: ScenarioSpec) -> Sequence[frozenset[str]]:
    return [frozenset(p.members) for p in spec.aspects]
