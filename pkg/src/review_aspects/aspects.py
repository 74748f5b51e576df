"""Candidate attribute extraction and allocation/transfer clustering into aspects."""

from __future__ import annotations

import csv
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .corpus import Corpus
from .preprocess import DEFAULT_NOUN_PREFIXES, is_noun
from .resources import EmbeddingTable

logger = logging.getLogger(__name__)

# Noun phrases are stored as their tokens joined by this string, so that a
# phrase is a single whitespace-free key in the embedding file.
PHRASE_JOINER = "_"

DEFAULT_MIN_TF = 20
DEFAULT_THRESHOLD = 0.7


class SimilarityError(ValueError):
    pass


@dataclass(frozen=True)
class AttributeCandidate:
    surface: str
    tf: int


def join_phrase(tokens: Sequence[str]) -> str:
    return PHRASE_JOINER.join(tokens)


def split_phrase(surface: str) -> tuple[str, ...]:
    return tuple(surface.split(PHRASE_JOINER))


def extract_candidates(
    corpus: Corpus,
    min_tf: int = DEFAULT_MIN_TF,
    max_phrase_len: int = 3,
    stoplist: Iterable[str] = (),
    noun_prefixes: Sequence[str] = DEFAULT_NOUN_PREFIXES,
) -> list[AttributeCandidate]:
    """Count noun runs and their sub-phrases; keep those with ``tf > min_tf``.

    Every maximal run of consecutive noun tokens contributes each of its
    contiguous sub-sequences of length 1..``max_phrase_len``. The threshold is
    strict. Output is ordered by descending tf, ties by first occurrence.
    """
    stop = frozenset(stoplist)
    counts: Counter[str] = Counter()
    for rec in corpus.records:
        run: list[str] = []
        for tok in (*rec.tokens, None):
            if tok is not None and is_noun(tok.pos, noun_prefixes):
                run.append(tok.surface)
                continue
            for size in range(1, min(len(run), max_phrase_len) + 1):
                for start in range(len(run) - size + 1):
                    counts[join_phrase(run[start:start + size])] += 1
            run = []
    # Counter keeps insertion order and sorted() is stable, so ties stay in
    # first-occurrence order.
    kept = [(w, n) for w, n in counts.items() if n > min_tf and w not in stop]
    kept.sort(key=lambda wn: -wn[1])
    return [AttributeCandidate(w, n) for w, n in kept]


def cosine_similarity(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise SimilarityError(f"dimension mismatch {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise SimilarityError("undefined similarity for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


# --------------------------------------------------------------------------
# Aspect model
# --------------------------------------------------------------------------


@dataclass
class Aspect:
    id: int
    label: str
    members: list[str]
    center_vector: np.ndarray | None = None

    @property
    def k(self) -> int:
        return len(self.members)


@dataclass
class AspectModel:
    clusters: list[Aspect]
    excluded: list[str] = field(default_factory=list)

    def __post_init__(self):
        seen: dict[str, int] = {}
        for a in self.clusters:
            if not a.members or a.label not in a.members:
                raise ValueError(f"aspect {a.id} must be non-empty and contain its center {a.label!r}")
            for m in a.members:
                if m in seen:
                    raise ValueError(f"attribute {m!r} in aspects {seen[m]} and {a.id}")
                seen[m] = a.id
        self._owner = seen
        self._by_id = {a.id: a for a in self.clusters}
        if len(self._by_id) != len(self.clusters):
            raise ValueError("duplicate aspect ids")

    def __len__(self) -> int:
        return len(self.clusters)

    def aspect(self, aspect_id: int) -> Aspect:
        try:
            return self._by_id[aspect_id]
        except KeyError:
            raise KeyError(f"unknown aspect id {aspect_id}") from None

    def aspect_of(self, attribute: str) -> int | None:
        return self._owner.get(attribute)

    @property
    def attributes(self) -> list[str]:
        return [m for a in self.clusters for m in a.members]

    def partition(self) -> set[frozenset[str]]:
        return {frozenset(a.members) for a in self.clusters}


def write_aspect_model(model: AspectModel, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["aspect_id", "label", "member"])
        for a in model.clusters:
            for m in a.members:
                w.writerow([a.id, a.label, m])


def read_aspect_model(path, embeddings: EmbeddingTable | None = None) -> AspectModel:
    """Read an ``aspect_id,label,member`` CSV, e.g. a hand-curated override."""
    order: list[int] = []
    labels: dict[int, str] = {}
    members: dict[int, list[str]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            aid = int(row["aspect_id"])
            if aid not in labels:
                order.append(aid)
                labels[aid] = row["label"]
                members[aid] = []
            elif labels[aid] != row["label"]:
                raise ValueError(f"aspect {aid} has two labels {labels[aid]!r} and {row['label']!r}")
            members[aid].append(row["member"])
    clusters = []
    for aid in order:
        vec = embeddings.get(labels[aid]) if embeddings is not None else None
        clusters.append(Aspect(aid, labels[aid], members[aid], vec))
    return AspectModel(clusters)


# --------------------------------------------------------------------------
# Clustering
# --------------------------------------------------------------------------


def _embedded(candidates, embeddings: EmbeddingTable) -> tuple[list[str], np.ndarray, list[str]]:
    words: list[str] = []
    vecs: list[np.ndarray] = []
    excluded: list[str] = []
    for c in candidates:
        surface = getattr(c, "surface", c)
        vec = embeddings.get(surface)
        if vec is None or not np.any(vec):
            excluded.append(surface)
            continue
        words.append(surface)
        vecs.append(vec)
    if excluded:
        logger.info("%d candidates lack a usable embedding: %s", len(excluded), excluded[:10])
    matrix = np.vstack(vecs) if vecs else np.zeros((0, embeddings.dimension))
    return words, matrix, excluded


def allocate(candidates, embeddings: EmbeddingTable, threshold: float = DEFAULT_THRESHOLD) -> AspectModel:
    """Allocation phase: seed-or-join against fixed cluster centers.

    Candidates are visited in the given order. Each joins the cluster whose
    center is most similar if that similarity reaches ``threshold``
    (inclusive, lowest cluster id on ties), otherwise it becomes the center
    of a new cluster. Candidates without an embedding are left out and listed
    in ``model.excluded``.
    """
    words, matrix, excluded = _embedded(candidates, embeddings)
    norms = np.linalg.norm(matrix, axis=1)
    centers: list[int] = []
    members: list[list[int]] = []
    for i in range(len(words)):
        if centers:
            sims = (matrix[centers] @ matrix[i]) / (norms[centers] * norms[i])
            best = int(np.argmax(sims))
            if sims[best] >= threshold:
                members[best].append(i)
                continue
        centers.append(i)
        members.append([i])
    clusters = [
        Aspect(n + 1, words[c], [words[m] for m in mem], matrix[c].copy())
        for n, (c, mem) in enumerate(zip(centers, members))
    ]
    return AspectModel(clusters, excluded)


def transfer(model: AspectModel, embeddings: EmbeddingTable, threshold: float = DEFAULT_THRESHOLD) -> AspectModel:
    """Transfer phase: one pass moving members toward later-created centers.

    Clusters are scanned in creation order. A non-center member moves to the
    later cluster whose center is most similar when that similarity strictly
    beats its current center. Centers never move, so no cluster empties.
    """
    clusters = [Aspect(a.id, a.label, list(a.members), a.center_vector) for a in model.clusters]
    centers = []
    for a in clusters:
        vec = a.center_vector if a.center_vector is not None else embeddings.get(a.label)
        if vec is None:
            raise SimilarityError(f"no vector for center {a.label!r}")
        centers.append(np.asarray(vec, dtype=float))
    center_matrix = np.vstack(centers) if centers else np.zeros((0, embeddings.dimension))
    center_norms = np.linalg.norm(center_matrix, axis=1)

    for ci, cluster in enumerate(clusters):
        later = list(range(ci + 1, len(clusters)))
        if not later:
            break
        stay: list[str] = []
        for m in cluster.members:
            if m == cluster.label:
                stay.append(m)
                continue
            vec = embeddings.get(m)
            if vec is None:
                raise SimilarityError(f"no vector for member {m!r}")
            norm = np.linalg.norm(vec)
            current = float(center_matrix[ci] @ vec / (center_norms[ci] * norm))
            sims = (center_matrix[later] @ vec) / (center_norms[later] * norm)
            best = int(np.argmax(sims))
            if sims[best] > current and sims[best] >= threshold:
                clusters[later[best]].members.append(m)
            else:
                stay.append(m)
        cluster.members = stay
    return AspectModel([a for a in clusters if a.members], list(model.excluded))


def cluster_attributes(candidates, embeddings: EmbeddingTable, threshold: float = DEFAULT_THRESHOLD) -> AspectModel:
    return transfer(allocate(candidates, embeddings, threshold), embeddings, threshold)


# --------------------------------------------------------------------------
# Mentions
# --------------------------------------------------------------------------


class Mention(NamedTuple):
    aspect_id: int
    attribute: str
    index: int
    length: int


class MentionMatcher:
    def __init__(self, model: AspectModel):
        self.table: dict[tuple[str, ...], tuple[int, str]] = {}
        for a in model.clusters:
            for m in a.members:
                self.table[split_phrase(m)] = (a.id, m)
        self.max_len = max((len(k) for k in self.table), default=0)

    def find(self, surfaces: Sequence[str]) -> list[Mention]:
        """Longest-first, left-to-right, non-overlapping exact matches."""
        out: list[Mention] = []
        i, n = 0, len(surfaces)
        while i < n:
            for size in range(min(self.max_len, n - i), 0, -1):
                hit = self.table.get(tuple(surfaces[i:i + size]))
                if hit is not None:
                    out.append(Mention(hit[0], hit[1], i, size))
                    i += size
                    break
            else:
                i += 1
        return out


def map_mentions(corpus: Corpus, model: AspectModel) -> dict[str, list[Mention]]:
    """Per review id, every attribute mention with its aspect and token span."""
    matcher = MentionMatcher(model)
    return {rec.id: matcher.find(rec.surfaces) for rec in corpus.records}
