"""Loaders for the lexicon, word lists, dictionaries and embedding table."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

logger = logging.getLogger(__name__)


class ResourceError(ValueError):
    pass


def _data_lines(path) -> Iterator[tuple[int, str]]:
    """Yield ``(lineno, line)`` skipping blanks and ``#`` comments."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


# --------------------------------------------------------------------------
# Sentiment lexicon
# --------------------------------------------------------------------------

_POLARITY = {"+1": 1, "1": 1, "-1": -1}


@dataclass(frozen=True)
class SentimentLexicon:
    entries: dict[str, int]

    def __post_init__(self):
        bad = [w for w, v in self.entries.items() if v not in (1, -1)]
        if bad:
            raise ResourceError(f"polarity must be ±1 for {bad}")

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, word: str) -> int | None:
        return self.entries.get(word)

    def flipped(self) -> "SentimentLexicon":
        return SentimentLexicon({w: -v for w, v in self.entries.items()})

    def merged(self, supplement: "SentimentLexicon") -> "SentimentLexicon":
        """Overlay ``supplement``; its entries win on conflict."""
        return SentimentLexicon({**self.entries, **supplement.entries})


def parse_lexicon(lines) -> SentimentLexicon:
    entries: dict[str, int] = {}
    first_seen: dict[str, int] = {}
    conflicts: list[str] = []
    for lineno, line in lines:
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise ResourceError(f"line {lineno}: expected word<TAB>polarity")
        word, pol = parts[0], parts[1].strip()
        if pol not in _POLARITY:
            raise ResourceError(f"line {lineno}: polarity must be ±1, got {pol!r}")
        value = _POLARITY[pol]
        if word in entries and entries[word] != value:
            conflicts.append(f"{word!r} (lines {first_seen[word]} and {lineno})")
            continue
        entries.setdefault(word, value)
        first_seen.setdefault(word, lineno)
    if conflicts:
        raise ResourceError("conflicting polarity for " + ", ".join(conflicts))
    return SentimentLexicon(entries)


def load_lexicon(path, supplemental=None) -> SentimentLexicon:
    """Load a ``word<TAB>polarity`` file, optionally overlaid by a supplement file."""
    lex = parse_lexicon(_data_lines(path))
    if supplemental is not None:
        lex = lex.merged(parse_lexicon(_data_lines(supplemental)))
    return lex


# --------------------------------------------------------------------------
# Word lists and dictionaries
# --------------------------------------------------------------------------


def load_wordlist(path) -> frozenset[str]:
    """One word per line; ``#`` starts a comment line."""
    return frozenset(line.strip() for _, line in _data_lines(path))


def load_negations(path) -> frozenset[str]:
    words = load_wordlist(path)
    if not words:
        raise ResourceError(f"negation list {path} is empty")
    return words


def load_dictionary(path, tagset: frozenset[str] | None = None) -> dict[str, str]:
    """Load a ``surface<TAB>tag`` dictionary; later rows override earlier ones."""
    out: dict[str, str] = {}
    for lineno, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1].strip():
            raise ResourceError(f"{path}:{lineno}: expected surface<TAB>tag")
        tag = parts[1].strip()
        if tagset is not None and tag not in tagset:
            raise ResourceError(f"{path}:{lineno}: tag {tag!r} not in configured tagset")
        out[parts[0]] = tag
    return out


# --------------------------------------------------------------------------
# Embeddings
# --------------------------------------------------------------------------


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]
    rejected: int = 0
    duplicates: list[str] = field(default_factory=list)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, word: str) -> np.ndarray | None:
        """The stored vector, or ``None`` when the word is absent."""
        return self.vectors.get(word)


def _is_header(fields: list[str]) -> bool:
    return len(fields) == 2 and all(f.isdigit() for f in fields)


def load_embeddings(path) -> EmbeddingTable:
    """Read whitespace-separated text vectors with an optional ``count dim`` header.

    The dimension comes from the first data row. Rows of another arity or with
    non-numeric values are skipped and counted in ``rejected``; a repeated word
    keeps its last vector and is listed in ``duplicates``.
    """
    vectors: dict[str, np.ndarray] = {}
    duplicates: list[str] = []
    rejected = 0
    dim: int | None = None
    first = True
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            fields = raw.split()
            if not fields:
                continue
            if first:
                first = False
                if _is_header(fields):
                    continue
            word, values = fields[0], fields[1:]
            if dim is None:
                if not values:
                    rejected += 1
                    continue
                dim = len(values)
            if len(values) != dim:
                logger.debug("%s:%d: expected %d values, got %d", path, lineno, dim, len(values))
                rejected += 1
                continue
            try:
                vec = np.array(values, dtype=float)
            except ValueError:
                rejected += 1
                continue
            if word in vectors:
                duplicates.append(word)
                logger.warning("%s:%d: duplicate vector for %r, keeping the last one", path, lineno, word)
            vectors[word] = vec
    if not vectors:
        raise ResourceError(f"no vectors loaded from {path}")
    return EmbeddingTable(dim, vectors, rejected, duplicates)


def write_embeddings(table: dict[str, np.ndarray], path, precision: int = 6) -> None:
    words = list(table)
    dim = len(table[words[0]]) if words else 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(words)} {dim}\n")
        for w in words:
            fh.write(w + " " + " ".join(f"{v:.{precision}f}" for v in table[w]) + "\n")
