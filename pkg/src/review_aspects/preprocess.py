"""Tagged token streams for reviews.

Pre-tagged input is passed through unchanged. Raw text is segmented by greedy
dictionary longest-match, a stand-in for a real segmenter that keeps the
pipeline self-contained on toy and synthetic corpora.
"""

from __future__ import annotations

from typing import Iterable, Mapping, NamedTuple, Sequence

FALLBACK_TAG = "x"
DEFAULT_NOUN_PREFIXES: tuple[str, ...] = ("n",)


class TaggedToken(NamedTuple):
    surface: str
    pos: str
    index: int


class TokenizerError(ValueError):
    pass


class LongestMatchSegmenter:
    """Left-to-right longest-match segmentation.

    At each position the user dictionary is consulted first; only when it has
    no entry starting there is the base dictionary tried. Characters covered
    by neither become single-character tokens tagged ``x``.
    """

    def __init__(
        self,
        user_dictionary: Mapping[str, str] | None = None,
        base_dictionary: Mapping[str, str] | None = None,
    ):
        self.user = dict(user_dictionary or {})
        self.base = dict(base_dictionary or {})
        if not self.user and not self.base:
            raise TokenizerError("tokenizer requires dictionary")
        self._user_max = max((len(w) for w in self.user), default=0)
        self._base_max = max((len(w) for w in self.base), default=0)

    @staticmethod
    def _longest(text: str, pos: int, table: dict[str, str], max_len: int):
        for size in range(min(max_len, len(text) - pos), 0, -1):
            piece = text[pos:pos + size]
            if piece in table:
                return piece, table[piece]
        return None

    def segment(self, text: str) -> list[TaggedToken]:
        out: list[TaggedToken] = []
        pos = 0
        while pos < len(text):
            hit = self._longest(text, pos, self.user, self._user_max)
            if hit is None:
                hit = self._longest(text, pos, self.base, self._base_max)
            if hit is None:
                hit = (text[pos], FALLBACK_TAG)
            out.append(TaggedToken(hit[0], hit[1], len(out)))
            pos += len(hit[0])
        return out


def _pretagged(tokens: Iterable) -> list[TaggedToken]:
    out = []
    for i, tok in enumerate(tokens):
        if isinstance(tok, Mapping):
            surface, pos = tok["w"], tok["pos"]
        else:
            surface, pos = tok[0], tok[1]
        if not isinstance(surface, str) or not isinstance(pos, str):
            raise TokenizerError(f"token {i} is not a (surface, pos) pair of strings")
        out.append(TaggedToken(surface, pos, i))
    return out


def tokenize(
    record_input: Mapping,
    user_dictionary: Mapping[str, str] | None = None,
    base_dictionary: Mapping[str, str] | None = None,
    segmenter: LongestMatchSegmenter | None = None,
) -> list[TaggedToken]:
    """Return the tagged tokens of one review.

    ``record_input`` carries either ``tokens`` (pre-tagged, as ``{"w", "pos"}``
    mappings or ``(surface, pos)`` pairs) or ``text``. Pre-tagged input always
    wins and is never re-segmented. Pass a prebuilt ``segmenter`` to avoid
    rebuilding the dictionary index per review.
    """
    if record_input.get("tokens") is not None:
        return _pretagged(record_input["tokens"])
    text = record_input.get("text")
    if text is None:
        raise TokenizerError("record has neither tokens nor text")
    if segmenter is None:
        segmenter = LongestMatchSegmenter(user_dictionary, base_dictionary)
    return segmenter.segment(text)


def is_noun(tag: str, prefixes: Sequence[str] = DEFAULT_NOUN_PREFIXES) -> bool:
    return any(tag.startswith(p) for p in prefixes)
