import pytest
from hypothesis import given, strategies as st

from review_aspects.preprocess import LongestMatchSegmenter, TokenizerError, is_noun, tokenize

from oracles import longest_match_by_hand


def pairs(tokens):
    return [(t.surface, t.pos, t.index) for t in tokens]


def test_pretagged_passthrough():
    out = tokenize({"tokens": [("screen", "n"), ("good", "a")]})
    assert pairs(out) == [("screen", "n", 0), ("good", "a", 1)]
    out = tokenize({"tokens": [{"w": "screen", "pos": "n"}], "text": "ignored"}, base_dictionary={"s": "x"})
    assert pairs(out) == [("screen", "n", 0)]


def test_longest_match():
    out = tokenize({"text": "ABCD"}, base_dictionary={"AB": "n", "ABC": "n", "D": "v"})
    assert pairs(out) == [("ABC", "n", 0), ("D", "v", 1)]


def test_fallback_tag():
    assert pairs(tokenize({"text": "AZ"}, base_dictionary={"A": "n"})) == [("A", "n", 0), ("Z", "x", 1)]


def test_user_dictionary_first():
    seg = LongestMatchSegmenter(user_dictionary={"AB": "nz"}, base_dictionary={"ABC": "n", "C": "v"})
    assert pairs(seg.segment("ABC")) == [("AB", "nz", 0), ("C", "v", 1)]


def test_no_dictionary():
    with pytest.raises(TokenizerError, match="tokenizer requires dictionary"):
        tokenize({"text": "abc"})


def test_malformed_pretagged():
    with pytest.raises(TokenizerError):
        tokenize({"tokens": [("screen", 3)]})


@pytest.mark.parametrize("tag, expected", [("n", True), ("nz", True), ("v", False), ("a", False), ("", False)])
def test_is_noun(tag, expected):
    assert is_noun(tag) is expected


def test_is_noun_custom_prefixes():
    assert is_noun("NN", ("NN",)) and not is_noun("n", ("NN",))


words = st.text(alphabet="abc", min_size=1, max_size=3)


@given(st.dictionaries(words, st.sampled_from(["n", "v", "a"]), min_size=1), st.text(alphabet="abcd", max_size=30))
def test_segmentation_matches_hand_oracle(dictionary, text):
    out = LongestMatchSegmenter(base_dictionary=dictionary).segment(text)
    assert [(t.surface, t.pos) for t in out] == longest_match_by_hand(text, dictionary)
    assert "".join(t.surface for t in out) == text
    assert [t.index for t in out] == list(range(len(out)))
