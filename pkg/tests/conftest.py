import sys
from datetime import datetime, timedelta
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from review_aspects.aspects import Aspect, AspectModel  # noqa: E402
from review_aspects.corpus import Corpus, ReviewRecord  # noqa: E402
from review_aspects.preprocess import TaggedToken  # noqa: E402

BASE = datetime(2016, 3, 17, 9, 0, 0)


def tagged(*pairs):
    """tagged("screen/n", "good/a") -> TaggedToken tuple; bare words are tagged x."""
    out = []
    for i, p in enumerate(pairs):
        w, _, pos = p.partition("/")
        out.append(TaggedToken(w, pos or "x", i))
    return tuple(out)


def record(rid, tokens, ti=0, purchase=BASE, product="p"):
    if isinstance(tokens, str):
        tokens = tokens.split()
    if tokens and not isinstance(tokens[0], TaggedToken):
        tokens = tagged(*tokens)
    return ReviewRecord(rid, product, tuple(tokens), purchase, purchase + timedelta(days=ti, hours=1), ti)


def corpus_of(*specs, max_interval=90):
    """specs are (tokens, ti) pairs; ids are assigned in order."""
    return Corpus(tuple(record(f"r{i}", toks, ti) for i, (toks, ti) in enumerate(specs)), None, max_interval)


def model_of(*groups):
    """model_of(["screen", "display"], ["battery"]) with 1-based ids, center = first member."""
    return AspectModel([Aspect(i, g[0], list(g)) for i, g in enumerate(groups, start=1)])


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


# Acceptance criteria append (number, passed, detail) here; printed after the run.
ACCEPTANCE_RESULTS: list[tuple[int, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
