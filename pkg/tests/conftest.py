import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from codemix.corpus import TAGS, Tag, TaggedCorpus, Utterance  # noqa: E402


def random_corpus(rng, max_tokens=200, vocab_size=30, max_len=12):
    """Distinct random utterances over words w0..w{vocab_size-1}, at most max_tokens tokens."""
    budget = int(rng.integers(2, max_tokens + 1))
    utts, seen = [], set()
    while budget > 0:
        n = int(min(budget, rng.integers(1, max_len + 1)))
        budget -= n
        toks = tuple(f"w{k}" for k in rng.integers(0, vocab_size, size=n))
        if toks in seen:
            continue
        seen.add(toks)
        tags = tuple(TAGS[k] for k in rng.integers(0, len(TAGS), size=n))
        utts.append(Utterance(toks, tags))
    return TaggedCorpus(tuple(utts))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def abc_corpus():
    return TaggedCorpus((Utterance(("a", "b", "c"), (Tag.En, Tag.Hi, Tag.En)),))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
