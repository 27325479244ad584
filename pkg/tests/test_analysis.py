import numpy as np
import pytest
import scipy.sparse as sp

from codemix.analysis import (
    PairClass,
    WordLanguages,
    assign_word_language,
    classify_pair,
    format_pair_report,
    pair_analysis,
)
from codemix.cooccurrence import Vocabulary
from codemix.corpus import Tag, Utterance
from codemix.ppmi import PpmiMatrix

En, Hi = Tag.En, Tag.Hi


def _ppmi(entries, n):
    rows, cols, vals = zip(*[(i, j, v) for (i, j), v in entries.items()])
    return PpmiMatrix(sp.csr_matrix((vals, (rows, cols)), shape=(n, n)))


def test_classify_pair():
    assert classify_pair(Hi, En) is PairClass.bilingual
    assert classify_pair(En, En) is PairClass.monolingual
    assert classify_pair(En, Tag.NE) is PairClass.excluded
    assert classify_pair(None, Hi) is PairClass.excluded


def test_majority_tags():
    vocab = Vocabulary(("x", "y", "z", "unseen"), (1, 1, 1, 1))
    corpus = [
        Utterance(("x", "y", "z"), (Hi, En, En)),
        Utterance(("y", "z", "x"), (En, Hi, Hi)),
        Utterance(("y", "y", "q"), (En, Hi, Hi)),
    ]
    lang = assign_word_language(corpus, vocab)
    assert lang[0] is Hi
    assert lang[1] is En  # 3 En vs 1 Hi
    assert lang[2] is En  # 1 En vs 1 Hi, tie resolved by tag order
    assert lang[3] is None
    assert lang.ties == 1
    assert lang.as_codes().tolist() == [0, 1, 1, -1]


def test_averages_and_empty_class():
    lang = WordLanguages((Hi, En, Hi, Tag.NE), 0)
    only_bilingual = _ppmi({(0, 1): 2.0, (1, 0): 2.0, (1, 2): 4.0}, 4)
    r = pair_analysis(only_bilingual, lang)
    assert r.bilingual_avg == pytest.approx(8 / 3)
    assert r.monolingual_avg is None
    mixed = _ppmi({(0, 1): 2.0, (0, 2): 1.0, (2, 0): 3.0, (0, 3): 100.0, (3, 3): 50.0}, 4)
    r = pair_analysis(mixed, lang)
    assert (r.bilingual_avg, r.monolingual_avg) == (2.0, 2.0)
    assert (r.n_bilingual, r.n_monolingual, r.n_excluded) == (1, 2, 2)


def test_target_view():
    lang = WordLanguages((Hi, En, Hi), 0)
    vocab = Vocabulary(("a", "b", "c"), (1, 1, 1))
    m = _ppmi({(0, 1): 5.0, (0, 2): 1.0, (1, 2): 9.0}, 3)
    r = pair_analysis(m, lang, "a", vocab)
    assert r.target == 0
    assert (r.bilingual_avg, r.monolingual_avg) == (5.0, 1.0)
    assert [(p.context, p.value) for p in r.pairs] == [(1, 5.0), (2, 1.0)]
    with pytest.raises(KeyError):
        pair_analysis(m, lang, "nope", vocab)
    with pytest.raises(KeyError):
        pair_analysis(m, lang, 7)
    with pytest.raises(ValueError):
        pair_analysis(m, WordLanguages((Hi,), 0))
    text = format_pair_report(r, vocab.words, whole=pair_analysis(m, lang))
    assert "target word = a" in text
    assert "a b" in text and "vocabulary-wide average" in text


def test_permutation_invariance(rng):
    n = 15
    dense = np.where(rng.random((n, n)) < 0.3, rng.random((n, n)) * 5, 0.0)
    tags = tuple([Hi, En, Tag.Univ][k] for k in rng.integers(0, 3, size=n))
    base = pair_analysis(PpmiMatrix(sp.csr_matrix(dense)), WordLanguages(tags, 0))
    perm = rng.permutation(n)
    moved = pair_analysis(
        PpmiMatrix(sp.csr_matrix(dense[np.ix_(perm, perm)])),
        WordLanguages(tuple(tags[k] for k in perm), 0),
    )
    assert moved.bilingual_avg == pytest.approx(base.bilingual_avg, abs=1e-12)
    assert moved.monolingual_avg == pytest.approx(base.monolingual_avg, abs=1e-12)
    # excluded pairs never move either average
    bumped = dense.copy()
    univ = [k for k, t in enumerate(tags) if t is Tag.Univ]
    bumped[univ, :] *= 1000
    again = pair_analysis(PpmiMatrix(sp.csr_matrix(bumped)), WordLanguages(tags, 0))
    assert again.bilingual_avg == base.bilingual_avg
    assert again.monolingual_avg == base.monolingual_avg
