"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line; the lines are printed in the
pytest terminal summary (see conftest.py) and when this file is run as a
script.
"""

import json
import resource
import sys
import time

import numpy as np
import pytest
import scipy.sparse as sp

from codemix.analysis import assign_word_language, pair_analysis
from codemix.classifier import hinge_loss_grad, softmax_loss_grad
from codemix.cooccurrence import build_vocabulary, count_cooccurrences
from codemix.corpus import TAGS, Tag, Utterance, save_corpus
from codemix.metrics import cmi, cmi_from_counts, corpus_cmi, evaluate
from codemix.pipeline import ARTIFACTS, PipelineConfig, run_pipeline
from codemix.ppmi import compute_ppmi
from codemix.svd import extract_embeddings, truncated_svd
from codemix.synth import SynthSpec, generate_synthetic
from conftest import random_corpus
from oracles import brute_ppmi, central_difference, enumerate_pairs, jacobi_svd

RESULTS = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _oracle_corpora(n=60, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        vocab_size = int(rng.integers(2, 31))
        out.append((random_corpus(rng, max_tokens=200, vocab_size=vocab_size), 1 + k % 3))
    return out


def test_criterion_01_ppmi_oracle():
    start = time.perf_counter()
    worst = 0.0
    corpora = _oracle_corpora()
    for corpus, window in corpora:
        vocab = build_vocabulary(corpus)
        assert corpus.n_tokens <= 200 and len(vocab) <= 30
        got = compute_ppmi(count_cooccurrences(corpus, vocab, window)).matrix.toarray()
        ref = np.zeros_like(got)
        for (i, j), v in brute_ppmi(enumerate_pairs(corpus.token_lists(), window, vocab.index)).items():
            ref[i, j] = v
        worst = max(worst, float(np.max(np.abs(got - ref), initial=0.0)))
    elapsed = time.perf_counter() - start
    record(1, worst <= 1e-9 and elapsed < 10.0,
           f"{len(corpora)} corpora, max |PPMI - oracle| = {worst:.2e} (<= 1e-9), {elapsed:.2f}s (< 10s)")


def test_criterion_02_cooccurrence_oracle():
    mismatches = asym = 0
    corpora = _oracle_corpora()
    for corpus, window in corpora:
        vocab = build_vocabulary(corpus)
        counts = count_cooccurrences(corpus, vocab, window)
        mismatches += counts.to_dict() != enumerate_pairs(corpus.token_lists(), window, vocab.index)
        asym += (counts.matrix != counts.matrix.T).nnz
    record(2, mismatches == 0 and asym == 0,
           f"{len(corpora)} corpora, {mismatches} mismatches vs pair enumerator, {asym} asymmetric entries")


def test_criterion_03_svd_oracle():
    # The criterion does not fix the power-iteration count; 16 passes brings
    # the randomized range finder to oracle accuracy on these small spectra.
    rng = np.random.default_rng(77)
    start = time.perf_counter()
    worst_sv = worst_orth = 0.0
    monotone = True
    for k in range(20):
        m = sp.random(50, 50, density=0.1, format="csr", random_state=rng, data_rvs=rng.random)
        dense = m.toarray()
        ref = jacobi_svd(dense)[1]
        s = truncated_svd(m, 10, seed=k, power_iters=16)
        worst_sv = max(worst_sv, float(np.max(np.abs(s.sigma - ref[:10]) / ref[:10])))
        eye = np.eye(10)
        worst_orth = max(worst_orth, float(np.max(np.abs(s.U.T @ s.U - eye))),
                         float(np.max(np.abs(s.V.T @ s.V - eye))))
        errs = [np.linalg.norm(dense - truncated_svd(m, d, seed=k, power_iters=16).reconstruct(), 2)
                for d in (2, 5, 10, 20)]
        monotone &= all(b <= a + 1e-9 for a, b in zip(errs, errs[1:]))
    elapsed = time.perf_counter() - start
    record(3, worst_sv <= 1e-6 and worst_orth <= 1e-6 and monotone and elapsed < 30.0,
           f"20 matrices, max rel sigma err {worst_sv:.1e}, orthonormality {worst_orth:.1e}, "
           f"monotone reconstruction {monotone}, {elapsed:.2f}s (< 30s)")


def test_criterion_04_gram_identity():
    rng = np.random.default_rng(4)
    worst = 0.0
    # a PPMI matrix from a toy corpus, factorized at its numerical rank
    corpus = random_corpus(rng, max_tokens=150, vocab_size=12)
    vocab = build_vocabulary(corpus)
    ppmi = compute_ppmi(count_cooccurrences(corpus, vocab, 2))
    m = ppmi.matrix.toarray()
    sv = jacobi_svd(m)[1]
    r = int(np.sum(sv > 1e-10 * sv[0]))
    e = extract_embeddings(truncated_svd(ppmi, r, power_iters=8), vocab).vectors
    worst = max(worst, float(np.max(np.abs(e @ e.T - m @ m.T))))
    # and a non-negative matrix built with rank exactly 3
    low = rng.random((20, 3)) @ rng.random((3, 20))
    e = extract_embeddings(truncated_svd(sp.csr_matrix(low), 3), [str(k) for k in range(20)]).vectors
    worst = max(worst, float(np.max(np.abs(e @ e.T - low @ low.T))))
    record(4, worst <= 1e-6, f"toy PPMI (rank {r}) and rank-3 matrix, max |EE^T - MM^T| = {worst:.1e} (<= 1e-6)")


def test_criterion_05_gradients():
    rng = np.random.default_rng(5)
    worst = 0.0
    for fn in (softmax_loss_grad, hinge_loss_grad):
        for _ in range(5):
            W = rng.standard_normal((7, 20)) * 0.5
            b = rng.standard_normal(7) * 0.5
            X = rng.standard_normal((16, 20))
            y = rng.integers(0, 7, size=16)
            _, gW, gb = fn(W, b, X, y, 1e-3)
            nW = central_difference(lambda w: fn(w, b, X, y, 1e-3)[0], W.copy(), step=1e-5)
            nb = central_difference(lambda v: fn(W, v, X, y, 1e-3)[0], b.copy(), step=1e-5)
            for a, n in ((gW, nW), (gb, nb)):
                worst = max(worst, float(np.linalg.norm(a - n) / max(np.linalg.norm(a), np.linalg.norm(n))))
    record(5, worst <= 1e-5, f"softmax and hinge, 20 features x 7 classes, max rel err {worst:.1e} (<= 1e-5)")


def test_criterion_06_cmi():
    mono = corpus_cmi([Utterance(tuple("abcdefghi"), (Tag.En,) * 9)]).corpus.value
    balanced = cmi([Tag.Hi, Tag.En] * 5).value
    table = cmi_from_counts(20663, 49467, 11719 + 3762 + 132 + 2756 + 3331).value
    rng = np.random.default_rng(6)
    symmetric = all(
        cmi_from_counts(h, e, o).value == cmi_from_counts(e, h, o).value
        for h, e, o in rng.integers(0, 10_000, size=(100, 3)).tolist()
    )
    ok = mono == 0.0 and balanced == 0.5 and abs(table - 0.4613) <= 1e-4 and symmetric
    record(6, ok, f"monolingual {mono}, balanced {balanced}, train table {table:.6f} (0.4613 +- 1e-4), "
                  f"swap symmetry on 100 triples {symmetric}")


def test_criterion_07_metrics():
    report = evaluate([[Tag.En, Tag.En, Tag.Hi, Tag.Hi]], [[Tag.En, Tag.Hi, Tag.Hi, Tag.Hi]])
    err = abs(report.weighted[2] - 11 / 15)
    rng = np.random.default_rng(7)
    rows_ok = True
    for _ in range(50):
        gold = [[TAGS[i] for i in rng.integers(0, 7, size=int(rng.integers(1, 20)))] for _ in range(4)]
        pred = [[TAGS[i] for i in rng.integers(0, 7, size=len(g))] for g in gold]
        r = evaluate(gold, pred)
        rows_ok &= bool(np.array_equal(r.confusion.sum(axis=1), [r.per_class[t].support for t in TAGS]))
    record(7, err <= 1e-12 and rows_ok,
           f"hand example weighted F1 {report.weighted[2]:.12f} (err {err:.1e}), confusion rows = supports {rows_ok}")


def test_criterion_08_bilingual_hypothesis():
    wins = []
    for seed in range(10):
        corpus = generate_synthetic(SynthSpec(bias=4.0, utterances=2000, seed=seed))
        vocab = build_vocabulary(corpus)
        report = pair_analysis(compute_ppmi(count_cooccurrences(corpus, vocab, 2)),
                               assign_word_language(corpus, vocab))
        wins.append((report.bilingual_avg or 0.0) > (report.monolingual_avg or float("inf")))
    record(8, all(wins), f"bilingual_avg > monolingual_avg in {sum(wins)}/10 seeds at bias 4")


def test_criterion_09_end_to_end(tmp_path):
    corpus_path = tmp_path / "synthetic.tsv"
    save_corpus(generate_synthetic(SynthSpec(utterances=2000, seed=0)), corpus_path)
    config = dict(corpus=str(corpus_path), split_ratio="10:1", window=2, dim=50,
                  classifier="softmax", epochs=30)
    start = time.perf_counter()
    run_pipeline(PipelineConfig(out_dir=str(tmp_path / "a"), **config))
    elapsed = time.perf_counter() - start
    run_pipeline(PipelineConfig(out_dir=str(tmp_path / "b"), **config))
    names = [n for files in ARTIFACTS.values() for n in files.values()] + ["manifest.json"]
    identical = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes() for n in names)
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    acc, wf1 = report["accuracy"], report["weighted"]["f1"]
    ok = acc >= 0.95 and wf1 >= 0.95 and elapsed < 120.0 and identical
    record(9, ok, f"held-out accuracy {acc:.4f}, weighted F1 {wf1:.4f} (>= 0.95), "
                  f"pipeline {elapsed:.1f}s (< 120s), rerun byte-identical {identical}")


@pytest.mark.slow
def test_criterion_10_capacity():
    start = time.perf_counter()
    corpus = generate_synthetic(SynthSpec(hi_vocab=7600, en_vocab=7600, utterances=40_000, seed=0))
    vocab = build_vocabulary(corpus)
    ppmi = compute_ppmi(count_cooccurrences(corpus, vocab, 2))
    emb = extract_embeddings(truncated_svd(ppmi, 100, seed=42), vocab)
    elapsed = time.perf_counter() - start
    peak_mb = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024
    if sys.platform == "darwin":
        peak_mb /= 1024
    ok = len(vocab) >= 15_000 and emb.vectors.shape == (len(vocab), 100) and peak_mb < 8192
    record(10, ok, f"|V| = {len(vocab)}, d = 100, PPMI nnz {ppmi.nnz}, peak RSS {peak_mb:.0f} MB (< 8192), "
                   f"{elapsed:.1f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
