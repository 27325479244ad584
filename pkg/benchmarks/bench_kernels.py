"""Time the numba and numpy backends of the hot kernels.

    python3 benchmarks/bench_kernels.py [--utterances N] [--repeat R]

Counting runs on a synthetic corpus; SGD runs one softmax and one hinge
epoch over its window features.  Each timing is the best of ``--repeat``
runs after one untimed warm-up call (which also triggers JIT compilation).
"""

import argparse
import time

import numpy as np

from codemix.classifier import corpus_windows
from codemix.cooccurrence import build_vocabulary, flatten_ids
from codemix.corpus import TAG_INDEX
from codemix.kernels import count_pairs, sgd_epoch
from codemix.svd import EmbeddingMatrix
from codemix.synth import SynthSpec, generate_synthetic


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--utterances", type=int, default=20000)
    ap.add_argument("--window", type=int, default=2)
    ap.add_argument("--dim", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    corpus = generate_synthetic(SynthSpec(hi_vocab=2000, en_vocab=2000, utterances=args.utterances))
    vocab = build_vocabulary(corpus)
    ids, offsets = flatten_ids(corpus, vocab)
    rng = np.random.default_rng(0)
    emb = EmbeddingMatrix(vocab.words, rng.standard_normal((len(vocab), args.dim)))
    win, labels = corpus_windows(corpus, emb, 1)
    table = emb.padded()
    order = rng.permutation(win.shape[0])
    cw = np.ones(len(TAG_INDEX))
    print(f"{len(corpus)} utterances, {ids.shape[0]} tokens, |V| = {len(vocab)}, d = {args.dim}")

    def counting(backend):
        return lambda: count_pairs(ids, offsets, args.window, backend=backend)

    def epoch(kind, backend):
        def run():
            W = np.zeros((len(TAG_INDEX), win.shape[1] * args.dim))
            b = np.zeros(len(TAG_INDEX))
            sgd_epoch(kind, W, b, table, win, labels, order, 0.1, 1e-4, cw, backend=backend)
        return run

    jobs = [
        ("count_pairs", counting),
        ("sgd softmax", lambda be: epoch("softmax", be)),
        ("sgd hinge", lambda be: epoch("svm", be)),
    ]
    print(f"{'kernel':<14}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, make in jobs:
        t_nb = best_of(make("numba"), args.repeat)
        t_np = best_of(make("numpy"), args.repeat)
        print(f"{name:<14}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
