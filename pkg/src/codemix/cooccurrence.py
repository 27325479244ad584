"""Vocabulary construction and sparse windowed co-occurrence counts."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .kernels import count_pairs

DEFAULT_WINDOW = 2


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    freq: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        object.__setattr__(self, "freq", tuple(int(f) for f in self.freq))
        if len(self.words) != len(self.freq):
            raise ValueError("words and freq must have equal length")
        index = {w: i for i, w in enumerate(self.words)}
        if len(index) != len(self.words):
            raise ValueError("vocabulary words must be unique")
        if any(f < 1 for f in self.freq):
            raise ValueError("every vocabulary word needs frequency >= 1")
        object.__setattr__(self, "_index", index)

    @property
    def index(self) -> dict[str, int]:
        return self._index

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self._index

    def get(self, word: str, default: int = -1) -> int:
        return self._index.get(word, default)

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        """Token ids, -1 for out-of-vocabulary tokens."""
        get = self._index.get
        return np.fromiter((get(t, -1) for t in tokens), dtype=np.int64, count=len(tokens))

    def save(self, path) -> None:
        lines = [f"{w}\t{f}" for w, f in zip(self.words, self.freq)]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        words, freq = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected word<TAB>freq")
                words.append(parts[0])
                freq.append(int(parts[1]))
        return cls(tuple(words), tuple(freq))


def build_vocabulary(corpus: Iterable, min_count: int = 1) -> Vocabulary:
    """Collect tokens seen at least ``min_count`` times.

    Words are ordered by descending frequency, ties broken lexicographically.
    ``corpus`` may be a TaggedCorpus or any iterable of token sequences.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    counts: Counter = Counter()
    n = 0
    for utt in corpus:
        tokens = getattr(utt, "tokens", utt)
        counts.update(tokens)
        n += 1
    if n == 0 or not counts:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    kept = sorted(((w, c) for w, c in counts.items() if c >= min_count), key=lambda wc: (-wc[1], wc[0]))
    return Vocabulary(tuple(w for w, _ in kept), tuple(c for _, c in kept))


@dataclass(frozen=True, eq=False)
class SparseCooccurrence:
    """Word-context counts ``f_ij`` as a canonical CSR int64 matrix."""

    matrix: sp.csr_matrix
    window: int

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def total(self) -> int:
        return int(self.matrix.data.sum())

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def __getitem__(self, ij) -> int:
        i, j = ij
        return int(self.matrix[i, j])

    def to_dict(self) -> dict[tuple[int, int], int]:
        coo = self.matrix.tocoo()
        return {(int(i), int(j)): int(v) for i, j, v in zip(coo.row, coo.col, coo.data)}

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1), dtype=np.float64).ravel()

    def col_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=0), dtype=np.float64).ravel()

    def save(self, path) -> None:
        write_triples(path, self.matrix, self.window, self.total, fmt=str)

    @classmethod
    def load(cls, path) -> "SparseCooccurrence":
        n, window, total, matrix = read_triples(path, dtype=np.int64)
        counts = cls(matrix, window)
        if counts.total != total:
            raise ValueError(f"{path}: header total {total} != stored sum {counts.total}")
        return counts


def canonical_csr(rows, cols, data, n: int, dtype) -> sp.csr_matrix:
    m = sp.coo_matrix((data, (rows, cols)), shape=(n, n), dtype=dtype).tocsr()
    m.sum_duplicates()
    m.eliminate_zeros()
    m.sort_indices()
    return m


def flatten_ids(corpus: Iterable, vocab: Vocabulary) -> tuple[np.ndarray, np.ndarray]:
    seqs = [vocab.encode(getattr(u, "tokens", u)) for u in corpus]
    lengths = np.fromiter((len(s) for s in seqs), dtype=np.int64, count=len(seqs))
    offsets = np.zeros(len(seqs) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    ids = np.concatenate(seqs) if seqs else np.empty(0, dtype=np.int64)
    return ids, offsets


def count_cooccurrences(
    corpus: Iterable, vocab: Vocabulary, window: int = DEFAULT_WINDOW, backend=None
) -> SparseCooccurrence:
    """Count symmetric windowed co-occurrences within utterances.

    Out-of-vocabulary tokens keep their positions but contribute no counts.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    ids, offsets = flatten_ids(corpus, vocab)
    rows, cols = count_pairs(ids, offsets, window, backend=backend)
    data = np.ones(rows.shape[0], dtype=np.int64)
    return SparseCooccurrence(canonical_csr(rows, cols, data, len(vocab), np.int64), int(window))


def merge_counts(parts: Sequence[SparseCooccurrence]) -> SparseCooccurrence:
    """Sum partial count matrices (e.g. from utterance shards)."""
    if not parts:
        raise ValueError("nothing to merge")
    window = parts[0].window
    if any(p.window != window or p.shape != parts[0].shape for p in parts):
        raise ValueError("partial counts disagree on window or shape")
    total = parts[0].matrix.copy()
    for p in parts[1:]:
        total = total + p.matrix
    total.sort_indices()
    return SparseCooccurrence(total.tocsr(), window)


def write_triples(path, matrix: sp.csr_matrix, window: int, total, fmt=repr) -> None:
    coo = matrix.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.shape[0]} {window} {total}\n")
        for i, j, v in zip(coo.row[order].tolist(), coo.col[order].tolist(), coo.data[order].tolist()):
            fh.write(f"{i} {j} {fmt(v)}\n")


def read_triples(path, dtype):
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: header must be '|V| window total'")
        n, window = int(header[0]), int(header[1])
        total = int(header[2]) if dtype is np.int64 else float(header[2])
        rows, cols, vals = [], [], []
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'i j value'")
            i, j = int(parts[0]), int(parts[1])
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"{path}:{lineno}: index out of range for |V|={n}")
            rows.append(i)
            cols.append(j)
            vals.append(int(parts[2]) if dtype is np.int64 else float(parts[2]))
    m = canonical_csr(
        np.asarray(rows, dtype=np.int64),
        np.asarray(cols, dtype=np.int64),
        np.asarray(vals, dtype=dtype),
        n,
        dtype,
    )
    return n, window, total, m
