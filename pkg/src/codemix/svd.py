"""Randomized truncated SVD and the word embeddings derived from it."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

DEFAULT_DIM = 100
DIM_PRESETS = (100, 300, 500)
DEFAULT_OVERSAMPLE = 10
DEFAULT_POWER_ITERS = 2


@dataclass(frozen=True, eq=False)
class TruncatedSvd:
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def d(self) -> int:
        return self.sigma.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.sigma) @ self.V.T


def _orthonormal_basis(a: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(a, mode="reduced")
    return q


def fix_signs(U: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flip column pairs so each column of U has its largest-magnitude entry positive."""
    if U.shape[1] == 0:
        return U, V
    rows = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[rows, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs, V * signs


def truncated_svd(
    matrix,
    d: int = DEFAULT_DIM,
    seed: int = 0,
    oversample: int = DEFAULT_OVERSAMPLE,
    power_iters: int = DEFAULT_POWER_ITERS,
) -> TruncatedSvd:
    """Rank-``d`` SVD by a seeded Gaussian range finder with power iterations.

    ``matrix`` may be a scipy sparse matrix, a dense array, or anything with a
    ``.matrix`` attribute holding one (e.g. :class:`PpmiMatrix`).
    """
    m = getattr(matrix, "matrix", matrix)
    if sp.issparse(m):
        m = m.tocsr().astype(np.float64)
        empty = m.nnz == 0
    else:
        m = np.asarray(m, dtype=np.float64)
        empty = not np.any(m)
    n_rows, n_cols = m.shape
    k = min(n_rows, n_cols)
    if not 1 <= d <= k:
        raise ValueError(f"rank d={d} out of range [1, {k}] for shape {m.shape}")
    if empty:
        raise ValueError("cannot factorize a matrix with no entries")
    if oversample < 0 or power_iters < 0:
        raise ValueError("oversample and power_iters must be non-negative")

    width = min(d + oversample, k)
    rng = np.random.default_rng(seed)
    omega = rng.standard_normal((n_cols, width))
    y = m @ omega
    for _ in range(power_iters):
        q = _orthonormal_basis(y)
        z = _orthonormal_basis(m.T @ q)
        y = m @ z
    q = _orthonormal_basis(y)
    b = np.asarray((m.T @ q).T)
    u_small, s, vt = np.linalg.svd(b, full_matrices=False)
    U = q @ u_small[:, :d]
    V = vt[:d].T
    U, V = fix_signs(U, V)
    return TruncatedSvd(np.ascontiguousarray(U), s[:d].copy(), np.ascontiguousarray(V))


class Lookup(NamedTuple):
    vector: np.ndarray
    oov: bool


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    words: tuple[str, ...]
    vectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(self.words):
            raise ValueError(
                f"need one row per word: {len(self.words)} words, array {vectors.shape}"
            )
        if not np.all(np.isfinite(vectors)):
            raise ValueError("embeddings must be finite")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.words)})

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word) -> bool:
        return word in self._index

    def index_of(self, word: str) -> int:
        return self._index.get(word, -1)

    def ids(self, tokens: Sequence[str]) -> np.ndarray:
        get = self._index.get
        return np.fromiter((get(t, -1) for t in tokens), dtype=np.int64, count=len(tokens))

    def padded(self) -> np.ndarray:
        """Vectors with a trailing all-zero row used for padding and OOV."""
        return np.vstack([self.vectors, np.zeros((1, self.dim))])

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self.words)} {self.dim}\n")
            for word, row in zip(self.words, self.vectors.tolist()):
                fh.write(word + " " + " ".join(map(repr, row)) + "\n")

    @classmethod
    def load(cls, path) -> "EmbeddingMatrix":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise ValueError(f"{path}: header must be '|V| d'")
            n, dim = int(header[0]), int(header[1])
            words = []
            vectors = np.empty((n, dim))
            for i in range(n):
                parts = fh.readline().rstrip("\n").split(" ")
                if len(parts) != dim + 1:
                    raise ValueError(f"{path}:{i + 2}: expected word and {dim} values")
                words.append(parts[0])
                vectors[i] = [float(v) for v in parts[1:]]
        return cls(tuple(words), vectors)


def extract_embeddings(svd: TruncatedSvd, vocab) -> EmbeddingMatrix:
    """Rows of ``U_d`` scaled by the singular values."""
    words = tuple(getattr(vocab, "words", vocab))
    if svd.U.shape[0] != len(words):
        raise ValueError(f"SVD has {svd.U.shape[0]} rows but vocabulary has {len(words)} words")
    return EmbeddingMatrix(words, svd.U * svd.sigma)


def lookup(embeddings: EmbeddingMatrix, token: str) -> Lookup:
    i = embeddings.index_of(token)
    if i < 0:
        return Lookup(np.zeros(embeddings.dim), True)
    return Lookup(embeddings.vectors[i].copy(), False)

