"""Positive pointwise mutual information from co-occurrence counts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .cooccurrence import SparseCooccurrence, canonical_csr, read_triples, write_triples


@dataclass(frozen=True, eq=False)
class PpmiMatrix:
    """Sparse PPMI values in bits; absent entries are zero."""

    matrix: sp.csr_matrix
    window: int = 0
    source_total: int = 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def to_dict(self) -> dict[tuple[int, int], float]:
        coo = self.matrix.tocoo()
        return {(int(i), int(j)): float(v) for i, j, v in zip(coo.row, coo.col, coo.data)}

    def save(self, path) -> None:
        write_triples(path, self.matrix, self.window, self.source_total, fmt=repr)

    @classmethod
    def load(cls, path) -> "PpmiMatrix":
        _, window, total, matrix = read_triples(path, dtype=np.float64)
        return cls(matrix, window, int(total))


class Marginals:
    """Row/column sums of a count matrix, computed once."""

    def __init__(self, counts: SparseCooccurrence):
        self.counts = counts
        self.total = float(counts.total)
        if self.total <= 0:
            raise ValueError("co-occurrence matrix has no counts")
        self.rows = counts.row_sums()
        self.cols = counts.col_sums()

    def estimates(self, i: int, j: int) -> tuple[float, float, float]:
        f_ij = float(self.counts.matrix[i, j])
        return f_ij / self.total, self.rows[i] / self.total, self.cols[j] / self.total


def mle_estimates(counts: SparseCooccurrence, i: int, j: int) -> tuple[float, float, float]:
    """Maximum-likelihood ``(p(w_i, c_j), p(w_i), p(c_j))`` from raw counts."""
    return Marginals(counts).estimates(i, j)


def compute_ppmi(counts: SparseCooccurrence) -> PpmiMatrix:
    """PPMI(i, j) = max(log2(p_ij / (p_i p_j)), 0) over stored entries.

    Non-positive results are dropped from the sparse structure.
    """
    m = counts.matrix.tocoo()
    total = float(m.data.sum()) if m.nnz else 0.0
    if total <= 0:
        raise ValueError("cannot compute PPMI of an all-zero count matrix")
    rows = counts.row_sums()
    cols = counts.col_sums()
    denom = rows[m.row] * cols[m.col]
    ok = denom > 0
    # p_ij / (p_i p_j) == f_ij * total / (row_i * col_j)
    ratio = m.data[ok].astype(np.float64) * total / denom[ok]
    pmi = np.log2(ratio)
    keep = pmi > 0
    r, c = m.row[ok][keep], m.col[ok][keep]
    matrix = canonical_csr(r, c, pmi[keep], counts.shape[0], np.float64)
    return PpmiMatrix(matrix, counts.window, counts.total)


def ppmi_lookup(ppmi: PpmiMatrix, w: int, c: int) -> float:
    n_rows, n_cols = ppmi.shape
    if not (0 <= w < n_rows and 0 <= c < n_cols):
        raise IndexError(f"ids ({w}, {c}) out of range for shape {ppmi.shape}")
    return float(ppmi.matrix[w, c])
