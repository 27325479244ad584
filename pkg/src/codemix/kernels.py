"""Hot inner loops: windowed pair counting and per-sample SGD epochs.

Every kernel exists twice, a numba ``@njit`` version and a plain numpy
version with the same signature.  The public dispatchers pick one through
:func:`codemix._accel.resolve_backend`.
"""

import numpy as np

from ._accel import njit, resolve_backend


# ---------------------------------------------------------------- counting


@njit
def _count_pairs_nb(ids, offsets, window):
    n_utt = offsets.shape[0] - 1
    n_pairs = 0
    for u in range(n_utt):
        lo = offsets[u]
        hi = offsets[u + 1]
        for t in range(lo, hi):
            if ids[t] < 0:
                continue
            stop = min(hi, t + window + 1)
            for s in range(t + 1, stop):
                if ids[s] >= 0:
                    n_pairs += 2
    rows = np.empty(n_pairs, dtype=np.int64)
    cols = np.empty(n_pairs, dtype=np.int64)
    k = 0
    for u in range(n_utt):
        lo = offsets[u]
        hi = offsets[u + 1]
        for t in range(lo, hi):
            a = ids[t]
            if a < 0:
                continue
            stop = min(hi, t + window + 1)
            for s in range(t + 1, stop):
                c = ids[s]
                if c >= 0:
                    rows[k] = a
                    cols[k] = c
                    rows[k + 1] = c
                    cols[k + 1] = a
                    k += 2
    return rows, cols


def _count_pairs_np(ids, offsets, window):
    n = ids.shape[0]
    utt_of = np.repeat(np.arange(offsets.shape[0] - 1), np.diff(offsets))
    rows = []
    cols = []
    for k in range(1, window + 1):
        if k >= n:
            break
        a = ids[:-k]
        c = ids[k:]
        ok = (utt_of[:-k] == utt_of[k:]) & (a >= 0) & (c >= 0)
        a = a[ok]
        c = c[ok]
        rows.append(np.stack([a, c], axis=1).ravel())
        cols.append(np.stack([c, a], axis=1).ravel())
    if not rows:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    return (
        np.concatenate(rows).astype(np.int64, copy=False),
        np.concatenate(cols).astype(np.int64, copy=False),
    )


def count_pairs(ids, offsets, window, backend=None):
    """Emit (target, context) id pairs for every in-vocabulary position pair.

    ``ids`` is the flattened corpus with -1 marking out-of-vocabulary tokens;
    ``offsets`` delimits utterances.  Both directions of each pair are
    emitted, so the pair multiset is symmetric.
    """
    ids = np.ascontiguousarray(ids, dtype=np.int64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    if resolve_backend(backend) == "numba":
        return _count_pairs_nb(ids, offsets, int(window))
    return _count_pairs_np(ids, offsets, int(window))


# ------------------------------------------------------------------- SGD


@njit
def _softmax_epoch_nb(W, b, table, ids, labels, order, lr, lam, class_w):
    n_cls, n_feat = W.shape
    span = ids.shape[1]
    dim = table.shape[1]
    x = np.empty(n_feat)
    scores = np.empty(n_cls)
    for s in order:
        for k in range(span):
            row = ids[s, k]
            for f in range(dim):
                x[k * dim + f] = table[row, f]
        for c in range(n_cls):
            acc = b[c]
            for f in range(n_feat):
                acc += W[c, f] * x[f]
            scores[c] = acc
        top = scores.max()
        z = 0.0
        for c in range(n_cls):
            scores[c] = np.exp(scores[c] - top)
            z += scores[c]
        y = labels[s]
        cw = class_w[y]
        shrink = 1.0 - lr * lam
        for c in range(n_cls):
            g = scores[c] / z
            if c == y:
                g -= 1.0
            g *= cw
            for f in range(n_feat):
                W[c, f] = W[c, f] * shrink - lr * g * x[f]
            b[c] -= lr * g


def _softmax_epoch_np(W, b, table, ids, labels, order, lr, lam, class_w):
    shrink = 1.0 - lr * lam
    for s in order:
        x = table[ids[s]].ravel()
        scores = b + W @ x
        p = np.exp(scores - scores.max())
        p /= p.sum()
        p[labels[s]] -= 1.0
        g = class_w[labels[s]] * p
        W *= shrink
        W -= lr * np.outer(g, x)
        b -= lr * g


@njit
def _hinge_epoch_nb(W, b, table, ids, labels, order, lr, lam, class_w):
    n_cls, n_feat = W.shape
    span = ids.shape[1]
    dim = table.shape[1]
    x = np.empty(n_feat)
    scores = np.empty(n_cls)
    for s in order:
        for k in range(span):
            row = ids[s, k]
            for f in range(dim):
                x[k * dim + f] = table[row, f]
        for c in range(n_cls):
            acc = b[c]
            for f in range(n_feat):
                acc += W[c, f] * x[f]
            scores[c] = acc
        y = labels[s]
        cw = class_w[y]
        shrink = 1.0 - lr * lam
        for c in range(n_cls):
            sign = 1.0 if c == y else -1.0
            if sign * scores[c] < 1.0:
                g = -sign * cw
                for f in range(n_feat):
                    W[c, f] = W[c, f] * shrink - lr * g * x[f]
                b[c] -= lr * g
            else:
                for f in range(n_feat):
                    W[c, f] = W[c, f] * shrink


def _hinge_epoch_np(W, b, table, ids, labels, order, lr, lam, class_w):
    n_cls = W.shape[0]
    signs = np.full(n_cls, -1.0)
    shrink = 1.0 - lr * lam
    for s in order:
        x = table[ids[s]].ravel()
        scores = b + W @ x
        y = labels[s]
        signs[:] = -1.0
        signs[y] = 1.0
        g = np.where(signs * scores < 1.0, -signs * class_w[y], 0.0)
        W *= shrink
        W -= lr * np.outer(g, x)
        b -= lr * g


_EPOCH_KERNELS = {
    ("softmax", "numba"): _softmax_epoch_nb,
    ("softmax", "numpy"): _softmax_epoch_np,
    ("svm", "numba"): _hinge_epoch_nb,
    ("svm", "numpy"): _hinge_epoch_np,
}


def sgd_epoch(kind, W, b, table, ids, labels, order, lr, lam, class_w, backend=None):
    """Run one in-place SGD pass over ``order``.

    Sample ``s`` has feature vector ``table[ids[s]].ravel()``: the rows of
    ``table`` named by its window ids, concatenated.  Each step applies the
    per-sample loss gradient plus ``lam * W`` (bias is not regularized).
    """
    fn = _EPOCH_KERNELS[kind, resolve_backend(backend)]
    fn(
        W,
        b,
        np.ascontiguousarray(table, dtype=np.float64),
        np.ascontiguousarray(ids, dtype=np.int64),
        np.ascontiguousarray(labels, dtype=np.int64),
        np.ascontiguousarray(order, dtype=np.int64),
        float(lr),
        float(lam),
        np.ascontiguousarray(class_w, dtype=np.float64),
    )
