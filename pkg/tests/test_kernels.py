import os
import subprocess
import sys

import numpy as np
import pytest

from codemix import _accel
from codemix.kernels import count_pairs, sgd_epoch


def test_resolve_backend():
    assert _accel.resolve_backend("numpy") == "numpy"
    assert _accel.resolve_backend(None) in _accel.BACKENDS
    with pytest.raises(ValueError):
        _accel.resolve_backend("cuda")


def test_env_flag_disables_numba(monkeypatch):
    monkeypatch.setattr(_accel, "USE_NUMBA", False)
    assert _accel.resolve_backend(None) == "numpy"


def test_count_pairs_respects_offsets():
    ids = np.array([0, 1, 2, 3], dtype=np.int64)
    offsets = np.array([0, 2, 4], dtype=np.int64)
    for backend in _accel.BACKENDS:
        rows, cols = count_pairs(ids, offsets, 5, backend=backend)
        assert sorted(zip(rows.tolist(), cols.tolist())) == [(0, 1), (1, 0), (2, 3), (3, 2)]


def test_count_pairs_empty():
    ids = np.empty(0, dtype=np.int64)
    offsets = np.zeros(1, dtype=np.int64)
    for backend in _accel.BACKENDS:
        rows, cols = count_pairs(ids, offsets, 2, backend=backend)
        assert rows.size == 0 and cols.size == 0


@pytest.mark.parametrize("kind", ["softmax", "svm"])
def test_sgd_epoch_backends_agree(kind):
    rng = np.random.default_rng(5)
    table = np.vstack([rng.standard_normal((30, 6)), np.zeros((1, 6))])
    ids = rng.integers(0, 31, size=(200, 3))
    labels = rng.integers(0, 7, size=200)
    order = rng.permutation(200)
    cw = rng.random(7) + 0.5
    out = {}
    for backend in _accel.BACKENDS:
        W = np.zeros((7, 18))
        b = np.zeros(7)
        sgd_epoch(kind, W, b, table, ids, labels, order, 0.05, 1e-3, cw, backend=backend)
        out[backend] = (W, b)
    assert np.allclose(out["numba"][0], out["numpy"][0], rtol=0, atol=1e-12)
    assert np.allclose(out["numba"][1], out["numpy"][1], rtol=0, atol=1e-12)


def test_unknown_kind():
    with pytest.raises(KeyError):
        sgd_epoch("tree", np.zeros((7, 1)), np.zeros(7), np.zeros((2, 1)), np.zeros((1, 1), dtype=np.int64),
                  np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64), 0.1, 0.0, np.ones(7), backend="numpy")


def test_env_flag_in_fresh_process():
    env = dict(os.environ, CODEMIX_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from codemix._accel import resolve_backend; print(resolve_backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "numpy"
