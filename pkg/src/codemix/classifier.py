"""Token-level language identification with linear models over embedding windows."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import TAG_INDEX, TAGS, Tag, Utterance
from .kernels import sgd_epoch
from .svd import EmbeddingMatrix

logger = logging.getLogger(__name__)

KINDS = ("softmax", "svm")
MODEL_MAGIC = "codemix-classifier"
MODEL_VERSION = 1


@dataclass(frozen=True)
class FeatureConfig:
    context_window: int = 1
    dim: int = 100

    def __post_init__(self):
        if self.context_window < 0:
            raise ValueError("context_window must be >= 0")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def span(self) -> int:
        return 2 * self.context_window + 1

    @property
    def feature_length(self) -> int:
        return self.span * self.dim


@dataclass(frozen=True)
class TrainParams:
    epochs: int = 30
    learning_rate: float = 0.1
    l2: float = 1e-4
    seed: int = 0
    class_weighting: bool = False

    def __post_init__(self):
        if self.epochs <= 0:
            raise ValueError(f"epochs must be positive, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")


@dataclass(frozen=True, eq=False)
class ClassifierModel:
    kind: str
    weights: np.ndarray
    bias: np.ndarray
    config: FeatureConfig
    tags: tuple[Tag, ...] = TAGS
    history: tuple[float, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        n_cls = len(self.tags)
        if self.weights.shape != (n_cls, self.config.feature_length):
            raise ValueError(
                f"weights shape {self.weights.shape} != ({n_cls}, {self.config.feature_length})"
            )
        if self.bias.shape != (n_cls,):
            raise ValueError(f"bias shape {self.bias.shape} != ({n_cls},)")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("model parameters must be finite")

    def scores(self, features: np.ndarray) -> np.ndarray:
        return features @ self.weights.T + self.bias

    def save(self, path) -> None:
        Path(path).write_text(format_model(self), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ClassifierModel":
        return parse_model(Path(path).read_text(encoding="utf-8"))


def format_model(model: ClassifierModel) -> str:
    lines = [
        f"{MODEL_MAGIC} {MODEL_VERSION}",
        f"kind {model.kind}",
        f"dim {model.config.dim}",
        f"window {model.config.context_window}",
        "tags " + " ".join(t.value for t in model.tags),
        "bias " + " ".join(map(repr, model.bias.tolist())),
        f"weights {model.weights.shape[0]} {model.weights.shape[1]}",
    ]
    lines.extend(" ".join(map(repr, row)) for row in model.weights.tolist())
    return "\n".join(lines) + "\n"


def parse_model(text: str) -> ClassifierModel:
    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) != 2 or head[0] != MODEL_MAGIC:
        raise ValueError("not a classifier model file")
    if int(head[1]) != MODEL_VERSION:
        raise ValueError(f"unsupported model version {head[1]}")
    fields = {}
    for line in lines[1:7]:
        key, _, value = line.partition(" ")
        fields[key] = value
    missing = {"kind", "dim", "window", "tags", "bias", "weights"} - fields.keys()
    if missing:
        raise ValueError(f"model file missing fields: {sorted(missing)}")
    tags = tuple(Tag.parse(t) for t in fields["tags"].split())
    n_rows, n_cols = (int(v) for v in fields["weights"].split())
    rows = lines[7 : 7 + n_rows]
    if len(rows) != n_rows:
        raise ValueError(f"expected {n_rows} weight rows, found {len(rows)}")
    weights = np.array([[float(v) for v in row.split()] for row in rows], dtype=np.float64)
    weights = weights.reshape(n_rows, n_cols)
    bias = np.array([float(v) for v in fields["bias"].split()], dtype=np.float64)
    config = FeatureConfig(int(fields["window"]), int(fields["dim"]))
    return ClassifierModel(fields["kind"], weights, bias, config, tags)


def window_ids(tokens: Sequence[str], embeddings: EmbeddingMatrix, context_window: int) -> np.ndarray:
    """Rows into ``embeddings.padded()`` for each token's window.

    Positions outside the utterance and OOV tokens map to the zero row.
    """
    pad = len(embeddings)
    n = len(tokens)
    ids = embeddings.ids(tokens)
    ids[ids < 0] = pad
    padded = np.concatenate([np.full(context_window, pad), ids, np.full(context_window, pad)])
    span = 2 * context_window + 1
    out = np.empty((n, span), dtype=np.int64)
    for k in range(span):
        out[:, k] = padded[k : k + n]
    return out


def featurize(
    utterance: Utterance | Sequence[str],
    position: int,
    embeddings: EmbeddingMatrix,
    config: FeatureConfig,
) -> np.ndarray:
    tokens = getattr(utterance, "tokens", utterance)
    if not 0 <= position < len(tokens):
        raise IndexError(f"position {position} out of range for {len(tokens)} tokens")
    if config.dim != embeddings.dim:
        raise ValueError(f"config dim {config.dim} != embedding dim {embeddings.dim}")
    ids = window_ids(tokens, embeddings, config.context_window)[position]
    return embeddings.padded()[ids].ravel()


def corpus_windows(corpus, embeddings: EmbeddingMatrix, context_window: int):
    """Stacked window ids and gold label indices for every token of ``corpus``."""
    ids = [window_ids(u.tokens, embeddings, context_window) for u in corpus]
    labels = [np.fromiter((TAG_INDEX[t] for t in u.tags), dtype=np.int64) for u in corpus]
    if not ids:
        span = 2 * context_window + 1
        return np.empty((0, span), dtype=np.int64), np.empty(0, dtype=np.int64)
    return np.concatenate(ids), np.concatenate(labels)


def gather_features(table: np.ndarray, ids: np.ndarray) -> np.ndarray:
    return table[ids].reshape(ids.shape[0], -1)


# ------------------------------------------------------------ objectives


def softmax_loss_grad(W, b, X, y, l2=0.0, sample_w=None):
    """Mean weighted cross-entropy plus ``l2/2 * ||W||^2`` and its gradient."""
    n = X.shape[0]
    sw = np.ones(n) if sample_w is None else np.asarray(sample_w, dtype=np.float64)
    scores = X @ W.T + b
    scores -= scores.max(axis=1, keepdims=True)
    logz = np.log(np.exp(scores).sum(axis=1))
    nll = logz - scores[np.arange(n), y]
    loss = float(np.dot(sw, nll) / n + 0.5 * l2 * np.sum(W * W))
    p = np.exp(scores - logz[:, None])
    p[np.arange(n), y] -= 1.0
    p *= sw[:, None] / n
    return loss, p.T @ X + l2 * W, p.sum(axis=0)


def hinge_loss_grad(W, b, X, y, l2=0.0, sample_w=None):
    """One-vs-rest hinge loss summed over classes, averaged over samples."""
    n, n_cls = X.shape[0], W.shape[0]
    sw = np.ones(n) if sample_w is None else np.asarray(sample_w, dtype=np.float64)
    signs = -np.ones((n, n_cls))
    signs[np.arange(n), y] = 1.0
    margins = 1.0 - signs * (X @ W.T + b)
    active = margins > 0
    loss = float(np.dot(sw, np.where(active, margins, 0.0).sum(axis=1)) / n + 0.5 * l2 * np.sum(W * W))
    g = np.where(active, -signs, 0.0) * (sw[:, None] / n)
    return loss, g.T @ X + l2 * W, g.sum(axis=0)


OBJECTIVES = {"softmax": softmax_loss_grad, "svm": hinge_loss_grad}


def objective(kind, W, b, table, ids, labels, l2, sample_w, chunk=8192) -> float:
    """Full training objective, evaluated in chunks to bound memory."""
    n = ids.shape[0]
    fn = OBJECTIVES[kind]
    data = 0.0
    for lo in range(0, n, chunk):
        X = gather_features(table, ids[lo : lo + chunk])
        part, _, _ = fn(W, b, X, labels[lo : lo + chunk], 0.0, sample_w[lo : lo + chunk])
        data += part * X.shape[0]
    return data / n + 0.5 * l2 * float(np.sum(W * W))


def class_weights(labels: np.ndarray, n_cls: int, balanced: bool) -> np.ndarray:
    if not balanced:
        return np.ones(n_cls)
    counts = np.bincount(labels, minlength=n_cls).astype(np.float64)
    present = counts > 0
    w = np.ones(n_cls)
    w[present] = labels.shape[0] / (present.sum() * counts[present])
    return w


def train(
    corpus,
    embeddings: EmbeddingMatrix,
    kind: str = "softmax",
    params: TrainParams | None = None,
    context_window: int = 1,
    backend=None,
) -> ClassifierModel:
    """Fit a 7-class linear model by SGD with a 1/(1+epoch) step decay.

    The shuffle order of each epoch comes from ``params.seed``; the training
    objective after every epoch is kept in ``model.history``.
    """
    params = params or TrainParams()
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    config = FeatureConfig(context_window, embeddings.dim)
    ids, labels = corpus_windows(corpus, embeddings, context_window)
    if ids.shape[0] == 0:
        raise ValueError("cannot train on an empty corpus")
    n_cls = len(TAGS)
    table = embeddings.padded()
    cw = class_weights(labels, n_cls, params.class_weighting)
    sample_w = cw[labels]
    W = np.zeros((n_cls, config.feature_length))
    b = np.zeros(n_cls)
    rng = np.random.default_rng(params.seed)
    history = []
    for epoch in range(params.epochs):
        order = rng.permutation(ids.shape[0])
        lr = params.learning_rate / (1.0 + epoch)
        sgd_epoch(kind, W, b, table, ids, labels, order, lr, params.l2, cw, backend=backend)
        loss = objective(kind, W, b, table, ids, labels, params.l2, sample_w)
        history.append(loss)
        logger.info("epoch %d/%d lr=%.4g loss=%.6f", epoch + 1, params.epochs, lr, loss)
    return ClassifierModel(kind, W, b, config, TAGS, tuple(history))


def predict_indices(model: ClassifierModel, tokens: Sequence[str], embeddings: EmbeddingMatrix) -> np.ndarray:
    if model.config.dim != embeddings.dim:
        raise ValueError(f"model expects dim {model.config.dim}, embeddings have {embeddings.dim}")
    if len(tokens) == 0:
        return np.empty(0, dtype=np.int64)
    ids = window_ids(tokens, embeddings, model.config.context_window)
    X = gather_features(embeddings.padded(), ids)
    # np.argmax returns the first maximum: ties go to the lowest class index
    return np.argmax(model.scores(X), axis=1)


def predict(model: ClassifierModel, tokens, embeddings: EmbeddingMatrix) -> list[Tag]:
    tokens = getattr(tokens, "tokens", tokens)
    return [model.tags[i] for i in predict_indices(model, tokens, embeddings)]


def predict_corpus(model: ClassifierModel, corpus, embeddings: EmbeddingMatrix) -> list[list[Tag]]:
    if model.config.dim != embeddings.dim:
        raise ValueError(f"model expects dim {model.config.dim}, embeddings have {embeddings.dim}")
    table = embeddings.padded()
    out = []
    for utt in corpus:
        ids = window_ids(utt.tokens, embeddings, model.config.context_window)
        idx = np.argmax(model.scores(gather_features(table, ids)), axis=1)
        out.append([model.tags[i] for i in idx])
    return out
