"""End-to-end run: split, count, PPMI, SVD, train, evaluate.

Every stage reads its inputs from and writes its outputs to ``out_dir``, so
any stage can be re-run on its own from the CLI with the same files.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from . import classifier as clf
from .cooccurrence import SparseCooccurrence, Vocabulary, build_vocabulary, count_cooccurrences
from .corpus import TaggedCorpus, Utterance, load_corpus, parse_ratio, save_corpus, split_corpus
from .metrics import evaluate
from .ppmi import PpmiMatrix, compute_ppmi
from .svd import EmbeddingMatrix, extract_embeddings, truncated_svd

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
STAGES = ("split", "cooccur", "ppmi", "svd", "train", "eval")

ARTIFACTS = {
    "split": {"train": "train.tsv", "test": "test.tsv"},
    "cooccur": {"vocab": "vocab.tsv", "counts": "counts.txt"},
    "ppmi": {"ppmi": "ppmi.txt"},
    "svd": {"embeddings": "embeddings.txt"},
    "train": {"model": "model.txt"},
    "eval": {"predictions": "predictions.tsv", "report": "report.json", "table": "report.txt"},
}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")


@dataclass(frozen=True)
class PipelineConfig:
    corpus: str
    out_dir: str
    split_ratio: str = "10:1"
    split_seed: int = 0
    window: int = 2
    min_count: int = 1
    lowercase: bool = False
    dim: int = 100
    svd_seed: int = 42
    oversample: int = 10
    power_iters: int = 2
    classifier: str = "softmax"
    context_window: int = 1
    epochs: int = 30
    learning_rate: float = 0.1
    l2: float = 1e-4
    train_seed: int = 42
    class_weighting: bool = False

    def __post_init__(self):
        parse_ratio(self.split_ratio)
        checks = [
            (self.window >= 1, "window must be >= 1"),
            (self.min_count >= 1, "min_count must be >= 1"),
            (self.dim >= 1, "dim must be >= 1"),
            (self.oversample >= 0, "oversample must be >= 0"),
            (self.power_iters >= 0, "power_iters must be >= 0"),
            (self.classifier in clf.KINDS, f"classifier must be one of {clf.KINDS}"),
            (self.context_window >= 0, "context_window must be >= 0"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (self.learning_rate > 0, "learning_rate must be positive"),
            (self.l2 >= 0, "l2 must be non-negative"),
        ]
        for ok, message in checks:
            if not ok:
                raise ValueError(message)

    @classmethod
    def from_dict(cls, data: dict, base: Path | None = None) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        if base is not None:
            for key in ("corpus", "out_dir"):
                if key in data and not Path(data[key]).is_absolute():
                    data[key] = str(base / data[key])
        return cls(**data)

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")), base=path.parent)

    def to_dict(self) -> dict:
        return asdict(self)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @property
    def train_params(self) -> clf.TrainParams:
        return clf.TrainParams(
            epochs=self.epochs,
            learning_rate=self.learning_rate,
            l2=self.l2,
            seed=self.train_seed,
            class_weighting=self.class_weighting,
        )


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def fold_case(corpus: TaggedCorpus) -> TaggedCorpus:
    return TaggedCorpus.from_utterances(
        Utterance(tuple(t.lower() for t in u.tokens), u.tags, u.id) for u in corpus
    )


# ---------------------------------------------------------------- stages
# Each stage takes explicit paths so the CLI can call it directly.


def stage_split(corpus_path, train_path, test_path, ratio, seed, lowercase=False) -> dict:
    corpus = load_corpus(corpus_path)
    if lowercase:
        corpus = fold_case(corpus)
    train, test = split_corpus(corpus, ratio, seed)
    save_corpus(train, train_path)
    save_corpus(test, test_path)
    return {"utterances": len(corpus), "dropped_duplicates": corpus.dropped,
            "train_utterances": len(train), "test_utterances": len(test)}


def stage_cooccur(train_path, vocab_path, counts_path, window, min_count) -> dict:
    train = load_corpus(train_path)
    vocab = build_vocabulary(train, min_count)
    counts = count_cooccurrences(train, vocab, window)
    vocab.save(vocab_path)
    counts.save(counts_path)
    return {"vocab_size": len(vocab), "total": counts.total, "nnz": counts.nnz}


def stage_ppmi(counts_path, ppmi_path) -> dict:
    ppmi = compute_ppmi(SparseCooccurrence.load(counts_path))
    ppmi.save(ppmi_path)
    return {"nnz": ppmi.nnz}


def stage_svd(ppmi_path, vocab_path, emb_path, dim, seed, oversample, power_iters) -> dict:
    vocab = Vocabulary.load(vocab_path)
    ppmi = PpmiMatrix.load(ppmi_path)
    svd = truncated_svd(ppmi, dim, seed=seed, oversample=oversample, power_iters=power_iters)
    extract_embeddings(svd, vocab).save(emb_path)
    return {"dim": dim, "singular_values": [float(s) for s in svd.sigma[: min(dim, 10)]]}


def stage_train(train_path, emb_path, model_path, kind, params, context_window) -> dict:
    train = load_corpus(train_path)
    emb = EmbeddingMatrix.load(emb_path)
    model = clf.train(train, emb, kind, params, context_window)
    model.save(model_path)
    return {"epoch_losses": list(model.history)}


def stage_eval(test_path, emb_path, model_path, pred_path, report_path, table_path) -> dict:
    test = load_corpus(test_path)
    emb = EmbeddingMatrix.load(emb_path)
    model = clf.ClassifierModel.load(model_path)
    predicted = clf.predict_corpus(model, test, emb)
    save_corpus((Utterance(u.tokens, p, u.id) for u, p in zip(test, predicted)), pred_path)
    report = evaluate(test, predicted)
    Path(report_path).write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    Path(table_path).write_text(report.format_table() + "\n", encoding="utf-8")
    return {"accuracy": report.accuracy, "weighted_f1": report.weighted[2]}


def _stage_calls(config: PipelineConfig, out: Path):
    a = {stage: {k: out / v for k, v in files.items()} for stage, files in ARTIFACTS.items()}
    return {
        "split": lambda: stage_split(
            config.corpus, a["split"]["train"], a["split"]["test"],
            parse_ratio(config.split_ratio), config.split_seed, config.lowercase,
        ),
        "cooccur": lambda: stage_cooccur(
            a["split"]["train"], a["cooccur"]["vocab"], a["cooccur"]["counts"],
            config.window, config.min_count,
        ),
        "ppmi": lambda: stage_ppmi(a["cooccur"]["counts"], a["ppmi"]["ppmi"]),
        "svd": lambda: stage_svd(
            a["ppmi"]["ppmi"], a["cooccur"]["vocab"], a["svd"]["embeddings"],
            config.dim, config.svd_seed, config.oversample, config.power_iters,
        ),
        "train": lambda: stage_train(
            a["split"]["train"], a["svd"]["embeddings"], a["train"]["model"],
            config.classifier, config.train_params, config.context_window,
        ),
        "eval": lambda: stage_eval(
            a["split"]["test"], a["svd"]["embeddings"], a["train"]["model"],
            a["eval"]["predictions"], a["eval"]["report"], a["eval"]["table"],
        ),
    }


def _write_manifest(out: Path, manifest: dict) -> None:
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")


def run_pipeline(config: PipelineConfig) -> dict:
    """Run all stages in order and return the manifest (also written to disk).

    On failure the manifest records the failing stage, marks earlier outputs
    stale, and :class:`PipelineError` is raised.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus_path = Path(config.corpus)
    manifest = {
        "config": {k: v for k, v in config.to_dict().items() if k not in ("corpus", "out_dir")},
        "input": {"corpus": corpus_path.name, "sha256": None},
        "stages": [],
        "status": "running",
    }
    calls = _stage_calls(config, out)
    stage = "split"
    try:
        manifest["input"]["sha256"] = sha256_file(corpus_path)
        for stage in STAGES:
            logger.info("stage %s", stage)
            info = calls[stage]()
            artifacts = {
                key: {"path": name, "sha256": sha256_file(out / name)}
                for key, name in ARTIFACTS[stage].items()
            }
            manifest["stages"].append({"name": stage, "artifacts": artifacts, "info": info})
    except Exception as exc:
        manifest["status"] = "failed"
        manifest["failed_stage"] = stage
        manifest["error"] = f"{type(exc).__name__}: {exc}"
        for entry in manifest["stages"]:
            for art in entry["artifacts"].values():
                art["stale"] = True
        _write_manifest(out, manifest)
        raise PipelineError(stage, exc) from exc
    manifest["status"] = "complete"
    _write_manifest(out, manifest)
    return manifest

