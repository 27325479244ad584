"""Per-class tagging scores and the code-mixing index."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .corpus import TAG_INDEX, TAGS, Tag

TAG_LABELS = {
    Tag.En: "English",
    Tag.Hi: "Hindi",
    Tag.Univ: "Universal",
    Tag.User: "Username",
    Tag.Hash: "Hashtag",
    Tag.U: "URL",
    Tag.NE: "Named Entity",
}


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True, eq=False)
class EvalReport:
    per_class: dict[Tag, ClassScores]
    weighted: tuple[float, float, float]
    confusion: np.ndarray
    accuracy: float

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted": dict(zip(("precision", "recall", "f1"), self.weighted)),
            "per_class": {
                t.value: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "support": s.support,
                }
                for t, s in self.per_class.items()
            },
            "confusion": {
                "order": [t.value for t in TAGS],
                "rows": self.confusion.tolist(),
            },
        }

    def format_table(self) -> str:
        lines = [f"{'Predicted Tag':<18}{'P':>7}{'R':>7}{'F':>7}{'Support':>9}"]
        for tag, s in self.per_class.items():
            if s.support == 0:
                continue
            lines.append(
                f"{TAG_LABELS[tag]:<18}{s.precision:>7.2f}{s.recall:>7.2f}{s.f1:>7.2f}{s.support:>9d}"
            )
        p, r, f = self.weighted
        lines.append(f"{'Weighted Average':<18}{p:>7.2f}{r:>7.2f}{f:>7.2f}{self.total:>9d}")
        lines.append(f"{'Accuracy':<18}{self.accuracy:>7.4f}")
        return "\n".join(lines)


def _ratio(num: float, den: float) -> float:
    return num / den if den > 0 else 0.0


def confusion_matrix(gold: Iterable[Sequence[Tag]], predicted: Iterable[Sequence[Tag]]) -> np.ndarray:
    """7x7 counts, rows gold, columns predicted."""
    conf = np.zeros((len(TAGS), len(TAGS)), dtype=np.int64)
    gold = list(gold)
    predicted = list(predicted)
    if len(gold) != len(predicted):
        raise ValueError(f"{len(gold)} gold utterances but {len(predicted)} predicted")
    for k, (g, p) in enumerate(zip(gold, predicted)):
        g = getattr(g, "tags", g)
        if len(g) != len(p):
            raise ValueError(f"utterance {k}: {len(g)} gold tags but {len(p)} predicted")
        gi = np.fromiter((TAG_INDEX[t] for t in g), dtype=np.int64, count=len(g))
        pi = np.fromiter((TAG_INDEX[t] for t in p), dtype=np.int64, count=len(p))
        np.add.at(conf, (gi, pi), 1)
    return conf


def report_from_confusion(conf: np.ndarray) -> EvalReport:
    tp = np.diag(conf).astype(np.float64)
    gold_n = conf.sum(axis=1)
    pred_n = conf.sum(axis=0)
    per_class = {}
    for k, tag in enumerate(TAGS):
        p = _ratio(tp[k], pred_n[k])
        r = _ratio(tp[k], gold_n[k])
        f = _ratio(2 * p * r, p + r)
        per_class[tag] = ClassScores(p, r, f, int(gold_n[k]))
    total = int(gold_n.sum())
    if total:
        wp = sum(s.precision * s.support for s in per_class.values()) / total
        wr = sum(s.recall * s.support for s in per_class.values()) / total
        wf = sum(s.f1 * s.support for s in per_class.values()) / total
    else:
        wp = wr = wf = 0.0
    accuracy = _ratio(tp.sum(), total)
    return EvalReport(per_class, (wp, wr, wf), conf, accuracy)


def evaluate(gold, predicted) -> EvalReport:
    """Score predicted tag sequences against gold utterances (or tag sequences).

    Weighted averages use gold support, so classes absent from gold drop out.
    """
    return report_from_confusion(confusion_matrix(gold, predicted))


# ------------------------------------------------------------------- CMI


@dataclass(frozen=True)
class CmiScore:
    value: float
    n_hi: int
    n_en: int
    n_other: int

    @property
    def total(self) -> int:
        return self.n_hi + self.n_en + self.n_other


def cmi_from_counts(n_hi: int, n_en: int, n_other: int) -> CmiScore:
    if min(n_hi, n_en, n_other) < 0:
        raise ValueError("counts must be non-negative")
    total = n_hi + n_en + n_other
    value = 1.0 - max(n_hi, n_en) / total if total > 0 else 0.0
    return CmiScore(value, n_hi, n_en, n_other)


def _lang_counts(tags: Iterable[Tag]) -> tuple[int, int, int]:
    n_hi = n_en = n_other = 0
    for t in tags:
        if t is Tag.Hi:
            n_hi += 1
        elif t is Tag.En:
            n_en += 1
        else:
            n_other += 1
    return n_hi, n_en, n_other


def cmi(tags_or_utterance) -> CmiScore:
    """Code-mixing index of one utterance (or bare tag sequence)."""
    return cmi_from_counts(*_lang_counts(getattr(tags_or_utterance, "tags", tags_or_utterance)))


@dataclass(frozen=True)
class CorpusCmi:
    corpus: CmiScore
    utterance_mean: float
    n_utterances: int


def corpus_cmi(corpus) -> CorpusCmi:
    """Corpus-level CMI on pooled counts, plus the mean of utterance CMIs."""
    n_hi = n_en = n_other = 0
    values = []
    for utt in corpus:
        h, e, o = _lang_counts(getattr(utt, "tags", utt))
        n_hi += h
        n_en += e
        n_other += o
        values.append(cmi_from_counts(h, e, o).value)
    mean = float(np.mean(values)) if values else 0.0
    return CorpusCmi(cmi_from_counts(n_hi, n_en, n_other), mean, len(values))
