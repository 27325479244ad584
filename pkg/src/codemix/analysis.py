"""Bilingual vs monolingual PPMI strength of word-context pairs."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .corpus import TAGS, Tag
from .ppmi import PpmiMatrix

logger = logging.getLogger(__name__)


class PairClass(enum.Enum):
    bilingual = "bilingual"
    monolingual = "monolingual"
    excluded = "excluded"


LANGUAGES = (Tag.Hi, Tag.En)


def classify_pair(a: Tag | None, b: Tag | None) -> PairClass:
    if a not in LANGUAGES or b not in LANGUAGES:
        return PairClass.excluded
    return PairClass.monolingual if a is b else PairClass.bilingual


@dataclass(frozen=True)
class WordLanguages:
    """Majority tag per vocabulary id (None for words never seen)."""

    tags: tuple[Tag | None, ...]
    ties: int

    def __getitem__(self, i: int) -> Tag | None:
        return self.tags[i]

    def __len__(self) -> int:
        return len(self.tags)

    def as_codes(self) -> np.ndarray:
        """0 = Hi, 1 = En, -1 = anything else."""
        code = {Tag.Hi: 0, Tag.En: 1}
        return np.array([code.get(t, -1) for t in self.tags], dtype=np.int64)


def assign_word_language(corpus, vocab) -> WordLanguages:
    """Give each word its most frequent tag; ties go to the earlier tag in ``TAGS``."""
    tag_pos = {t: k for k, t in enumerate(TAGS)}
    counts = np.zeros((len(vocab), len(TAGS)), dtype=np.int64)
    for utt in corpus:
        for tok, tag in zip(utt.tokens, utt.tags):
            i = vocab.get(tok)
            if i >= 0:
                counts[i, tag_pos[tag]] += 1
    best = counts.max(axis=1)
    winners = np.argmax(counts, axis=1)
    tied = (counts == best[:, None]).sum(axis=1) > 1
    seen = best > 0
    ties = int(np.sum(tied & seen))
    if ties:
        logger.info("%d words had tied majority tags; resolved by tag order", ties)
    tags = tuple(TAGS[k] if s else None for k, s in zip(winners, seen))
    return WordLanguages(tags, ties)


@dataclass(frozen=True)
class PairRow:
    word: int
    context: int
    pair_class: PairClass
    value: float


@dataclass(frozen=True)
class PairReport:
    bilingual_avg: float | None
    monolingual_avg: float | None
    n_bilingual: int
    n_monolingual: int
    n_excluded: int
    pairs: tuple[PairRow, ...]
    target: int | None = None

    def to_dict(self, words=None) -> dict:
        name = (lambda i: words[i]) if words is not None else (lambda i: i)
        return {
            "target": None if self.target is None else name(self.target),
            "bilingual_avg": self.bilingual_avg,
            "monolingual_avg": self.monolingual_avg,
            "n_bilingual": self.n_bilingual,
            "n_monolingual": self.n_monolingual,
            "n_excluded": self.n_excluded,
        }


def _mean(values: np.ndarray) -> float | None:
    return float(values.mean()) if values.size else None


def pair_analysis(
    ppmi: PpmiMatrix,
    lang: WordLanguages,
    target: int | str | None = None,
    vocab=None,
) -> PairReport:
    """Average stored PPMI values of bilingual and monolingual pairs.

    Only nonzero entries count.  With ``target`` the view is restricted to
    pairs whose word is the target; ``pairs`` then lists them by value.
    An empty class yields ``None`` rather than 0.
    """
    n = ppmi.shape[0]
    if len(lang) != n:
        raise ValueError(f"language map covers {len(lang)} words, matrix has {n}")
    if isinstance(target, str):
        if vocab is None or target not in vocab:
            raise KeyError(f"target word {target!r} not in vocabulary")
        target = vocab.get(target)
    elif target is not None and not 0 <= target < n:
        raise KeyError(f"target id {target} out of range")

    coo = ppmi.matrix.tocoo()
    rows, cols, vals = coo.row, coo.col, coo.data
    if target is not None:
        keep = rows == target
        rows, cols, vals = rows[keep], cols[keep], vals[keep]
    codes = lang.as_codes()
    a, b = codes[rows], codes[cols]
    valid = (a >= 0) & (b >= 0)
    bil = valid & (a != b)
    mono = valid & (a == b)

    pairs = ()
    if target is not None:
        order = np.lexsort((cols, -vals))
        pairs = tuple(
            PairRow(int(rows[k]), int(cols[k]), classify_pair(lang[rows[k]], lang[cols[k]]), float(vals[k]))
            for k in order
        )
    return PairReport(
        _mean(vals[bil]),
        _mean(vals[mono]),
        int(bil.sum()),
        int(mono.sum()),
        int((~valid).sum()),
        pairs,
        target,
    )


def format_pair_report(report: PairReport, words, whole: PairReport | None = None, top: int = 10) -> str:
    def avg(v):
        return "-" if v is None else f"{v:.2f}"

    lines = []
    if report.target is not None:
        lines.append(f"target word = {words[report.target]}")
    lines.append(f"{'word-context pair':<32}{'code mixing':>12}{'PPMI':>8}")
    shown = [p for p in report.pairs if p.pair_class is not PairClass.excluded][:top]
    for p in shown:
        label = f"{words[p.word]} {words[p.context]}"
        mixing = "yes" if p.pair_class is PairClass.bilingual else "no"
        lines.append(f"{label:<32}{mixing:>12}{p.value:>8.2f}")
    lines.append(f"{'all pairs average':<32}{'yes':>12}{avg(report.bilingual_avg):>8}")
    lines.append(f"{'all pairs average':<32}{'no':>12}{avg(report.monolingual_avg):>8}")
    if whole is not None:
        lines.append(f"{'vocabulary-wide average':<32}{'yes':>12}{avg(whole.bilingual_avg):>8}")
        lines.append(f"{'vocabulary-wide average':<32}{'no':>12}{avg(whole.monolingual_avg):>8}")
    lines.append(
        f"pairs: {report.n_bilingual} bilingual, {report.n_monolingual} monolingual, "
        f"{report.n_excluded} excluded"
    )
    return "\n".join(lines)
