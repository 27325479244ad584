"""Synthetic Hindi/English-style code-mixed corpora with known tags.

Each language gets its own pseudo-vocabulary.  An utterance is a Markov
walk: with probability ``1 - switch`` the next word is drawn uniformly from
the current language, otherwise the walk crosses over to one of the current
word's designated collocates in the other language.  The number of
collocates is chosen so that each designated cross-language pair is
followed ``bias`` times as often as any single same-language pair; the
language tag of every token is known by construction.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .corpus import Tag, TaggedCorpus, Utterance

OTHER_POOLS = {
    Tag.Univ: (".", ",", "!", "?", ":)", "...", "-"),
    Tag.User: ("user",),
    Tag.Hash: ("#news", "#cricket", "#politics", "#india"),
    Tag.U: ("url",),
    Tag.NE: ("Delhi", "Mumbai", "Modi", "Kohli", "BJP"),
}


@dataclass(frozen=True)
class SynthSpec:
    hi_vocab: int = 50
    en_vocab: int = 50
    bias: float = 4.0
    utterances: int = 2000
    seed: int = 0
    switch: float = 0.2
    min_length: int = 6
    max_length: int = 16
    other_rate: float = 0.0

    def __post_init__(self):
        if self.hi_vocab < 1 or self.en_vocab < 1:
            raise ValueError("both language vocabularies need at least one word")
        if self.bias < 1:
            raise ValueError(f"bias must be >= 1, got {self.bias}")
        if self.utterances < 1:
            raise ValueError("utterances must be >= 1")
        if not 0 < self.switch < 1:
            raise ValueError(f"switch must lie in (0, 1), got {self.switch}")
        if not 0 <= self.other_rate < 1:
            raise ValueError(f"other_rate must lie in [0, 1), got {self.other_rate}")
        if not 1 <= self.min_length <= self.max_length:
            raise ValueError("need 1 <= min_length <= max_length")

    @classmethod
    def from_dict(cls, data: dict) -> "SynthSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown synth spec keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "SynthSpec":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    def to_dict(self) -> dict:
        return asdict(self)

    def n_collocates(self, lang: int) -> int:
        """Cross-language collocates per word of language ``lang`` (0 = Hi, 1 = En)."""
        own, other = (self.hi_vocab, self.en_vocab) if lang == 0 else (self.en_vocab, self.hi_vocab)
        k = round(self.switch * own / (self.bias * (1.0 - self.switch)))
        return int(min(other, max(1, k)))


def word_form(lang: int, i: int) -> str:
    return f"{'hi' if lang == 0 else 'en'}{i}"


def generate_synthetic(spec: SynthSpec) -> TaggedCorpus:
    rng = np.random.default_rng(spec.seed)
    sizes = (spec.hi_vocab, spec.en_vocab)
    ks = (spec.n_collocates(0), spec.n_collocates(1))
    cross = [rng.integers(0, sizes[1 - L], size=(sizes[L], ks[L])) for L in (0, 1)]
    lang_tags = (Tag.Hi, Tag.En)
    other_kinds = tuple(OTHER_POOLS)

    seen = set()
    utterances = []
    attempts = 0
    limit = 100 * spec.utterances + 1000
    while len(utterances) < spec.utterances:
        attempts += 1
        if attempts > limit:
            raise ValueError("could not draw enough distinct utterances; enlarge the vocabularies")
        length = int(rng.integers(spec.min_length, spec.max_length + 1))
        switch = rng.random(length)
        pick = rng.random(length)
        other = rng.random(length)
        lang = int(rng.integers(2))
        word = int(rng.integers(sizes[lang]))
        tokens, tags = [], []
        for t in range(length):
            if t > 0:
                if switch[t] < spec.switch:
                    word = int(cross[lang][word, int(pick[t] * ks[lang])])
                    lang = 1 - lang
                else:
                    word = int(pick[t] * sizes[lang])
            if other[t] < spec.other_rate:
                kind = other_kinds[int(rng.integers(len(other_kinds)))]
                pool = OTHER_POOLS[kind]
                tokens.append(pool[int(rng.integers(len(pool)))])
                tags.append(kind)
            else:
                tokens.append(word_form(lang, word))
                tags.append(lang_tags[lang])
        key = tuple(tokens)
        if key in seen:
            continue
        seen.add(key)
        utterances.append(Utterance(key, tags, id=f"syn{len(utterances)}"))
    return TaggedCorpus(tuple(utterances))
