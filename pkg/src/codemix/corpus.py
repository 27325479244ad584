"""Tagged code-mixed corpora: tag set, preprocessing, file I/O and splitting."""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

logger = logging.getLogger(__name__)

URL_PATTERN = re.compile(r"^(?:https?://|www\.)", re.IGNORECASE)
USER_PATTERN = re.compile(r"^@\w")
URL_TOKEN = "url"
USER_TOKEN = "user"
COMMENT_PREFIX = "#\t"
ID_KEY = "id="


class Tag(enum.Enum):
    En = "En"
    Hi = "Hi"
    Univ = "Univ"
    User = "User"
    Hash = "Hash"
    U = "U"
    NE = "NE"

    @classmethod
    def parse(cls, text: str) -> "Tag":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown tag {text!r}") from None

    @property
    def index(self) -> int:
        return TAG_INDEX[self]

    def __str__(self) -> str:
        return self.value


TAGS: tuple[Tag, ...] = tuple(Tag)
TAG_INDEX = {t: i for i, t in enumerate(TAGS)}
TAG_NAMES = frozenset(t.value for t in TAGS)


class CorpusFormatError(ValueError):
    """Raised for malformed corpus files; carries the offending line number."""

    def __init__(self, message: str, lineno: int | None = None, path: str | None = None):
        self.lineno = lineno
        self.path = path
        if path is not None and lineno is not None:
            where = f"{path}:{lineno}: "
        elif path is not None:
            where = f"{path}: "
        elif lineno is not None:
            where = f"line {lineno}: "
        else:
            where = ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Utterance:
    tokens: tuple[str, ...]
    tags: tuple[Tag, ...]
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        if len(self.tokens) == 0:
            raise ValueError("utterance must contain at least one token")
        if len(self.tokens) != len(self.tags):
            raise ValueError(
                f"token/tag length mismatch: {len(self.tokens)} != {len(self.tags)}"
            )
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"invalid token {tok!r}")
        for tag in self.tags:
            if not isinstance(tag, Tag):
                raise TypeError(f"expected Tag, got {tag!r}")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class TaggedCorpus:
    """An ordered, duplicate-free collection of utterances.

    ``dropped`` records how many duplicate utterances were discarded when the
    corpus was built; it does not take part in equality.
    """

    utterances: tuple[Utterance, ...]
    dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        seen = set()
        for utt in self.utterances:
            if utt.tokens in seen:
                raise ValueError(f"duplicate utterance {' '.join(utt.tokens)!r}")
            seen.add(utt.tokens)

    @classmethod
    def from_utterances(cls, utterances: Iterable[Utterance]) -> "TaggedCorpus":
        """Build a corpus keeping the first occurrence of each token sequence."""
        kept = []
        seen = set()
        dropped = 0
        for utt in utterances:
            if utt.tokens in seen:
                dropped += 1
                continue
            seen.add(utt.tokens)
            kept.append(utt)
        return cls(tuple(kept), dropped=dropped)

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    def __getitem__(self, i):
        return self.utterances[i]

    @property
    def n_tokens(self) -> int:
        return sum(len(u) for u in self.utterances)

    def token_lists(self) -> list[tuple[str, ...]]:
        return [u.tokens for u in self.utterances]


def normalize_token(token: str, lowercase: bool = False) -> str:
    if URL_PATTERN.match(token):
        return URL_TOKEN
    if USER_PATTERN.match(token):
        return USER_TOKEN
    return token.lower() if lowercase else token


def preprocess_raw(text: str, lowercase: bool = False) -> list[str]:
    """Whitespace-tokenize a raw utterance and normalize links and mentions.

    URLs become ``url`` and ``@name`` mentions become ``user``; hashtags are
    left untouched.
    """
    return [normalize_token(tok, lowercase) for tok in text.split()]


def iter_corpus_lines(lines: Iterable[str], path: str | None = None):
    """Yield utterances parsed from token-per-line text."""
    rows: list[tuple[str, Tag]] = []
    block_id: str | None = None
    block_start = None
    ordinal = 0

    def flush():
        nonlocal rows, block_id, block_start, ordinal
        if not rows:
            if block_id is not None:
                raise CorpusFormatError("empty utterance block", block_start, path)
            return None
        utt = Utterance(
            [tok for tok, _ in rows],
            [tag for _, tag in rows],
            id=block_id if block_id is not None else str(ordinal),
        )
        ordinal += 1
        rows, block_id, block_start = [], None, None
        return utt

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            utt = flush()
            if utt is not None:
                yield utt
            continue
        if block_start is None:
            block_start = lineno
        fields = line.split("\t")
        if line.startswith(COMMENT_PREFIX) and not (len(fields) == 2 and fields[1] in TAG_NAMES):
            if rows:
                raise CorpusFormatError("comment inside utterance block", lineno, path)
            comment = line[len(COMMENT_PREFIX):].strip()
            if comment.startswith(ID_KEY):
                block_id = comment[len(ID_KEY):]
            continue
        if len(fields) != 2:
            raise CorpusFormatError(
                f"expected 2 tab-separated fields, found {len(fields)}", lineno, path
            )
        token, tag_text = fields
        if not token or any(ch.isspace() for ch in token):
            raise CorpusFormatError(f"invalid token {token!r}", lineno, path)
        if tag_text not in TAG_NAMES:
            raise CorpusFormatError(f"unknown tag {tag_text!r}", lineno, path)
        rows.append((token, Tag(tag_text)))
    utt = flush()
    if utt is not None:
        yield utt


def parse_corpus(text: str, path: str | None = None) -> TaggedCorpus:
    return TaggedCorpus.from_utterances(iter_corpus_lines(text.splitlines(), path))


def load_corpus(path) -> TaggedCorpus:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        corpus = TaggedCorpus.from_utterances(iter_corpus_lines(fh, str(path)))
    if corpus.dropped:
        logger.info("%s: dropped %d duplicate utterances", path, corpus.dropped)
    return corpus


def format_corpus(corpus: TaggedCorpus | Iterable[Utterance]) -> str:
    out = []
    for utt in corpus:
        if utt.id:
            out.append(f"{COMMENT_PREFIX}{ID_KEY}{utt.id}")
        for tok, tag in zip(utt.tokens, utt.tags):
            out.append(f"{tok}\t{tag.value}")
        out.append("")
    return "\n".join(out)


def save_corpus(corpus: TaggedCorpus | Iterable[Utterance], path) -> None:
    Path(path).write_text(format_corpus(corpus), encoding="utf-8")


def split_corpus(
    corpus: TaggedCorpus, ratio: tuple[int, int] = (10, 1), seed: int = 0
) -> tuple[TaggedCorpus, TaggedCorpus]:
    """Split at utterance level into train/test parts.

    Train receives ``floor(n * a / (a + b))`` utterances (clamped so both
    parts are non-empty).  Membership is drawn from a seeded permutation;
    original order is kept inside each part.
    """
    a, b = ratio
    if a <= 0 or b <= 0:
        raise ValueError(f"ratio parts must be positive, got {a}:{b}")
    n = len(corpus)
    if n < 2:
        raise ValueError(f"need at least 2 utterances to split, got {n}")
    n_train = min(max((n * a) // (a + b), 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    in_train = np.zeros(n, dtype=bool)
    in_train[perm[:n_train]] = True
    utts = corpus.utterances
    train = TaggedCorpus(tuple(u for u, keep in zip(utts, in_train) if keep))
    test = TaggedCorpus(tuple(u for u, keep in zip(utts, in_train) if not keep))
    return train, test


def parse_ratio(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise ValueError(f"ratio must look like 10:1, got {text!r}")
    a, b = int(parts[0]), int(parts[1])
    if a <= 0 or b <= 0:
        raise ValueError(f"ratio parts must be positive, got {text!r}")
    return a, b


def tag_distribution(corpus: Iterable[Utterance]) -> dict[Tag, int]:
    counts = {t: 0 for t in TAGS}
    for utt in corpus:
        for tag in utt.tags:
            counts[tag] += 1
    return counts


def rule_tag(token: str) -> Tag | None:
    """Tag determinable from surface form alone, or None for language tokens."""
    if token == URL_TOKEN:
        return Tag.U
    if token == USER_TOKEN:
        return Tag.User
    if token.startswith("#") and len(token) > 1:
        return Tag.Hash
    if not any(ch.isalnum() for ch in token):
        return Tag.Univ
    return None


def preprocess_lines(
    lines: Iterable[str],
    default_tag: Tag | None = None,
    lowercase: bool = False,
    path: str | None = None,
) -> TaggedCorpus:
    """Turn raw utterance lines into a tagged corpus.

    Each line is ``text`` or ``text<TAB>tags`` with space-separated tags
    aligned to the whitespace tokens of ``text``.  Untagged lines receive
    surface-rule tags (url, user, hashtag, punctuation) and ``default_tag``
    for everything else; without a default such lines are an error.
    """
    utts = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        text, sep, tag_field = line.partition("\t")
        tokens = preprocess_raw(text, lowercase)
        if not tokens:
            continue
        if sep:
            tag_texts = tag_field.split()
            if len(tag_texts) != len(tokens):
                raise CorpusFormatError(
                    f"{len(tokens)} tokens but {len(tag_texts)} tags", lineno, path
                )
            try:
                tags = [Tag.parse(t) for t in tag_texts]
            except ValueError as exc:
                raise CorpusFormatError(str(exc), lineno, path) from None
        else:
            tags = []
            for tok in tokens:
                tag = rule_tag(tok) or default_tag
                if tag is None:
                    raise CorpusFormatError(
                        f"untagged token {tok!r} and no default tag given", lineno, path
                    )
                tags.append(tag)
        utts.append(Utterance(tokens, tags, id=str(lineno)))
    return TaggedCorpus.from_utterances(utts)

