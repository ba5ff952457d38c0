"""Corpus ingestion: normalization, vocabulary, windows, and window-level TF-IDF.

The TF-IDF convention treats every context window as a short document, so
document frequency of a token is the number of windows whose *context*
(center excluded) contains it at least once.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from numba import njit


class EmptyVocabularyError(ValueError):
    """No token survived the min_count threshold."""


_ONES = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
    "sixteen", "seventeen", "eighteen", "nineteen",
]
_TENS = [
    "", "", "twenty", "thirty", "forty", "fifty", "sixty", "seventy",
    "eighty", "ninety",
]

MAX_SPELLED_NUMBER = 999_999


def number_to_words(n: int) -> list[str]:
    """Spell a nonnegative integer <= 999999 as lowercase word tokens."""
    if n < 0 or n > MAX_SPELLED_NUMBER:
        raise ValueError(f"number out of spellable range: {n}")
    if n < 20:
        return [_ONES[n]]
    if n < 100:
        tens, ones = divmod(n, 10)
        words = [_TENS[tens]]
        if ones:
            words.append(_ONES[ones])
        return words
    if n < 1000:
        hundreds, rest = divmod(n, 100)
        words = [_ONES[hundreds], "hundred"]
        if rest:
            words.extend(number_to_words(rest))
        return words
    thousands, rest = divmod(n, 1000)
    words = number_to_words(thousands) + ["thousand"]
    if rest:
        words.extend(number_to_words(rest))
    return words


def normalize_tokenize(raw: str) -> list[str]:
    """Lowercase, split on whitespace, strip boundary punctuation, spell digits.

    Standalone digit strings in [0, 999999] become English number words
    (possibly several tokens); anything mixed (``3d``, ``1,000``) is kept
    verbatim. Tokens that are pure punctuation vanish. Idempotent on its own
    joined output.
    """
    out: list[str] = []
    for piece in raw.lower().split():
        token = _strip_boundary(piece)
        if not token:
            continue
        if token.isascii() and token.isdigit():
            value = int(token)
            if value <= MAX_SPELLED_NUMBER:
                out.extend(number_to_words(value))
                continue
        out.append(token)
    return out


def _strip_boundary(token: str) -> str:
    start, end = 0, len(token)
    while start < end and not token[start].isalnum():
        start += 1
    while end > start and not token[end - 1].isalnum():
        end -= 1
    return token[start:end]


@dataclass
class Vocabulary:
    """Token to (id, count) mapping; ids dense, by descending frequency."""

    entries: dict[str, tuple[int, int]]
    total_tokens: int
    dropped_tokens: int = 0

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def id_of(self, token: str) -> int | None:
        entry = self.entries.get(token)
        return entry[0] if entry is not None else None

    def count_of(self, token: str) -> int:
        entry = self.entries.get(token)
        return entry[1] if entry is not None else 0

    @property
    def tokens(self) -> list[str]:
        """Tokens ordered by id."""
        ordered = [""] * len(self.entries)
        for token, (tid, _) in self.entries.items():
            ordered[tid] = token
        return ordered

    @property
    def counts(self) -> np.ndarray:
        arr = np.zeros(len(self.entries), dtype=np.int64)
        for tid, count in self.entries.values():
            arr[tid] = count
        return arr

    def encode(self, tokens: Iterable[str]) -> tuple[np.ndarray, int]:
        """Map tokens to ids, dropping out-of-vocabulary ones.

        Returns the id array and the number of dropped tokens.
        """
        ids = []
        dropped = 0
        for token in tokens:
            entry = self.entries.get(token)
            if entry is None:
                dropped += 1
            else:
                ids.append(entry[0])
        return np.asarray(ids, dtype=np.int32), dropped

    def save(self, path: str | Path) -> None:
        lines = []
        for token, (tid, count) in sorted(self.entries.items(), key=lambda kv: kv[1][0]):
            lines.append(f"{token}\t{tid}\t{count}")
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        entries: dict[str, tuple[int, int]] = {}
        total = 0
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            token, tid, count = line.split("\t")
            entries[token] = (int(tid), int(count))
            total += int(count)
        return cls(entries=entries, total_tokens=total)


def build_vocabulary(tokens: Sequence[str], min_count: int = 1) -> Vocabulary:
    """Count tokens and keep those with frequency >= min_count.

    Ids are assigned in descending frequency order, ties lexicographic.
    """
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts = Counter(tokens)
    kept = [(token, count) for token, count in counts.items() if count >= min_count]
    if not kept:
        raise EmptyVocabularyError(
            f"no token reaches min_count={min_count} (saw {len(counts)} distinct tokens)"
        )
    kept.sort(key=lambda kv: (-kv[1], kv[0]))
    entries = {token: (tid, count) for tid, (token, count) in enumerate(kept)}
    total = sum(counts.values())
    dropped = total - sum(count for _, count in kept)
    return Vocabulary(entries=entries, total_tokens=total, dropped_tokens=dropped)


@dataclass
class ContextWindow:
    """One corpus position: center token id plus up to 2N context ids."""

    center: int
    context: list[int]
    position: int


def iter_windows(corpus: Sequence[int] | np.ndarray, window: int) -> Iterator[ContextWindow]:
    """Yield one window per corpus position; boundary windows truncate."""
    if window < 1:
        raise ValueError("window must be >= 1")
    ids = np.asarray(corpus)
    length = len(ids)
    for pos in range(length):
        lo = max(0, pos - window)
        hi = min(length, pos + window + 1)
        context = [int(ids[j]) for j in range(lo, hi) if j != pos]
        yield ContextWindow(center=int(ids[pos]), context=context, position=pos)


@njit(cache=True)
def _window_document_frequency(ids, window, vocab_size):  # pragma: no cover
    length = ids.shape[0]
    df = np.zeros(vocab_size, dtype=np.int64)
    last_seen = np.full(vocab_size, -1, dtype=np.int64)
    for pos in range(length):
        lo = pos - window
        if lo < 0:
            lo = 0
        hi = pos + window + 1
        if hi > length:
            hi = length
        for j in range(lo, hi):
            if j == pos:
                continue
            token = ids[j]
            if last_seen[token] != pos:
                last_seen[token] = pos
                df[token] += 1
    return df


@dataclass
class TfIdfModel:
    """Smoothed idf per vocabulary id under the window-as-document convention."""

    idf: np.ndarray
    window: int
    window_count: int
    convention: str = "window-as-document"
    unknown_token_hits: int = field(default=0, compare=False)

    def idf_of(self, token_id: int) -> float:
        if 0 <= token_id < len(self.idf):
            return float(self.idf[token_id])
        self.unknown_token_hits += 1
        return 0.0

    def save(self, path: str | Path) -> None:
        lines = [f"#window\t{self.window}", f"#windows\t{self.window_count}"]
        lines += [f"{tid}\t{value!r}" for tid, value in enumerate(self.idf)]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TfIdfModel":
        window = 0
        window_count = 0
        values: list[float] = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if line.startswith("#window\t"):
                window = int(line.split("\t")[1])
            elif line.startswith("#windows\t"):
                window_count = int(line.split("\t")[1])
            elif line.strip():
                _, value = line.split("\t")
                values.append(float(value))
        return cls(idf=np.asarray(values, dtype=np.float64), window=window, window_count=window_count)


def window_tfidf(corpus: Sequence[int] | np.ndarray, vocab: Vocabulary | int,
                 window: int) -> TfIdfModel:
    """idf(w) = log((1 + W) / (1 + df_w)) + 1 over all W context windows.

    df_w counts windows whose context contains w at least once; smoothing
    keeps every idf strictly positive. `vocab` may be a Vocabulary or a
    plain id-space size.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    size = vocab if isinstance(vocab, int) else len(vocab)
    ids = np.ascontiguousarray(np.asarray(corpus, dtype=np.int32))
    windows = int(len(ids))
    if windows:
        df = _window_document_frequency(ids, window, size)
    else:
        df = np.zeros(size, dtype=np.int64)
    idf = np.log((1.0 + windows) / (1.0 + df.astype(np.float64))) + 1.0
    return TfIdfModel(idf=idf, window=window, window_count=windows)


@dataclass
class CorpusBuildResult:
    vocabulary: Vocabulary
    tfidf: TfIdfModel
    corpus_ids: np.ndarray
    dropped_tokens: int


def build_corpus(raw_text: str, min_count: int, window: int) -> CorpusBuildResult:
    """Normalize raw text, build the vocabulary, and fit window TF-IDF.

    Tokens below min_count are dropped from the id stream entirely, so
    downstream windows never see them.
    """
    tokens = normalize_tokenize(raw_text)
    vocab = build_vocabulary(tokens, min_count=min_count)
    ids, dropped = vocab.encode(tokens)
    tfidf = window_tfidf(ids, vocab, window)
    return CorpusBuildResult(vocabulary=vocab, tfidf=tfidf, corpus_ids=ids, dropped_tokens=dropped)
