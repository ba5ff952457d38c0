"""Dense vectors keyed by (word, sense-index) pairs, with text-file I/O.

File format: first line ``<entry_count> <dimension>``, then one line per
entry: ``word#<sense_index>`` followed by the vector components. The
single-sense phase stores every word under sense index 0; sense-tagged
tables use indices starting at 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SENSE_SEP = "#"


def make_key(word: str, sense: int) -> str:
    return f"{word}{SENSE_SEP}{sense}"


def split_key(token: str) -> tuple[str, int]:
    """Split ``word#sense``; tokens without a sense suffix get sense 1."""
    word, sep, sense = token.rpartition(SENSE_SEP)
    if sep and sense.isdigit():
        return word, int(sense)
    return token, 1


@dataclass
class EmbeddingTable:
    """Row-aligned (word, sense) keys over a dense matrix."""

    keys: list[tuple[str, int]]
    vectors: np.ndarray
    role: str = "center"  # center (input) or context (output) parameters
    _index: dict[tuple[str, int], int] = field(default_factory=dict, repr=False)
    _senses: dict[str, list[int]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if len(self.keys) != self.vectors.shape[0]:
            raise ValueError("keys and vectors disagree on entry count")
        self._index = {key: row for row, key in enumerate(self.keys)}
        self._senses = {}
        for word, sense in self.keys:
            self._senses.setdefault(word, []).append(sense)
        for senses in self._senses.values():
            senses.sort()

    @property
    def dimension(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return len(self.keys)

    def __contains__(self, item: str | tuple[str, int]) -> bool:
        if isinstance(item, tuple):
            return item in self._index
        return item in self._senses

    def row(self, word: str, sense: int) -> int:
        return self._index[(word, sense)]

    def vector(self, word: str, sense: int) -> np.ndarray:
        return self.vectors[self._index[(word, sense)]]

    def senses_of(self, word: str) -> list[int]:
        """Sense indices available for a word, ascending; [] if unknown."""
        return self._senses.get(word, [])

    def sense_vectors(self, word: str) -> np.ndarray:
        rows = [self._index[(word, sense)] for sense in self.senses_of(word)]
        return self.vectors[rows]

    def save(self, path: str | Path) -> None:
        n, dim = self.vectors.shape
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{n} {dim}\n")
            for (word, sense), row in zip(self.keys, self.vectors):
                components = " ".join(repr(float(x)) for x in row)
                fh.write(f"{make_key(word, sense)} {components}\n")

    @classmethod
    def load(cls, path: str | Path, role: str = "center") -> "EmbeddingTable":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().split()
            n, dim = int(header[0]), int(header[1])
            keys: list[tuple[str, int]] = []
            vectors = np.empty((n, dim), dtype=np.float64)
            for row in range(n):
                parts = fh.readline().rstrip("\n").split(" ")
                keys.append(split_key(parts[0]))
                vectors[row] = [float(x) for x in parts[1:]]
        return cls(keys=keys, vectors=vectors, role=role)
