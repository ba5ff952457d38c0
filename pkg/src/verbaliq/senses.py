"""Sense tagging: context vectors, spherical k-means, gloss matching, relabeling.

A polysemous word's occurrences are clustered by the TF-IDF-weighted
average of their context embeddings; clusters are then matched greedily
to dictionary senses via gloss vectors, and every occurrence is relabeled
with the sense of its cluster.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from numba import njit

from .corpus import ContextWindow, TfIdfModel, normalize_tokenize
from .embeddings import EmbeddingTable, make_key

# Words with fewer than MIN_OCCURRENCES_PER_SENSE * k occurrences skip
# clustering: too few contexts to support k clusters.
MIN_OCCURRENCES_PER_SENSE = 5


@dataclass
class Sense:
    id: str
    gloss: str
    examples: list[str] = field(default_factory=list)


@dataclass
class SenseInventory:
    """Per-word ordered sense lists; order defines sense indices 1..k."""

    words: dict[str, list[Sense]]

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def senses_of(self, word: str) -> list[Sense]:
        return self.words.get(word, [])

    def sense_count(self, word: str) -> int:
        return len(self.words.get(word, ()))

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for word, senses in self.words.items():
                record = {
                    "word": word,
                    "senses": [
                        {"id": s.id, "gloss": s.gloss, "examples": s.examples}
                        for s in senses
                    ],
                }
                fh.write(json.dumps(record) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SenseInventory":
        words: dict[str, list[Sense]] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            senses = [
                Sense(id=str(s["id"]), gloss=s.get("gloss", ""),
                      examples=list(s.get("examples", [])))
                for s in record["senses"]
            ]
            if not senses:
                raise ValueError(f"word {record['word']!r} lists no senses")
            seen = {s.id for s in senses}
            if len(seen) != len(senses):
                raise ValueError(f"duplicate sense ids for {record['word']!r}")
            words[record["word"]] = senses
        return cls(words=words)


def context_vector(window: ContextWindow, tfidf: TfIdfModel,
                   vectors: np.ndarray) -> np.ndarray | None:
    """Weighted context average: sum of (in-window tf * idf) * v over the
    context, divided by the nominal full width 2N even when truncated.

    Returns None when the window has no usable context.
    """
    if not window.context:
        return None
    counts: dict[int, int] = {}
    for token in window.context:
        counts[token] = counts.get(token, 0) + 1
    out = np.zeros(vectors.shape[1], dtype=np.float64)
    for token in window.context:
        out += (counts[token] * tfidf.idf_of(token)) * vectors[token]
    return out / (2.0 * tfidf.window)


@njit(cache=True)
def _batch_context_vectors(ids, positions, window, idf, vectors):  # pragma: no cover
    n = positions.shape[0]
    length = ids.shape[0]
    dim = vectors.shape[1]
    out = np.zeros((n, dim), dtype=np.float64)
    usable = np.zeros(n, dtype=np.bool_)
    for i in range(n):
        pos = positions[i]
        lo = pos - window
        if lo < 0:
            lo = 0
        hi = pos + window + 1
        if hi > length:
            hi = length
        has_context = False
        for j in range(lo, hi):
            if j == pos:
                continue
            token = ids[j]
            tf = 0
            for j2 in range(lo, hi):
                if j2 != pos and ids[j2] == token:
                    tf += 1
            weight = tf * idf[token]
            for d in range(dim):
                out[i, d] += weight * vectors[token, d]
            has_context = True
        if has_context:
            for d in range(dim):
                out[i, d] /= 2.0 * window
            usable[i] = True
    return out, usable


def batch_context_vectors(ids: np.ndarray, positions: np.ndarray, tfidf: TfIdfModel,
                          vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Context vectors for many occurrences of one word, plus a usable mask."""
    return _batch_context_vectors(
        np.ascontiguousarray(ids, dtype=np.int32),
        np.ascontiguousarray(positions, dtype=np.int64),
        tfidf.window, tfidf.idf, vectors,
    )


@dataclass
class SphericalKMeansResult:
    centroids: np.ndarray
    assignments: np.ndarray  # -1 marks dropped zero-norm points
    objective_history: list[float]
    empty_clusters: list[int]
    dropped_points: int
    converged: bool


def spherical_kmeans(points: np.ndarray, k: int, seed: int,
                     max_iter: int = 100, tol: float = 1e-6) -> SphericalKMeansResult:
    """Cosine k-means on unit-normalized points.

    Centroids are normalized means of their members; the summed-cosine
    objective never decreases across iterations. Initialization is greedy
    farthest-point from a seeded random start. Zero-norm points are dropped
    (assignment -1); with fewer points than k, surplus centroids duplicate
    the farthest points and may exit empty.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValueError("points must be 2-D")
    norms = np.linalg.norm(pts, axis=1)
    keep = norms > 0
    dropped = int((~keep).sum())
    unit = pts[keep] / norms[keep, None]
    n = unit.shape[0]
    if n == 0:
        raise ValueError("no nonzero points to cluster")

    rng = np.random.default_rng(seed)
    centroids = np.empty((k, unit.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = unit[first]
    best_sim = unit @ centroids[0]
    for c in range(1, k):
        nxt = int(np.argmin(best_sim))
        centroids[c] = unit[nxt]
        best_sim = np.maximum(best_sim, unit @ centroids[c])

    history: list[float] = []
    assign = np.zeros(n, dtype=np.int64)
    converged = False
    prev_obj: float | None = None
    for _ in range(max_iter):
        sims = unit @ centroids.T
        assign = np.argmax(sims, axis=1)
        objective = float(sims[np.arange(n), assign].sum())
        history.append(objective)
        if prev_obj is not None and objective - prev_obj <= tol * max(1.0, abs(prev_obj)):
            converged = True
            break
        prev_obj = objective
        fits = sims[np.arange(n), assign]
        reseed_order = np.argsort(fits, kind="stable")
        reseed_at = 0
        for c in range(k):
            members = assign == c
            if members.any():
                total = unit[members].sum(axis=0)
                norm = np.linalg.norm(total)
                if norm > 0:
                    centroids[c] = total / norm
            elif reseed_at < n:
                centroids[c] = unit[reseed_order[reseed_at]]
                reseed_at += 1

    empty = [c for c in range(k) if not (assign == c).any()]
    assignments = np.full(len(pts), -1, dtype=np.int64)
    assignments[keep] = assign
    return SphericalKMeansResult(
        centroids=centroids, assignments=assignments, objective_history=history,
        empty_clusters=empty, dropped_points=dropped, converged=converged,
    )


def gloss_vector(sense: Sense, emb: EmbeddingTable) -> np.ndarray | None:
    """Unweighted average embedding of the gloss and example-sentence words.

    Returns None when no token is in the embedding vocabulary.
    """
    tokens = normalize_tokenize(sense.gloss)
    for example in sense.examples:
        tokens.extend(normalize_tokenize(example))
    rows = [emb.row(token, 0) for token in tokens if (token, 0) in emb]
    if not rows:
        return None
    return emb.vectors[rows].mean(axis=0)


def greedy_match(distances: np.ndarray) -> list[int]:
    """Repeatedly take the globally minimal unmatched entry of a square
    distance matrix; ties go to the smallest (row, column) pair. Returns
    the matched column per row."""
    work = np.array(distances, dtype=np.float64)
    if work.ndim != 2 or work.shape[0] != work.shape[1]:
        raise ValueError("distance matrix must be square")
    k = work.shape[0]
    mapping = [-1] * k
    for _ in range(k):
        flat = int(np.argmin(work))  # row-major argmin = lexicographic tie-break
        i, j = divmod(flat, k)
        mapping[i] = j
        work[i, :] = np.inf
        work[:, j] = np.inf
    return mapping


def match_clusters_to_senses(centroids: Sequence[np.ndarray] | np.ndarray,
                             glosses: Sequence[np.ndarray] | np.ndarray) -> list[int]:
    """Greedily pair cluster centroids with sense gloss vectors by global
    minimum Euclidean distance. Returns the sense position per cluster."""
    cents = np.asarray(centroids, dtype=np.float64)
    gl = np.asarray(glosses, dtype=np.float64)
    if len(cents) != len(gl):
        raise ValueError("centroid and gloss lists must have equal length")
    dist = np.linalg.norm(cents[:, None, :] - gl[None, :, :], axis=2)
    return greedy_match(dist)


@dataclass
class WordSenseClusters:
    word: str
    centroids: np.ndarray
    cluster_to_sense: list[int]  # 0-based sense positions
    empty_clusters: list[int]


@dataclass
class SenseClusterModel:
    words: dict[str, WordSenseClusters]


@dataclass
class TaggedCorpus:
    """Original tokens plus a 1-based sense tag per occurrence."""

    tokens: list[str]
    tags: np.ndarray

    def __len__(self) -> int:
        return len(self.tokens)

    def rendered(self) -> list[str]:
        return [make_key(token, int(tag)) for token, tag in zip(self.tokens, self.tags)]

    def save(self, path: str | Path) -> None:
        Path(path).write_text(" ".join(self.rendered()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "TaggedCorpus":
        from .embeddings import split_key

        tokens: list[str] = []
        tags: list[int] = []
        for token in Path(path).read_text(encoding="utf-8").split():
            word, sense = split_key(token)
            tokens.append(word)
            tags.append(sense)
        return cls(tokens=tokens, tags=np.asarray(tags, dtype=np.int16))


@dataclass
class RelabelResult:
    tagged: TaggedCorpus
    clusters: SenseClusterModel
    diagnostics: dict[str, int]
    flagged_words: dict[str, str]


def _word_seed(seed: int, word: str) -> int:
    return int(np.random.SeedSequence((seed, zlib.crc32(word.encode()))).generate_state(1)[0])


def relabel_corpus(tokens: Sequence[str], emb: EmbeddingTable, tfidf: TfIdfModel,
                   inventory: SenseInventory, seed: int) -> RelabelResult:
    """Tag every occurrence of an inventory word with a dictionary sense.

    Words with one sense, words rarer than 5 occurrences per sense, words
    with unmatchable glosses, and non-inventory words are tagged sense 1.
    The tfidf model must be indexed by the embedding table's row ids (the
    standard pipeline guarantees this: vocabulary id == table row).
    """
    tokens = list(tokens)
    tags = np.ones(len(tokens), dtype=np.int16)
    diagnostics = {
        "words_clustered": 0,
        "words_single_sense": 0,
        "words_too_rare": 0,
        "words_gloss_failed": 0,
        "zero_context_occurrences": 0,
        "oov_tokens": 0,
    }
    flagged: dict[str, str] = {}

    row_of: dict[str, int] = {}
    for row, (word, sense) in enumerate(emb.keys):
        if sense == 0:
            row_of[word] = row
    ids = np.empty(len(tokens), dtype=np.int32)
    in_vocab = np.zeros(len(tokens), dtype=bool)
    for i, token in enumerate(tokens):
        row = row_of.get(token)
        if row is None:
            diagnostics["oov_tokens"] += 1
            ids[i] = -1
        else:
            ids[i] = row
            in_vocab[i] = True
    # windows run over the in-vocabulary stream only
    stream = ids[in_vocab]
    stream_positions = np.flatnonzero(in_vocab)

    cluster_models: dict[str, WordSenseClusters] = {}
    for word in sorted(inventory.words):
        senses = inventory.senses_of(word)
        k = len(senses)
        if k == 1:
            diagnostics["words_single_sense"] += 1
            continue
        row = row_of.get(word)
        if row is None:
            flagged[word] = "not-in-embedding"
            continue
        occ_in_stream = np.flatnonzero(stream == row)
        if len(occ_in_stream) < MIN_OCCURRENCES_PER_SENSE * k:
            diagnostics["words_too_rare"] += 1
            flagged[word] = "too-rare"
            continue
        glosses = [gloss_vector(sense, emb) for sense in senses]
        if any(g is None for g in glosses):
            diagnostics["words_gloss_failed"] += 1
            flagged[word] = "gloss-unmatched"
            continue
        vecs, usable = batch_context_vectors(stream, occ_in_stream, tfidf, emb.vectors)
        diagnostics["zero_context_occurrences"] += int((~usable).sum())
        if int(usable.sum()) < k:
            diagnostics["words_too_rare"] += 1
            flagged[word] = "too-rare"
            continue
        result = spherical_kmeans(vecs[usable], k, seed=_word_seed(seed, word))
        mapping = match_clusters_to_senses(result.centroids, np.asarray(glosses))
        occ_tags = np.ones(len(occ_in_stream), dtype=np.int16)
        kept = result.assignments >= 0
        usable_idx = np.flatnonzero(usable)
        occ_tags[usable_idx[kept]] = [mapping[a] + 1 for a in result.assignments[kept]]
        tags[stream_positions[occ_in_stream]] = occ_tags
        cluster_models[word] = WordSenseClusters(
            word=word, centroids=result.centroids, cluster_to_sense=mapping,
            empty_clusters=result.empty_clusters,
        )
        diagnostics["words_clustered"] += 1

    return RelabelResult(
        tagged=TaggedCorpus(tokens=tokens, tags=tags),
        clusters=SenseClusterModel(words=cluster_models),
        diagnostics=diagnostics,
        flagged_words=flagged,
    )
