"""Skip-gram embeddings with negative sampling.

The trainer maximizes the sampled log-likelihood by stochastic gradient
ascent over (center, context) pairs. A numba kernel carries the per-pair
updates; `SkipgramModel.sgd_step` is the plain-numpy reference for the
same update, kept for gradient checks and small experiments. Single-
threaded runs with a fixed seed are bit-reproducible: the kernel draws
negatives from its own xorshift stream whose state persists across calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .corpus import Vocabulary
from .embeddings import EmbeddingTable

_U64 = np.uint64
_MASK64 = (1 << 64) - 1


def mix_seed(seed: int) -> int:
    """Spread a user seed into a nonzero 64-bit xorshift state (splitmix64)."""
    z = (seed + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return z or 1


@njit(cache=True)
def _rng_next(state):  # pragma: no cover - exercised through callers
    x = state[0]
    x ^= x << _U64(13)
    x ^= x >> _U64(7)
    x ^= x << _U64(17)
    state[0] = x
    return x


@njit(cache=True)
def _rng_uniform(state):  # pragma: no cover
    return float(_rng_next(state) >> _U64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _sample_cdf(cdf, state):  # pragma: no cover
    r = _rng_uniform(state)
    return int(np.searchsorted(cdf, r, side="right"))


@njit(cache=True)
def _sigmoid(x):  # pragma: no cover
    if x > 60.0:
        return 1.0
    if x < -60.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))


@njit(cache=True)
def _sgns_block(ids, start, stop, window, w_in, w_out, cdf, negatives,
                lr0, min_lr_frac, pairs_done, total_pairs, state):  # pragma: no cover
    length = ids.shape[0]
    dim = w_in.shape[1]
    acc = np.empty(dim, dtype=np.float64)
    done = pairs_done
    for pos in range(start, stop):
        center = ids[pos]
        lo = pos - window
        if lo < 0:
            lo = 0
        hi = pos + window + 1
        if hi > length:
            hi = length
        for j in range(lo, hi):
            if j == pos:
                continue
            frac = 1.0 - done / total_pairs
            if frac < min_lr_frac:
                frac = min_lr_frac
            lr = lr0 * frac
            target = ids[j]
            f = 0.0
            for d in range(dim):
                f += w_in[center, d] * w_out[target, d]
            g = (1.0 - _sigmoid(f)) * lr
            for d in range(dim):
                acc[d] = g * w_out[target, d]
                w_out[target, d] += g * w_in[center, d]
            for _ in range(negatives):
                noise = _sample_cdf(cdf, state)
                f = 0.0
                for d in range(dim):
                    f += w_in[center, d] * w_out[noise, d]
                g = -_sigmoid(f) * lr
                for d in range(dim):
                    acc[d] += g * w_out[noise, d]
                    w_out[noise, d] += g * w_in[center, d]
            for d in range(dim):
                w_in[center, d] += acc[d]
            done += 1
    return done


@dataclass
class TrainConfig:
    dim: int = 64
    window: int = 5
    negatives: int = 3
    epochs: int = 3
    learning_rate: float = 0.025
    min_lr_fraction: float = 1e-4
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 0:
            raise ValueError("invalid training configuration")


def unigram_cdf(counts: np.ndarray, power: float = 0.75) -> np.ndarray:
    """Cumulative distribution of counts**power, last entry pinned to 1."""
    weights = np.asarray(counts, dtype=np.float64) ** power
    total = weights.sum()
    if total <= 0:
        raise ValueError("empty sampling distribution")
    cdf = np.cumsum(weights / total)
    cdf[-1] = 1.0
    return cdf


def negative_sample(vocab: Vocabulary, rng: np.random.Generator, count: int) -> np.ndarray:
    """Draw `count` ids i.i.d. from the unigram distribution ** 0.75."""
    cdf = unigram_cdf(vocab.counts)
    return np.searchsorted(cdf, rng.random(count), side="right").astype(np.int64)


def pairs_per_epoch(corpus_length: int, window: int) -> int:
    """Exact (center, context) pair count, accounting for truncated edges."""
    positions = np.arange(corpus_length, dtype=np.int64)
    left = np.minimum(positions, window)
    right = np.minimum(corpus_length - 1 - positions, window)
    return int((left + right).sum())


class SkipgramModel:
    """Center/context parameter matrices plus the negative-sampling state."""

    def __init__(self, vocab_size: int, counts: np.ndarray, config: TrainConfig):
        rng = np.random.default_rng(config.seed)
        dim = config.dim
        self.config = config
        self.w_in = (rng.random((vocab_size, dim)) - 0.5) / dim
        self.w_out = np.zeros((vocab_size, dim), dtype=np.float64)
        self.cdf = unigram_cdf(counts)
        self.rng_state = np.array([mix_seed(config.seed)], dtype=np.uint64)
        self.pairs_done = 0

    @property
    def dim(self) -> int:
        return int(self.w_in.shape[1])

    def pair_loss(self, center: int, context: int, negatives: Sequence[int]) -> float:
        """Negative log-likelihood of one (center, context) pair."""
        v = self.w_in[center]
        loss = -_log_sigmoid(float(v @ self.w_out[context]))
        for noise in negatives:
            loss -= _log_sigmoid(-float(v @ self.w_out[noise]))
        return loss

    def sgd_step(self, center: int, context: int, negatives: Sequence[int], lr: float) -> float:
        """Apply one analytic-gradient ascent step; returns the pre-update loss.

        Mirrors the kernel's update order: context/noise rows update as soon
        as their score is taken; the center row update is applied last.
        """
        if lr < 0:
            raise ValueError("lr must be >= 0")
        v = self.w_in[center]
        loss = 0.0
        f = float(v @ self.w_out[context])
        loss -= _log_sigmoid(f)
        g = (1.0 - _sigmoid_np(f)) * lr
        acc = g * self.w_out[context].copy()
        self.w_out[context] += g * v
        for noise in negatives:
            f = float(v @ self.w_out[noise])
            loss -= _log_sigmoid(-f)
            g = -_sigmoid_np(f) * lr
            acc += g * self.w_out[noise]
            self.w_out[noise] += g * v
        self.w_in[center] += acc
        return loss

    def run_block(self, ids: np.ndarray, start: int, stop: int, total_pairs: int) -> int:
        """Train on center positions [start, stop); returns pairs processed."""
        done = _sgns_block(
            ids, start, stop, self.config.window, self.w_in, self.w_out,
            self.cdf, self.config.negatives, self.config.learning_rate,
            self.config.min_lr_fraction, self.pairs_done, float(max(total_pairs, 1)),
            self.rng_state,
        )
        processed = done - self.pairs_done
        self.pairs_done = done
        return processed


def _sigmoid_np(x: float) -> float:
    if x > 60.0:
        return 1.0
    if x < -60.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))


def _log_sigmoid(x: float) -> float:
    # log(1/(1+e^-x)) = -log1p(e^-x); stable on both tails
    if x < -60.0:
        return x
    return -math.log1p(math.exp(-x))


def resolve_corpus_ids(corpus: Sequence[str] | np.ndarray, vocab: Vocabulary) -> np.ndarray:
    if isinstance(corpus, np.ndarray):
        return np.ascontiguousarray(corpus.astype(np.int32))
    ids, _ = vocab.encode(corpus)
    return ids


def train_skipgram(corpus: Sequence[str] | np.ndarray, vocab: Vocabulary,
                   config: TrainConfig) -> EmbeddingTable:
    """Train single-sense embeddings; rows follow vocabulary id order.

    The returned table holds the center-role vectors under sense index 0;
    the context-role table stays internal to training.
    """
    ids = resolve_corpus_ids(corpus, vocab)
    if len(ids) == 0:
        raise ValueError("corpus resolves to zero in-vocabulary tokens")
    model = SkipgramModel(len(vocab), vocab.counts, config)
    total_pairs = config.epochs * pairs_per_epoch(len(ids), config.window)
    for _ in range(config.epochs):
        model.run_block(ids, 0, len(ids), total_pairs)
    if not np.isfinite(model.w_in).all() or not np.isfinite(model.w_out).all():
        raise FloatingPointError("non-finite parameter encountered during training")
    keys = [(word, 0) for word in vocab.tokens]
    return EmbeddingTable(keys=keys, vectors=model.w_in, role="center")
