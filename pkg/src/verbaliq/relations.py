"""Joint training of word-sense embeddings and translation-style relation vectors.

Relational knowledge triples (head, relation, tail) over word-sense pairs
are scored by the margin hinge [gamma + d(h+r, t) - d(h'+r, t')]_+ with
Euclidean d; the hinge energy is weighted by alpha and traded off against
the skip-gram likelihood of the sense-tagged corpus. Relation vectors are
reparameterized componentwise as 2*sigmoid(x)-1, so they stay inside
(-1, 1) no matter how far training pushes the latent x.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .corpus import Vocabulary, build_vocabulary
from .embeddings import EmbeddingTable, split_key
from .skipgram import SkipgramModel, TrainConfig, pairs_per_epoch

SYNONYM_RELATION = "synonym"
ANTONYM_RELATION = "antonym"

WordSense = tuple[str, int]


@dataclass(frozen=True)
class RelationTriple:
    head: WordSense
    relation: str
    tail: WordSense

    def __post_init__(self) -> None:
        if self.head == self.tail:
            raise ValueError(f"degenerate triple: head equals tail {self.head}")


def load_triples(path: str | Path) -> list[RelationTriple]:
    """Tab-separated: head_word, head_sense, relation, tail_word, tail_sense."""
    triples = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        head_word, head_sense, relation, tail_word, tail_sense = line.split("\t")
        triples.append(RelationTriple(
            head=(head_word, int(head_sense)),
            relation=relation,
            tail=(tail_word, int(tail_sense)),
        ))
    return triples


def save_triples(triples: Iterable[RelationTriple], path: str | Path) -> None:
    lines = [
        f"{t.head[0]}\t{t.head[1]}\t{t.relation}\t{t.tail[0]}\t{t.tail[1]}"
        for t in triples
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


_RELATION_BOUND = float(np.nextafter(1.0, 0.0))


def relation_vector(x: np.ndarray) -> np.ndarray:
    """Componentwise 2*sigmoid(x) - 1, strictly inside (-1, 1).

    The sigmoid saturates to exactly 1.0 in float64 for x above ~37, so the
    result is clamped to the largest representable value below 1 to keep
    the open-interval guarantee at machine precision.
    """
    clipped = np.clip(np.asarray(x, dtype=np.float64), -50.0, 50.0)
    raw = 2.0 / (1.0 + np.exp(-clipped)) - 1.0
    return np.clip(raw, -_RELATION_BOUND, _RELATION_BOUND)


@dataclass
class RelationModel:
    """Latent vectors x per relation; bounded vectors r derived on demand."""

    names: list[str]
    x: np.ndarray

    def __post_init__(self) -> None:
        self._row = {name: i for i, name in enumerate(self.names)}

    def __contains__(self, name: str) -> bool:
        return name in self._row

    def latent(self, name: str) -> np.ndarray:
        return self.x[self._row[name]]

    def vector(self, name: str) -> np.ndarray:
        return relation_vector(self.x[self._row[name]])

    @property
    def dimension(self) -> int:
        return int(self.x.shape[1])

    def save(self, path: str | Path) -> None:
        payload = {
            "dimension": self.dimension,
            "relations": {name: [float(v) for v in self.latent(name)] for name in self.names},
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RelationModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        names = list(payload["relations"])
        dim = int(payload["dimension"])
        x = np.zeros((len(names), dim), dtype=np.float64)
        for i, name in enumerate(names):
            x[i] = payload["relations"][name]
        return cls(names=names, x=x)


class SenseKeySpace:
    """Valid (word, sense) pairs; sampling is uniform over words, then
    uniform over that word's senses."""

    def __init__(self, senses_by_word: dict[str, list[int]]):
        if not senses_by_word:
            raise ValueError("empty key space")
        self.words = sorted(senses_by_word)
        self.senses_by_word = {w: sorted(s) for w, s in senses_by_word.items()}

    @classmethod
    def from_tagged_tokens(cls, tokens: Iterable[str]) -> "SenseKeySpace":
        senses: dict[str, set[int]] = {}
        for token in tokens:
            word, sense = split_key(token)
            senses.setdefault(word, set()).add(sense)
        return cls({w: sorted(s) for w, s in senses.items()})

    def __contains__(self, key: WordSense) -> bool:
        return key[1] in self.senses_by_word.get(key[0], ())

    def random_pair(self, rng: np.random.Generator) -> WordSense:
        word = self.words[int(rng.integers(len(self.words)))]
        senses = self.senses_by_word[word]
        return word, senses[int(rng.integers(len(senses)))]


def corrupt_triplet(triple: RelationTriple, keyspace: SenseKeySpace,
                    rng: np.random.Generator,
                    positives: frozenset[RelationTriple] | set[RelationTriple] = frozenset(),
                    max_resample: int = 1000) -> RelationTriple:
    """Replace head (p=1/2) or tail by a random word-sense pair, resampling
    while the corrupted triple is a known positive.
    """
    if len(keyspace.words) < 2:
        raise ValueError("key space must contain at least 2 words")
    corrupted = None
    for _ in range(max_resample):
        replace_head = rng.random() < 0.5
        candidate = keyspace.random_pair(rng)
        if replace_head:
            if candidate == triple.tail or candidate == triple.head:
                continue
            corrupted = RelationTriple(head=candidate, relation=triple.relation, tail=triple.tail)
        else:
            if candidate == triple.head or candidate == triple.tail:
                continue
            corrupted = RelationTriple(head=triple.head, relation=triple.relation, tail=candidate)
        if corrupted not in positives:
            return corrupted
    if corrupted is None:
        raise ValueError("could not corrupt triple: key space too small")
    return corrupted  # saturated positive set; accept the last draw


def hinge_energy_terms(vectors: np.ndarray, x: np.ndarray,
                       h_idx: np.ndarray, r_idx: np.ndarray, t_idx: np.ndarray,
                       hn_idx: np.ndarray, tn_idx: np.ndarray,
                       gamma: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-term hinge values and the unit difference vectors behind them."""
    r = relation_vector(x[r_idx])
    pos_diff = vectors[h_idx] + r - vectors[t_idx]
    neg_diff = vectors[hn_idx] + r - vectors[tn_idx]
    d_pos = np.linalg.norm(pos_diff, axis=1)
    d_neg = np.linalg.norm(neg_diff, axis=1)
    z = gamma + d_pos - d_neg
    u_pos = np.where(d_pos[:, None] > 0, pos_diff / np.maximum(d_pos, 1e-300)[:, None], 0.0)
    u_neg = np.where(d_neg[:, None] > 0, neg_diff / np.maximum(d_neg, 1e-300)[:, None], 0.0)
    return z, u_pos, u_neg, r


def energy_and_gradients(vectors: np.ndarray, x: np.ndarray,
                         h_idx: np.ndarray, r_idx: np.ndarray, t_idx: np.ndarray,
                         hn_idx: np.ndarray, tn_idx: np.ndarray,
                         gamma: float) -> tuple[float, np.ndarray, np.ndarray]:
    """Hinge energy over the given (positive, corrupted) index pairs and its
    dense gradients w.r.t. the embedding matrix and the latent relation x.

    The subgradient at the hinge kink (z == 0) is zero: only strictly
    violated margins contribute.
    """
    z, u_pos, u_neg, r = hinge_energy_terms(vectors, x, h_idx, r_idx, t_idx, hn_idx, tn_idx, gamma)
    active = z > 0
    energy = float(z[active].sum())
    grad_vec = np.zeros_like(vectors)
    grad_x = np.zeros_like(x)
    if active.any():
        up = u_pos[active]
        un = u_neg[active]
        np.add.at(grad_vec, h_idx[active], up)
        np.add.at(grad_vec, t_idx[active], -up)
        np.add.at(grad_vec, hn_idx[active], -un)
        np.add.at(grad_vec, tn_idx[active], un)
        # dr/dx = (1 - r^2) / 2 through the sigmoid reparameterization
        r_grad = (up - un) * (1.0 - r[active] ** 2) / 2.0
        np.add.at(grad_x, r_idx[active], r_grad)
    return energy, grad_vec, grad_x


def relational_energy(triples: Sequence[RelationTriple], emb: EmbeddingTable,
                      relmodel: RelationModel, gamma: float,
                      sampler: Callable[[RelationTriple], Sequence[RelationTriple]]) -> float:
    """Total margin energy of a triple set against sampler-provided corruptions."""
    total = 0.0
    for triple in triples:
        h = emb.vector(*triple.head)
        t = emb.vector(*triple.tail)
        r = relmodel.vector(triple.relation)
        d_pos = float(np.linalg.norm(h + r - t))
        for corrupted in sampler(triple):
            hn = emb.vector(*corrupted.head)
            tn = emb.vector(*corrupted.tail)
            d_neg = float(np.linalg.norm(hn + r - tn))
            total += max(0.0, gamma + d_pos - d_neg)
    return total


@dataclass
class JointConfig:
    dim: int = 64
    window: int = 5
    negatives: int = 3
    epochs: int = 3
    learning_rate: float = 0.025
    gamma: float = 1.0
    alpha: float = 0.01
    corrupt_samples: int = 1
    relation_batch: int = 64
    sg_pairs_per_relation_batch: int = 1024
    relation_learning_rate: float = 0.025
    seed: int = 0

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")

    def sg_config(self) -> TrainConfig:
        return TrainConfig(dim=self.dim, window=self.window, negatives=self.negatives,
                           epochs=self.epochs, learning_rate=self.learning_rate,
                           seed=self.seed)


@dataclass
class JointTrainResult:
    embedding: EmbeddingTable
    relations: RelationModel
    rejected_triples: int
    relation_steps: int
    final_batch_energy: float


def train_joint(tagged_corpus: Sequence[str], vocab: Vocabulary | None,
                triples: Sequence[RelationTriple], config: JointConfig) -> JointTrainResult:
    """Alternating optimization: skip-gram ascent over the sense-tagged
    corpus, interleaved with hinge-energy descent over triple minibatches.

    With alpha = 0 the relation steps vanish and the run is bit-identical
    to plain skip-gram on the tagged corpus under the same seed. The
    (word, sense) key space is exactly the tagged corpus vocabulary;
    triples referencing keys outside it are rejected up front and counted,
    and corruption draws from the same key space.
    """
    tokens = list(tagged_corpus)
    if not tokens:
        raise ValueError("empty tagged corpus")
    if vocab is None:
        vocab = build_vocabulary(tokens, min_count=1)
    ids, _ = vocab.encode(tokens)
    if len(ids) == 0:
        raise ValueError("tagged corpus resolves to zero in-vocabulary tokens")

    keys = [split_key(token) for token in vocab.tokens]
    row_of = {key: row for row, key in enumerate(keys)}

    senses_by_word: dict[str, set[int]] = {}
    for word, sense in keys:
        senses_by_word.setdefault(word, set()).add(sense)
    keyspace = SenseKeySpace({w: sorted(s) for w, s in senses_by_word.items()})

    valid: list[RelationTriple] = []
    rejected = 0
    for triple in triples:
        if triple.head in row_of and triple.tail in row_of:
            valid.append(triple)
        else:
            rejected += 1
    positives = frozenset(valid)
    relation_names = sorted({t.relation for t in valid})

    model = SkipgramModel(len(vocab), vocab.counts, config.sg_config())
    x = np.zeros((len(relation_names), config.dim), dtype=np.float64)
    rel_row = {name: i for i, name in enumerate(relation_names)}
    rng_rel = np.random.default_rng(np.random.SeedSequence((config.seed, 0x524B)))

    h_rows = np.array([row_of[t.head] for t in valid], dtype=np.int64)
    t_rows = np.array([row_of[t.tail] for t in valid], dtype=np.int64)
    r_rows = np.array([rel_row[t.relation] for t in valid], dtype=np.int64)

    total_pairs = config.epochs * pairs_per_epoch(len(ids), config.window)
    block = max(1, config.sg_pairs_per_relation_batch // (2 * config.window))
    do_relations = config.alpha > 0 and len(valid) > 0
    relation_steps = 0
    batch_energy = 0.0
    for _ in range(config.epochs):
        pos = 0
        while pos < len(ids):
            stop = min(pos + block, len(ids))
            model.run_block(ids, pos, stop, total_pairs)
            pos = stop
            if do_relations:
                batch_energy = _relation_minibatch_step(
                    model.w_in, x, valid, h_rows, r_rows, t_rows, keyspace,
                    positives, row_of, config, rng_rel,
                )
                relation_steps += 1

    if not np.isfinite(model.w_in).all() or not np.isfinite(x).all():
        raise FloatingPointError("non-finite parameter encountered during joint training")

    embedding = EmbeddingTable(keys=keys, vectors=model.w_in, role="center")
    relations = RelationModel(names=relation_names, x=x)
    return JointTrainResult(
        embedding=embedding, relations=relations, rejected_triples=rejected,
        relation_steps=relation_steps, final_batch_energy=batch_energy,
    )


def _relation_minibatch_step(vectors: np.ndarray, x: np.ndarray,
                             valid: list[RelationTriple],
                             h_rows: np.ndarray, r_rows: np.ndarray, t_rows: np.ndarray,
                             keyspace: SenseKeySpace,
                             positives: frozenset[RelationTriple],
                             row_of: dict[WordSense, int],
                             config: JointConfig,
                             rng: np.random.Generator) -> float:
    picks = rng.integers(len(valid), size=config.relation_batch)
    h_list, r_list, t_list, hn_list, tn_list = [], [], [], [], []
    for pick in picks:
        triple = valid[pick]
        for _ in range(config.corrupt_samples):
            corrupted = corrupt_triplet(triple, keyspace, rng, positives)
            h_list.append(h_rows[pick])
            r_list.append(r_rows[pick])
            t_list.append(t_rows[pick])
            hn_list.append(row_of[corrupted.head])
            tn_list.append(row_of[corrupted.tail])
    energy, grad_vec, grad_x = energy_and_gradients(
        vectors, x,
        np.asarray(h_list), np.asarray(r_list), np.asarray(t_list),
        np.asarray(hn_list), np.asarray(tn_list), config.gamma,
    )
    step = config.relation_learning_rate * config.alpha
    vectors -= step * grad_vec
    x -= step * grad_x
    return energy
