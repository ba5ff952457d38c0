"""Geometric solvers for the five verbal question types.

All solvers enumerate every sense combination exhaustively, so the answer
is the true optimum of each objective over the candidate lists. Ties are
broken by candidate-list order. Solvers are pure functions of the models;
only the dispatch fallback consumes randomness.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import QuestionType
from .embeddings import EmbeddingTable
from .relations import ANTONYM_RELATION, SYNONYM_RELATION, RelationModel

MAX_MEAN_VECTORS = 10**6
_MEAN_CHUNK = 4096


class UnanswerableError(Exception):
    """The question cannot be answered by the routed solver."""


@dataclass
class Question:
    """Structured verbal question; `candidates` holds one list, or two for
    the pick-one-from-each-bracket analogy type."""

    id: str
    qtype: QuestionType | None
    stem: list[str]
    candidates: list[list[str]]
    answer: str | list[str] | None = None
    text: str | None = None

    @property
    def is_pair(self) -> bool:
        return len(self.candidates) == 2

    def to_record(self) -> dict:
        record: dict = {"id": self.id}
        if self.qtype is not None:
            record["type"] = self.qtype.value
        record["stem"] = self.stem
        record["candidates"] = self.candidates if self.is_pair else self.candidates[0]
        if self.answer is not None:
            record["answer"] = self.answer
        if self.text is not None:
            record["text"] = self.text
        return record

    @classmethod
    def from_record(cls, record: dict) -> "Question":
        raw = record["candidates"]
        if raw and isinstance(raw[0], list):
            candidates = [list(c) for c in raw]
        else:
            candidates = [list(raw)]
        if not candidates or any(len(c) == 0 for c in candidates):
            raise ValueError(f"question {record.get('id')!r} has an empty candidate list")
        qtype = QuestionType(record["type"]) if record.get("type") else None
        return cls(
            id=str(record["id"]),
            qtype=qtype,
            stem=list(record.get("stem", [])),
            candidates=candidates,
            answer=record.get("answer"),
            text=record.get("text"),
        )


def load_questions(path: str | Path) -> list[Question]:
    questions = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            questions.append(Question.from_record(json.loads(line)))
    return questions


def save_questions(questions: Sequence[Question], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for question in questions:
            fh.write(json.dumps(question.to_record()) + "\n")


@dataclass
class SolverConfig:
    mode: int = 1              # 1: nearest in embedding space, 2: relation offset
    offset: str = "difference"  # or "absolute": elementwise |.| before the norm

    def __post_init__(self) -> None:
        if self.mode not in (1, 2):
            raise ValueError("mode must be 1 or 2")
        if self.offset not in ("difference", "absolute"):
            raise ValueError("offset must be 'difference' or 'absolute'")


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    return np.where(norms > 0, matrix / np.maximum(norms, 1e-300), 0.0)


def _stem_vectors(emb: EmbeddingTable, word: str) -> np.ndarray:
    vectors = emb.sense_vectors(word)
    if len(vectors) == 0:
        raise UnanswerableError(f"stem word {word!r} missing from embedding")
    return vectors


def solve_analogy1(a: str, b: str, c: str, candidates: Sequence[str],
                   emb: EmbeddingTable) -> str:
    """Maximize cos(v_b - v_a + v_c, v_candidate) over all sense combinations."""
    va, vb, vc = _stem_vectors(emb, a), _stem_vectors(emb, b), _stem_vectors(emb, c)
    queries = np.array([
        bb - aa + cc
        for aa, bb, cc in itertools.product(va, vb, vc)
    ])
    unit_queries = _unit_rows(queries)
    best_word = None
    best_score = -np.inf
    for word in candidates:
        if word not in emb:
            continue
        unit_cands = _unit_rows(emb.sense_vectors(word))
        score = float((unit_queries @ unit_cands.T).max())
        if score > best_score:
            best_score = score
            best_word = word
    if best_word is None:
        raise UnanswerableError("no candidate is present in the embedding")
    return best_word


def solve_analogy2(a: str, c: str, list1: Sequence[str], list2: Sequence[str],
                   emb: EmbeddingTable) -> tuple[str, str]:
    """Jointly maximize cos(v_b' - v_a + v_c, v_d') over both candidate lists."""
    va, vc = _stem_vectors(emb, a), _stem_vectors(emb, c)
    offsets = np.array([cc - aa for aa, cc in itertools.product(va, vc)])
    best_pair = None
    best_score = -np.inf
    d_units = {}
    for word_d in list2:
        if word_d in emb:
            d_units[word_d] = _unit_rows(emb.sense_vectors(word_d))
    for word_b in list1:
        if word_b not in emb:
            continue
        vb = emb.sense_vectors(word_b)
        queries = _unit_rows(np.array([bb + off for bb in vb for off in offsets]))
        for word_d in list2:
            units = d_units.get(word_d)
            if units is None:
                continue
            score = float((queries @ units.T).max())
            if score > best_score:
                best_score = score
                best_pair = (word_b, word_d)
    if best_pair is None:
        raise UnanswerableError("no candidate pair is present in the embedding")
    return best_pair


def solve_classification(candidates: Sequence[str], emb: EmbeddingTable,
                         max_means: int = MAX_MEAN_VECTORS) -> str:
    """Odd-one-out: the candidate whose closest distance to any
    sense-combination mean vector is largest.

    Mean vectors average one sense vector per candidate over every sense
    combination; the means include the candidate being scored.
    """
    resolved = [w for w in candidates if w in emb]
    if len(resolved) < 3:
        raise UnanswerableError("classification needs at least 3 resolvable candidates")
    sense_mats = [emb.sense_vectors(w) for w in resolved]
    sense_counts = [m.shape[0] for m in sense_mats]
    total_means = 1
    for count in sense_counts:
        total_means *= count
        if total_means > max_means:
            raise ValueError(
                f"sense-combination count exceeds {max_means}; reduce sense counts"
            )
    dim = emb.dimension
    n = len(resolved)

    best_min = np.full(n, np.inf)
    # mixed-radix enumeration of sense choices, chunked to bound memory
    radices = np.array(sense_counts, dtype=np.int64)
    for start in range(0, total_means, _MEAN_CHUNK):
        stop = min(start + _MEAN_CHUNK, total_means)
        combo = np.arange(start, stop, dtype=np.int64)
        means = np.zeros((stop - start, dim), dtype=np.float64)
        rem = combo.copy()
        for j in range(n - 1, -1, -1):
            choice = rem % radices[j]
            rem //= radices[j]
            means += sense_mats[j][choice]
        means /= n
        for j in range(n):
            d = np.linalg.norm(sense_mats[j][:, None, :] - means[None, :, :], axis=2)
            best_min[j] = min(best_min[j], float(d.min()))

    best_word = None
    best_score = -np.inf
    for j, word in enumerate(resolved):
        if best_min[j] > best_score:
            best_score = best_min[j]
            best_word = word
    return best_word


def _offset_scores(query_vecs: np.ndarray, cand_vecs: np.ndarray,
                   relation: np.ndarray | None, offset: str) -> float:
    """Min over sense pairs of || offset(v_cand, v_query) - r ||."""
    diff = cand_vecs[:, None, :] - query_vecs[None, :, :]
    if offset == "absolute":
        diff = np.abs(diff)
    if relation is not None:
        diff = diff - relation
    return float(np.linalg.norm(diff, axis=2).min())


def _solve_by_relation(query: str, candidates: Sequence[str], emb: EmbeddingTable,
                       relmodel: RelationModel | None, config: SolverConfig,
                       relation_name: str) -> str:
    vq = _stem_vectors(emb, query)
    if config.mode == 2:
        if relmodel is None or relation_name not in relmodel:
            raise ValueError(
                f"mode 2 needs a trained {relation_name!r} relation vector; use mode 1"
            )
        relation = relmodel.vector(relation_name)
    else:
        relation = None
    best_word = None
    best_score = np.inf
    for word in candidates:
        if word not in emb:
            continue
        score = _offset_scores(vq, emb.sense_vectors(word), relation, config.offset)
        if score < best_score:
            best_score = score
            best_word = word
    if best_word is None:
        raise UnanswerableError("no candidate is present in the embedding")
    return best_word


def solve_synonym(query: str, candidates: Sequence[str], emb: EmbeddingTable,
                  relmodel: RelationModel | None = None,
                  config: SolverConfig | None = None) -> str:
    """Mode 1: nearest candidate sense to any query sense. Mode 2: offset
    closest to the synonym relation vector."""
    return _solve_by_relation(query, candidates, emb, relmodel,
                              config or SolverConfig(), SYNONYM_RELATION)


def solve_antonym(query: str, candidates: Sequence[str], emb: EmbeddingTable,
                  relmodel: RelationModel | None = None,
                  config: SolverConfig | None = None) -> str:
    """Same structure as the synonym solver with the antonym relation;
    mode 1 works because antonym pairs share co-occurrence neighborhoods."""
    return _solve_by_relation(query, candidates, emb, relmodel,
                              config or SolverConfig(), ANTONYM_RELATION)


@dataclass
class DispatchResult:
    answer: str | tuple[str, str]
    fallback: bool = False


def dispatch(question: Question, predicted_type: QuestionType,
             emb: EmbeddingTable, relmodel: RelationModel | None,
             config: SolverConfig, rng: np.random.Generator) -> DispatchResult:
    """Route a question to the solver for its predicted type.

    A solver that cannot consume the question (wrong structure for the
    predicted type, or stem words missing from the embedding) triggers a
    uniform random fallback over the question's own candidate lists.
    """
    try:
        answer = _route(question, predicted_type, emb, relmodel, config)
        return DispatchResult(answer=answer, fallback=False)
    except UnanswerableError:
        if question.is_pair:
            first = question.candidates[0][int(rng.integers(len(question.candidates[0])))]
            second = question.candidates[1][int(rng.integers(len(question.candidates[1])))]
            return DispatchResult(answer=(first, second), fallback=True)
        pool = question.candidates[0]
        return DispatchResult(answer=pool[int(rng.integers(len(pool)))], fallback=True)


def _route(question: Question, predicted_type: QuestionType, emb: EmbeddingTable,
           relmodel: RelationModel | None, config: SolverConfig) -> str | tuple[str, str]:
    if predicted_type is QuestionType.ANALOGY_I:
        if len(question.stem) != 3 or question.is_pair:
            raise UnanswerableError("not shaped like an analogy-completion question")
        a, b, c = question.stem
        return solve_analogy1(a, b, c, question.candidates[0], emb)
    if predicted_type is QuestionType.ANALOGY_II:
        if len(question.stem) != 2 or not question.is_pair:
            raise UnanswerableError("not shaped like a two-list analogy question")
        a, c = question.stem
        return solve_analogy2(a, c, question.candidates[0], question.candidates[1], emb)
    if predicted_type is QuestionType.CLASSIFICATION:
        if question.is_pair:
            raise UnanswerableError("two candidate lists cannot be classified")
        return solve_classification(question.candidates[0], emb)
    if predicted_type in (QuestionType.SYNONYM, QuestionType.ANTONYM):
        if len(question.stem) != 1 or question.is_pair:
            raise UnanswerableError("not shaped like a query-word question")
        solver = solve_synonym if predicted_type is QuestionType.SYNONYM else solve_antonym
        return solver(question.stem[0], question.candidates[0], emb, relmodel, config)
    raise UnanswerableError(f"unknown question type {predicted_type!r}")
