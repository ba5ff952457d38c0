"""End-to-end evaluation: templated question generation, scoring, baselines.

The published verbal test sets are not redistributable, so the harness
generates typed questions with known gold answers from planted relational
structure (synonym/antonym triples and same-relation quadruples) and
scores any answer set against them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .classifier import LinearModel, QuestionType, classify, FeaturizeError
from .corpus import Vocabulary
from .embeddings import EmbeddingTable
from .relations import ANTONYM_RELATION, SYNONYM_RELATION, RelationModel, RelationTriple
from .solvers import DispatchResult, Question, SolverConfig, dispatch

# Test-set type mix used for proportioned synthetic sets.
REFERENCE_TYPE_COUNTS = {
    QuestionType.ANALOGY_I: 50,
    QuestionType.ANALOGY_II: 29,
    QuestionType.CLASSIFICATION: 53,
    QuestionType.SYNONYM: 51,
    QuestionType.ANTONYM: 49,
}

DEFAULT_TEMPLATES: dict[QuestionType, list[str]] = {
    QuestionType.ANALOGY_I: [
        "{a} is to {b} as {c} is to? {options}",
        "Complete the analogy: {a} relates to {b} the way {c} relates to which option? {options}",
    ],
    QuestionType.ANALOGY_II: [
        "Identify two words (one from each set of brackets) that form a connection"
        " (analogy) when paired with the words in capitals: {a} ({options1}), {c} ({options2}).",
        "Pick one word from each bracket so that {a} and {c} form matching pairs:"
        " {a} ({options1}), {c} ({options2}).",
    ],
    QuestionType.CLASSIFICATION: [
        "Which is the odd one out? {options}",
        "Find the word that does not belong with the others: {options}",
    ],
    QuestionType.SYNONYM: [
        "Which word is closest to {q}? {options}",
        "Choose the word whose meaning is closest to {q}: {options}",
    ],
    QuestionType.ANTONYM: [
        "Which word is most opposite to {q}? {options}",
        "Select the word most nearly opposite in meaning to {q}: {options}",
    ],
}

_ROMAN = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"]


def _render_options(words: Sequence[str]) -> str:
    return ", ".join(f"({_ROMAN[i]}) {w}" for i, w in enumerate(words))


class GenerationError(ValueError):
    """Planted structure cannot supply the requested question counts."""


@dataclass
class AnswerRecord:
    question_id: str
    answer: str | list[str] | None
    predicted_type: str | None = None
    fallback: bool = False

    def to_record(self) -> dict:
        return {
            "question_id": self.question_id,
            "answer": list(self.answer) if isinstance(self.answer, tuple) else self.answer,
            "predicted_type": self.predicted_type,
            "fallback": self.fallback,
        }

    @classmethod
    def from_record(cls, record: dict) -> "AnswerRecord":
        return cls(
            question_id=str(record["question_id"]),
            answer=record.get("answer"),
            predicted_type=record.get("predicted_type"),
            fallback=bool(record.get("fallback", False)),
        )


def load_answers(path: str | Path) -> list[AnswerRecord]:
    return [
        AnswerRecord.from_record(json.loads(line))
        for line in Path(path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


def save_answers(answers: Sequence[AnswerRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in answers:
            fh.write(json.dumps(record.to_record()) + "\n")


@dataclass
class EvalReport:
    per_type_correct: dict[str, float]
    per_type_counts: dict[str, int]
    total_correct: float
    total_count: int
    fallback_count: int = 0
    unanswered_count: int = 0
    unscored_count: int = 0
    classifier_accuracy: float | None = None

    @property
    def total_accuracy(self) -> float:
        return self.total_correct / self.total_count if self.total_count else 0.0

    @property
    def per_type_accuracy(self) -> dict[str, float]:
        return {
            name: (self.per_type_correct.get(name, 0) / count if count else 0.0)
            for name, count in self.per_type_counts.items()
        }

    def to_dict(self) -> dict:
        return {
            "per_type_accuracy": self.per_type_accuracy,
            "per_type_counts": self.per_type_counts,
            "per_type_correct": self.per_type_correct,
            "total_accuracy": self.total_accuracy,
            "total_correct": self.total_correct,
            "total_count": self.total_count,
            "fallback_count": self.fallback_count,
            "unanswered_count": self.unanswered_count,
            "unscored_count": self.unscored_count,
            "classifier_accuracy": self.classifier_accuracy,
        }

    def to_table(self) -> str:
        lines = [f"{'type':<16}{'count':>8}{'correct':>10}{'accuracy':>12}"]
        for qtype in QuestionType:
            name = qtype.value
            count = self.per_type_counts.get(name, 0)
            correct = self.per_type_correct.get(name, 0)
            acc = correct / count if count else 0.0
            lines.append(f"{name:<16}{count:>8}{correct:>10}{acc:>12.4f}")
        lines.append(f"{'total':<16}{self.total_count:>8}{self.total_correct:>10}{self.total_accuracy:>12.4f}")
        lines.append(f"fallback answers: {self.fallback_count}")
        lines.append(f"unanswered: {self.unanswered_count}")
        if self.classifier_accuracy is not None:
            lines.append(f"classifier accuracy: {self.classifier_accuracy:.4f}")
        return "\n".join(lines)


def _is_correct(question: Question, answer: str | list[str] | tuple | None) -> bool:
    if answer is None or question.answer is None:
        return False
    gold = question.answer
    if isinstance(gold, list):
        if not isinstance(answer, (list, tuple)) or len(answer) != len(gold):
            return False
        return all(a == g for a, g in zip(answer, gold))
    return answer == gold


def evaluate(questions: Sequence[Question], answers: Sequence[AnswerRecord]) -> EvalReport:
    """Exact-match accuracy per type and overall.

    Two-list analogy answers count only when both picks match. Questions
    with no answer record are counted wrong and reported as unanswered;
    questions lacking a gold answer are excluded and reported as unscored.
    """
    by_id = {a.question_id: a for a in answers}
    per_type_correct: dict[str, int] = {}
    per_type_counts: dict[str, int] = {}
    total_correct = 0
    total = 0
    fallbacks = 0
    unanswered = 0
    unscored = 0
    type_hits = 0
    type_total = 0
    for question in questions:
        if question.answer is None:
            unscored += 1
            continue
        total += 1
        record = by_id.get(question.id)
        name = question.qtype.value if question.qtype else "untyped"
        per_type_counts[name] = per_type_counts.get(name, 0) + 1
        if record is None or record.answer is None:
            unanswered += 1
            continue
        if record.fallback:
            fallbacks += 1
        if question.qtype is not None and record.predicted_type is not None:
            type_total += 1
            if record.predicted_type == question.qtype.value:
                type_hits += 1
        if _is_correct(question, record.answer):
            per_type_correct[name] = per_type_correct.get(name, 0) + 1
            total_correct += 1
    return EvalReport(
        per_type_correct=per_type_correct,
        per_type_counts=per_type_counts,
        total_correct=total_correct,
        total_count=total,
        fallback_count=fallbacks,
        unanswered_count=unanswered,
        unscored_count=unscored,
        classifier_accuracy=(type_hits / type_total) if type_total else None,
    )


@dataclass
class SolveCounters:
    fallbacks: int = 0
    skipped_candidates: int = 0
    classifier_failures: int = 0


def solve_questions(questions: Sequence[Question], emb: EmbeddingTable,
                    relmodel: RelationModel | None,
                    classifier_model: LinearModel | None,
                    config: SolverConfig, seed: int = 0) -> tuple[list[AnswerRecord], SolveCounters]:
    """Answer every question, routing by predicted type when a classifier is
    given (falling back to the gold type for untexted questions)."""
    rng = np.random.default_rng(seed)
    counters = SolveCounters()
    answers: list[AnswerRecord] = []
    for question in questions:
        for pool in question.candidates:
            counters.skipped_candidates += sum(1 for w in pool if w not in emb)
        predicted: QuestionType | None = None
        if classifier_model is not None and question.text:
            try:
                predicted, _ = classify(question.text, classifier_model)
            except FeaturizeError:
                counters.classifier_failures += 1
        if predicted is None:
            predicted = question.qtype
        if predicted is None:
            # no way to route: uniform random answer, flagged
            result = _random_answer(question, rng)
        else:
            result = dispatch(question, predicted, emb, relmodel, config, rng)
        if result.fallback:
            counters.fallbacks += 1
        answers.append(AnswerRecord(
            question_id=question.id,
            answer=list(result.answer) if isinstance(result.answer, tuple) else result.answer,
            predicted_type=predicted.value if predicted else None,
            fallback=result.fallback,
        ))
    return answers, counters


def _random_answer(question: Question, rng: np.random.Generator) -> DispatchResult:
    if question.is_pair:
        first = question.candidates[0][int(rng.integers(len(question.candidates[0])))]
        second = question.candidates[1][int(rng.integers(len(question.candidates[1])))]
        return DispatchResult(answer=(first, second), fallback=True)
    pool = question.candidates[0]
    return DispatchResult(answer=pool[int(rng.integers(len(pool)))], fallback=True)


def random_baseline(questions: Sequence[Question], trials: int = 5, seed: int = 0) -> EvalReport:
    """Uniform random guessing averaged over trials (pairs for two-list
    analogies). Counts are per single trial; correct counts are means."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    reports = []
    for _ in range(trials):
        answers = []
        for q in questions:
            result = _random_answer(q, rng)
            answer = list(result.answer) if isinstance(result.answer, tuple) else result.answer
            answers.append(AnswerRecord(question_id=q.id, answer=answer))
        reports.append(evaluate(questions, answers))
    per_type_counts = reports[0].per_type_counts
    mean_correct = {
        name: float(np.mean([r.per_type_correct.get(name, 0) for r in reports]))
        for name in per_type_counts
    }
    return EvalReport(
        per_type_correct=mean_correct,
        per_type_counts=per_type_counts,
        total_correct=float(np.mean([r.total_correct for r in reports])),
        total_count=reports[0].total_count,
        fallback_count=0,
        unscored_count=reports[0].unscored_count,
    )


# ---------------------------------------------------------------------------
# Question generation from planted structure


def _synonym_groups(triples: Sequence[RelationTriple]) -> list[list[str]]:
    parent: dict[str, str] = {}

    def find(w: str) -> str:
        parent.setdefault(w, w)
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    for t in triples:
        if t.relation == SYNONYM_RELATION:
            a, b = t.head[0], t.tail[0]
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
    groups: dict[str, list[str]] = {}
    for w in parent:
        groups.setdefault(find(w), []).append(w)
    return [sorted(g) for g in sorted(groups.values(), key=lambda g: g[0])]


def generate_questions(templates: dict[QuestionType, list[str]] | None,
                       vocab: Vocabulary | Sequence[str],
                       triples: Sequence[RelationTriple],
                       seed: int,
                       counts: dict[QuestionType, int]) -> list[Question]:
    """Emit typed questions with gold answers from planted structure.

    Analogies pair two distinct same-relation triples; classification uses
    synonym cliques of size >= 4 plus an outlier; synonym/antonym questions
    come straight from the triple set. Distractors are sampled from words
    unrelated to the gold answer. Raises GenerationError with the per-type
    shortfall when the planted structure cannot supply the request.
    """
    templates = templates or DEFAULT_TEMPLATES
    words = list(vocab.tokens) if isinstance(vocab, Vocabulary) else list(vocab)
    rng = np.random.default_rng(seed)

    related: dict[str, set[str]] = {}
    for t in triples:
        related.setdefault(t.head[0], set()).add(t.tail[0])
        related.setdefault(t.tail[0], set()).add(t.head[0])

    by_relation: dict[str, list[RelationTriple]] = {}
    for t in triples:
        by_relation.setdefault(t.relation, []).append(t)
    groups = _synonym_groups(triples)
    cliques = [g for g in groups if len(g) >= 4]
    group_of: dict[str, list[str]] = {}
    for g in groups:
        for w in g:
            group_of[w] = g
    grouped_words = set(group_of)

    def distractors(avoid: set[str], n: int) -> list[str]:
        pool = [w for w in words if w not in avoid]
        if len(pool) < n:
            raise GenerationError(f"vocabulary too small for {n} distractors")
        picks = rng.choice(len(pool), size=n, replace=False)
        return [pool[int(i)] for i in picks]

    def ambiguity_set(gold: str) -> set[str]:
        # equally-valid answers: the gold's synonym group and triple partners
        return {gold} | set(group_of.get(gold, ())) | related.get(gold, set())

    def analogy_pairs() -> list[tuple[RelationTriple, RelationTriple]]:
        pairs = []
        for relation in sorted(by_relation):
            triples_r = by_relation[relation]
            for i, first in enumerate(triples_r):
                for second in triples_r[i + 1:]:
                    w = {first.head[0], first.tail[0], second.head[0], second.tail[0]}
                    if len(w) == 4:
                        pairs.append((first, second))
        return pairs

    loose_words = [w for w in words if w not in grouped_words]
    classification_supply: list[tuple[list[str], list[str] | None]] = []
    for clique in cliques:
        for other in groups:
            if other is not clique:
                classification_supply.append((clique, other))
        if loose_words:
            classification_supply.append((clique, None))

    shortfall: dict[str, int] = {}
    supply: dict[QuestionType, list] = {
        QuestionType.ANALOGY_I: analogy_pairs(),
        QuestionType.ANALOGY_II: analogy_pairs(),
        QuestionType.CLASSIFICATION: classification_supply,
        QuestionType.SYNONYM: list(by_relation.get(SYNONYM_RELATION, [])),
        QuestionType.ANTONYM: list(by_relation.get(ANTONYM_RELATION, [])),
    }
    for qtype, needed in counts.items():
        available = len(supply[qtype])
        if needed > available:
            shortfall[qtype.value] = needed - available
    if shortfall:
        raise GenerationError(f"insufficient planted structure: {shortfall}")

    questions: list[Question] = []
    serial = 0
    for qtype in QuestionType:
        needed = counts.get(qtype, 0)
        if needed == 0:
            continue
        base = supply[qtype]
        picks = rng.choice(len(base), size=needed, replace=False)
        for pick in picks:
            serial += 1
            template = templates[qtype][serial % len(templates[qtype])]
            qid = f"q{serial:04d}"
            if qtype is QuestionType.ANALOGY_I:
                first, second = base[int(pick)]
                a, b = first.head[0], first.tail[0]
                c, gold = second.head[0], second.tail[0]
                cands = [gold] + distractors({a, b, c} | related.get(c, set()) | ambiguity_set(gold), 4)
                rng.shuffle(cands)
                questions.append(Question(
                    id=qid, qtype=qtype, stem=[a, b, c], candidates=[cands], answer=gold,
                    text=template.format(a=a.upper(), b=b.upper(), c=c.upper(),
                                         options=_render_options(cands)),
                ))
            elif qtype is QuestionType.ANALOGY_II:
                first, second = base[int(pick)]
                a, b = first.head[0], first.tail[0]
                c, d = second.head[0], second.tail[0]
                avoid = {a, c} | related.get(a, set()) | related.get(c, set()) \
                    | ambiguity_set(b) | ambiguity_set(d)
                list1 = [b] + distractors(avoid, 2)
                list2 = [d] + distractors(avoid | set(list1), 2)
                rng.shuffle(list1)
                rng.shuffle(list2)
                questions.append(Question(
                    id=qid, qtype=qtype, stem=[a, c], candidates=[list1, list2],
                    answer=[b, d],
                    text=template.format(a=a.upper(), c=c.upper(),
                                         options1=", ".join(list1),
                                         options2=", ".join(list2)),
                ))
            elif qtype is QuestionType.CLASSIFICATION:
                clique, other = base[int(pick)]
                members = [clique[int(i)] for i in rng.choice(len(clique), size=4, replace=False)]
                if other is not None:
                    outlier = other[int(rng.integers(len(other)))]
                else:
                    outlier = distractors(set(clique) | related.get(clique[0], set()) | grouped_words, 1)[0]
                cands = members + [outlier]
                rng.shuffle(cands)
                questions.append(Question(
                    id=qid, qtype=qtype, stem=[], candidates=[cands], answer=outlier,
                    text=template.format(options=_render_options(cands)),
                ))
            else:
                triple = base[int(pick)]
                query, gold = triple.head[0], triple.tail[0]
                cands = [gold] + distractors({query} | related.get(query, set()) | ambiguity_set(gold), 4)
                rng.shuffle(cands)
                questions.append(Question(
                    id=qid, qtype=qtype, stem=[query], candidates=[cands], answer=gold,
                    text=template.format(q=query.upper(), options=_render_options(cands)),
                ))
    return questions


# ---------------------------------------------------------------------------
# One-shot benchmark


@dataclass
class BenchResult:
    report: EvalReport
    answers: list[AnswerRecord]
    counters: SolveCounters
    baseline: EvalReport | None = None


def bench(questions: Sequence[Question], emb: EmbeddingTable,
          relmodel: RelationModel | None, classifier_model: LinearModel | None,
          config: SolverConfig, seed: int = 0,
          baseline: str | None = None, baseline_trials: int = 5) -> BenchResult:
    """Solve then evaluate; identical to running the two stages separately."""
    answers, counters = solve_questions(questions, emb, relmodel, classifier_model, config, seed)
    report = evaluate(questions, answers)
    baseline_report = None
    if baseline == "rg":
        baseline_report = random_baseline(questions, trials=baseline_trials, seed=seed)
    return BenchResult(report=report, answers=answers, counters=counters,
                       baseline=baseline_report)
