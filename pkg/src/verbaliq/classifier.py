"""Question-type identification: TF-IDF features + one-vs-rest linear SVMs.

Each verbal question is treated as a short document. Five binary
hinge-loss classifiers (one per question type) are trained by stochastic
subgradient descent with L2 regularization; prediction takes the argmax
decision score, ties broken by the fixed category order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import normalize_tokenize


class QuestionType(Enum):
    ANALOGY_I = "analogy-i"
    ANALOGY_II = "analogy-ii"
    CLASSIFICATION = "classification"
    SYNONYM = "synonym"
    ANTONYM = "antonym"


# Fixed tie-break order for argmax decisions.
CATEGORY_ORDER = [
    QuestionType.ANALOGY_I,
    QuestionType.ANALOGY_II,
    QuestionType.CLASSIFICATION,
    QuestionType.SYNONYM,
    QuestionType.ANTONYM,
]

UNSEEN_IDF = 1.0


class FeaturizeError(ValueError):
    """Question text normalizes to zero tokens."""


def question_idf(texts: Sequence[str]) -> dict[str, float]:
    """Smoothed idf over questions-as-documents: log((1+n)/(1+df)) + 1."""
    df: dict[str, int] = {}
    for text in texts:
        for token in set(normalize_tokenize(text)):
            df[token] = df.get(token, 0) + 1
    n = len(texts)
    return {token: math.log((1 + n) / (1 + count)) + 1.0 for token, count in df.items()}


def featurize_question(text: str, idf_table: dict[str, float]) -> dict[str, float]:
    """tf (in-question count) * idf per token; unseen tokens get idf 1."""
    tokens = normalize_tokenize(text)
    if not tokens:
        raise FeaturizeError(f"question text has no usable tokens: {text!r}")
    counts: dict[str, int] = {}
    for token in tokens:
        counts[token] = counts.get(token, 0) + 1
    return {token: count * idf_table.get(token, UNSEEN_IDF) for token, count in counts.items()}


@dataclass
class ClassifierConfig:
    regularization: float = 1e-3
    epochs: int = 200
    seed: int = 0


@dataclass
class LinearModel:
    """Per-category weight vector + bias over the training idf feature space."""

    idf: dict[str, float]
    weights: dict[QuestionType, dict[str, float]]
    bias: dict[QuestionType, float]
    degenerate: list[QuestionType] = field(default_factory=list)
    train_accuracy: float | None = None

    def decision(self, features: dict[str, float], category: QuestionType) -> float:
        w = self.weights[category]
        return sum(w.get(term, 0.0) * value for term, value in features.items()) + self.bias[category]

    def scores(self, features: dict[str, float]) -> dict[QuestionType, float]:
        return {cat: self.decision(features, cat) for cat in CATEGORY_ORDER}

    def save(self, path: str | Path) -> None:
        payload = {
            "idf": self.idf,
            "weights": {cat.value: self.weights[cat] for cat in CATEGORY_ORDER},
            "bias": {cat.value: self.bias[cat] for cat in CATEGORY_ORDER},
            "degenerate": [cat.value for cat in self.degenerate],
            "train_accuracy": self.train_accuracy,
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LinearModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            idf=payload["idf"],
            weights={QuestionType(v): dict(payload["weights"][v]) for v in payload["weights"]},
            bias={QuestionType(v): payload["bias"][v] for v in payload["bias"]},
            degenerate=[QuestionType(v) for v in payload.get("degenerate", [])],
            train_accuracy=payload.get("train_accuracy"),
        )


def train_ovr(labeled: Sequence[tuple[str, QuestionType]],
              hyper: ClassifierConfig | None = None) -> LinearModel:
    """Train five one-vs-rest hinge classifiers by seeded subgradient descent.

    Categories with no training examples degenerate to an always-negative
    score and are flagged on the model. Per-category training consumes an
    independent derived seed, so retraining one category cannot perturb
    the others.
    """
    if not labeled:
        raise ValueError("no training examples")
    hyper = hyper or ClassifierConfig()
    idf = question_idf([text for text, _ in labeled])
    terms = sorted(idf)
    term_index = {term: i for i, term in enumerate(terms)}

    features = np.zeros((len(labeled), len(terms)), dtype=np.float64)
    for i, (text, _) in enumerate(labeled):
        for term, value in featurize_question(text, idf).items():
            features[i, term_index[term]] = value
    labels = [category for _, category in labeled]

    weights: dict[QuestionType, dict[str, float]] = {}
    bias: dict[QuestionType, float] = {}
    degenerate: list[QuestionType] = []
    for order, category in enumerate(CATEGORY_ORDER):
        y = np.array([1.0 if label is category else -1.0 for label in labels])
        if not (y > 0).any():
            weights[category] = {}
            bias[category] = -1.0
            degenerate.append(category)
            continue
        w, b = _train_binary_hinge(features, y, hyper, seed_offset=order)
        weights[category] = {terms[j]: float(w[j]) for j in np.flatnonzero(w)}
        bias[category] = float(b)

    model = LinearModel(idf=idf, weights=weights, bias=bias, degenerate=degenerate)
    correct = sum(
        1 for (text, label) in labeled if classify(text, model)[0] is label
    )
    model.train_accuracy = correct / len(labeled)
    return model


def _train_binary_hinge(features: np.ndarray, y: np.ndarray,
                        hyper: ClassifierConfig, seed_offset: int) -> tuple[np.ndarray, float]:
    n, dim = features.shape
    rng = np.random.default_rng(np.random.SeedSequence((hyper.seed, seed_offset)))
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    lam = hyper.regularization
    t = 0
    for _ in range(hyper.epochs):
        for i in rng.permutation(n):
            t += 1
            lr = 1.0 / (1.0 + lam * t)
            margin = y[i] * (features[i] @ w + b)
            w *= 1.0 - lr * lam
            if margin < 1.0:
                w += lr * y[i] * features[i]
                b += lr * y[i]
    return w, b


def classify(text: str, model: LinearModel) -> tuple[QuestionType, dict[QuestionType, float]]:
    """Argmax of the five decision scores; ties go to the earlier category."""
    features = featurize_question(text, model.idf)
    scores = model.scores(features)
    best = CATEGORY_ORDER[0]
    for category in CATEGORY_ORDER[1:]:
        if scores[category] > scores[best]:
            best = category
    return best, scores
