"""Pydantic request/response models for the verbaliq service."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class CorpusBuildRequest(BaseModel):
    input: str = Field(..., description="Path to a UTF-8 plain-text corpus")
    min_count: int = 1
    window: int = 5
    out: str = Field(..., description="Output directory for vocab/idf/corpus files")


class CorpusBuildResponse(BaseModel):
    window: int
    min_count: int
    vocab_size: int
    total_tokens: int
    kept_tokens: int
    dropped_tokens: int
    out_dir: str


class TrainSkipgramRequest(BaseModel):
    corpus: str
    vocab: str
    dim: int = 64
    window: int = 5
    negatives: int = 3
    epochs: int = 3
    learning_rate: float = 0.025
    seed: int = 0
    out: str


class TrainSkipgramResponse(BaseModel):
    entries: int
    dimension: int
    epochs: int
    out: str


class TagSensesRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    corpus: str
    emb: str
    dictionary: str = Field(..., alias="dict", description="Sense inventory file (JSON Lines)")
    seed: int = 0
    window: int = 5
    out: str


class TagSensesResponse(BaseModel):
    corpus_tokens: int
    words_clustered: int
    words_single_sense: int
    words_too_rare: int
    words_gloss_failed: int
    zero_context_occurrences: int
    oov_tokens: int
    flagged_words: dict[str, str]
    out_dir: str


class TrainJointRequest(BaseModel):
    tagged_corpus: str
    triples: str
    gamma: float = 1.0
    alpha: float = 0.01
    epochs: int = 3
    seed: int = 0
    dim: int = 64
    window: int = 5
    negatives: int = 3
    learning_rate: float = 0.025
    relation_learning_rate: float = 0.025
    out: str


class TrainJointResponse(BaseModel):
    entries: int
    dimension: int
    relations: list[str]
    triples_used: int
    rejected_triples: int
    relation_steps: int
    out_dir: str


class TrainClassifierRequest(BaseModel):
    questions: str
    regularization: float = 1e-3
    epochs: int = 200
    seed: int = 0
    out: str


class TrainClassifierResponse(BaseModel):
    examples: int
    train_accuracy: float
    degenerate_categories: list[str]
    out: str


class ClassifyRequest(BaseModel):
    model: str
    question: str


class ClassifyResponse(BaseModel):
    type: str
    scores: dict[str, float]


class SolveRequest(BaseModel):
    emb: str
    questions: str
    relations: str | None = None
    classifier: str | None = None
    mode: int = 1
    offset: str = "difference"
    seed: int = 0
    out: str


class SolveResponse(BaseModel):
    questions: int
    fallbacks: int
    skipped_candidates: int
    classifier_failures: int
    out: str


class EvalReportModel(BaseModel):
    per_type_accuracy: dict[str, float]
    per_type_counts: dict[str, int]
    per_type_correct: dict[str, float]
    total_accuracy: float
    total_correct: float
    total_count: int
    fallback_count: int
    unanswered_count: int
    unscored_count: int
    classifier_accuracy: float | None = None


class BenchRequest(BaseModel):
    emb: str
    questions: str
    relations: str | None = None
    classifier: str | None = None
    mode: int = 1
    offset: str = "difference"
    seed: int = 0
    baseline: str | None = Field(None, description="'rg' adds the random-guess baseline")
    report: str


class BenchCounters(BaseModel):
    fallbacks: int
    skipped_candidates: int
    classifier_failures: int


class BenchResponse(BaseModel):
    report: EvalReportModel
    baseline: EvalReportModel | None = None
    counters: BenchCounters
    table: str
    out: str


class GenerateQuestionsRequest(BaseModel):
    out: str
    seed: int = 0
    counts: dict[str, int] | None = Field(
        None, description="Per-type question counts; defaults to the reference proportions"
    )
    triples: str | None = Field(
        None, description="Generate from this triple file instead of a planted world"
    )
    emb: str | None = Field(
        None, description="Embedding whose words supply distractors (with triples)"
    )
    vocab: str | None = Field(
        None, description="Vocabulary file supplying distractors (with triples)"
    )


class GenerateQuestionsResponse(BaseModel):
    questions: int
    per_type: dict[str, int]
    out: str


class HealthResponse(BaseModel):
    status: str
    version: str
