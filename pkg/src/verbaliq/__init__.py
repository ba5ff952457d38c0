"""verbaliq: multi-sense word/relation embeddings and verbal IQ solvers."""

__version__ = "0.1.0"

from .classifier import QuestionType, classify, train_ovr
from .corpus import Vocabulary, build_vocabulary, iter_windows, normalize_tokenize, window_tfidf
from .embeddings import EmbeddingTable
from .harness import EvalReport, bench, evaluate, generate_questions, random_baseline
from .relations import RelationModel, RelationTriple, relation_vector, train_joint
from .senses import SenseInventory, relabel_corpus, spherical_kmeans
from .skipgram import TrainConfig, negative_sample, train_skipgram
from .solvers import (Question, SolverConfig, dispatch, solve_analogy1, solve_analogy2,
                      solve_antonym, solve_classification, solve_synonym)

__all__ = [
    "EmbeddingTable", "EvalReport", "Question", "QuestionType", "RelationModel",
    "RelationTriple", "SenseInventory", "SolverConfig", "TrainConfig", "Vocabulary",
    "bench", "build_vocabulary", "classify", "dispatch", "evaluate",
    "generate_questions", "iter_windows", "negative_sample", "normalize_tokenize",
    "random_baseline", "relabel_corpus", "relation_vector", "solve_analogy1",
    "solve_analogy2", "solve_antonym", "solve_classification", "solve_synonym",
    "spherical_kmeans", "train_joint", "train_ovr", "train_skipgram", "window_tfidf",
]
