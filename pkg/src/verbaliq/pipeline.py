"""File-level pipeline stages behind the service endpoints and CLI.

Every stage reads and writes the documented artifact formats and returns
a plain dict of counters suitable for a JSON response.
"""

from __future__ import annotations

import json
from pathlib import Path

from .classifier import ClassifierConfig, LinearModel, QuestionType, classify, train_ovr
from .corpus import Vocabulary, build_corpus, normalize_tokenize, window_tfidf
from .embeddings import EmbeddingTable
from .harness import (DEFAULT_TEMPLATES, REFERENCE_TYPE_COUNTS, bench,
                      generate_questions, save_answers, solve_questions)
from .relations import JointConfig, RelationModel, load_triples, train_joint
from .senses import SenseInventory, relabel_corpus
from .skipgram import TrainConfig, train_skipgram
from .solvers import SolverConfig, load_questions, save_questions
from .synth import plant_question_world

VOCAB_FILE = "vocab.tsv"
IDF_FILE = "idf.tsv"
CORPUS_FILE = "corpus.txt"
META_FILE = "meta.json"
TAGGED_FILE = "tagged.txt"
CLUSTERS_FILE = "sense_clusters.json"
EMBEDDING_FILE = "embeddings.txt"
RELATIONS_FILE = "relations.json"


def corpus_build(input_path: str, min_count: int, window: int, out_dir: str) -> dict:
    raw = Path(input_path).read_text(encoding="utf-8")
    result = build_corpus(raw, min_count=min_count, window=window)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.vocabulary.save(out / VOCAB_FILE)
    result.tfidf.save(out / IDF_FILE)
    tokens = result.vocabulary.tokens
    with open(out / CORPUS_FILE, "w", encoding="utf-8") as fh:
        fh.write(" ".join(tokens[i] for i in result.corpus_ids) + "\n")
    meta = {
        "window": window,
        "min_count": min_count,
        "vocab_size": len(result.vocabulary),
        "total_tokens": result.vocabulary.total_tokens,
        "kept_tokens": int(len(result.corpus_ids)),
        "dropped_tokens": result.dropped_tokens,
    }
    (out / META_FILE).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return {**meta, "out_dir": str(out)}


def train_sg(corpus_path: str, vocab_path: str, dim: int, window: int,
             negatives: int, epochs: int, seed: int, out_path: str,
             learning_rate: float = 0.025) -> dict:
    vocab = Vocabulary.load(vocab_path)
    tokens = normalize_tokenize(Path(corpus_path).read_text(encoding="utf-8"))
    config = TrainConfig(dim=dim, window=window, negatives=negatives,
                         epochs=epochs, learning_rate=learning_rate, seed=seed)
    table = train_skipgram(tokens, vocab, config)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    table.save(out_path)
    return {
        "entries": len(table),
        "dimension": table.dimension,
        "epochs": epochs,
        "out": str(out_path),
    }


def tag_senses(corpus_path: str, emb_path: str, dict_path: str, seed: int,
               out_dir: str, window: int = 5) -> dict:
    emb = EmbeddingTable.load(emb_path)
    inventory = SenseInventory.load(dict_path)
    tokens = normalize_tokenize(Path(corpus_path).read_text(encoding="utf-8"))

    row_of = {word: row for row, (word, sense) in enumerate(emb.keys) if sense == 0}
    stream = [row_of[t] for t in tokens if t in row_of]
    tfidf = window_tfidf(stream, len(emb), window)

    result = relabel_corpus(tokens, emb, tfidf, inventory, seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.tagged.save(out / TAGGED_FILE)
    clusters = {
        word: {
            "cluster_to_sense": [s + 1 for s in wc.cluster_to_sense],
            "empty_clusters": wc.empty_clusters,
            "centroids": [[float(x) for x in row] for row in wc.centroids],
        }
        for word, wc in result.clusters.words.items()
    }
    payload = {"clusters": clusters, "flagged_words": result.flagged_words,
               "diagnostics": result.diagnostics}
    (out / CLUSTERS_FILE).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return {
        "corpus_tokens": len(tokens),
        **result.diagnostics,
        "flagged_words": result.flagged_words,
        "out_dir": str(out),
    }


def train_rk(tagged_corpus_path: str, triples_path: str, gamma: float, alpha: float,
             epochs: int, seed: int, out_dir: str, dim: int = 64, window: int = 5,
             negatives: int = 3, learning_rate: float = 0.025,
             relation_learning_rate: float = 0.025) -> dict:
    tokens = Path(tagged_corpus_path).read_text(encoding="utf-8").split()
    triples = load_triples(triples_path)
    config = JointConfig(dim=dim, window=window, negatives=negatives, epochs=epochs,
                         learning_rate=learning_rate, gamma=gamma, alpha=alpha,
                         relation_learning_rate=relation_learning_rate, seed=seed)
    result = train_joint(tokens, None, triples, config)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result.embedding.save(out / EMBEDDING_FILE)
    result.relations.save(out / RELATIONS_FILE)
    return {
        "entries": len(result.embedding),
        "dimension": result.embedding.dimension,
        "relations": result.relations.names,
        "triples_used": len(triples) - result.rejected_triples,
        "rejected_triples": result.rejected_triples,
        "relation_steps": result.relation_steps,
        "out_dir": str(out),
    }


def train_classifier(questions_path: str, out_path: str, regularization: float = 1e-3,
                     epochs: int = 200, seed: int = 0) -> dict:
    questions = load_questions(questions_path)
    labeled = [(q.text, q.qtype) for q in questions if q.text and q.qtype]
    if not labeled:
        raise ValueError("no questions with both text and type for training")
    model = train_ovr(labeled, ClassifierConfig(regularization=regularization,
                                                epochs=epochs, seed=seed))
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    model.save(out_path)
    return {
        "examples": len(labeled),
        "train_accuracy": model.train_accuracy,
        "degenerate_categories": [c.value for c in model.degenerate],
        "out": str(out_path),
    }


def classify_text(model_path: str, question: str) -> dict:
    model = LinearModel.load(model_path)
    qtype, scores = classify(question, model)
    return {
        "type": qtype.value,
        "scores": {cat.value: score for cat, score in scores.items()},
    }


def _load_models(emb_path: str, relations_path: str | None, classifier_path: str | None):
    emb = EmbeddingTable.load(emb_path)
    relmodel = RelationModel.load(relations_path) if relations_path else None
    clf = LinearModel.load(classifier_path) if classifier_path else None
    return emb, relmodel, clf


def solve(emb_path: str, questions_path: str, out_path: str,
          relations_path: str | None = None, classifier_path: str | None = None,
          mode: int = 1, offset: str = "difference", seed: int = 0) -> dict:
    emb, relmodel, clf = _load_models(emb_path, relations_path, classifier_path)
    questions = load_questions(questions_path)
    config = SolverConfig(mode=mode, offset=offset)
    answers, counters = solve_questions(questions, emb, relmodel, clf, config, seed)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    save_answers(answers, out_path)
    return {
        "questions": len(questions),
        "fallbacks": counters.fallbacks,
        "skipped_candidates": counters.skipped_candidates,
        "classifier_failures": counters.classifier_failures,
        "out": str(out_path),
    }


def bench_run(emb_path: str, questions_path: str, report_path: str,
              relations_path: str | None = None, classifier_path: str | None = None,
              mode: int = 1, offset: str = "difference", seed: int = 0,
              baseline: str | None = None) -> dict:
    emb, relmodel, clf = _load_models(emb_path, relations_path, classifier_path)
    questions = load_questions(questions_path)
    config = SolverConfig(mode=mode, offset=offset)
    result = bench(questions, emb, relmodel, clf, config, seed=seed, baseline=baseline)
    Path(report_path).parent.mkdir(parents=True, exist_ok=True)
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"kind": "report", **result.report.to_dict()}) + "\n")
        if result.baseline is not None:
            fh.write(json.dumps({"kind": "baseline", **result.baseline.to_dict()}) + "\n")
        for answer in result.answers:
            fh.write(json.dumps({"kind": "answer", **answer.to_record()}) + "\n")
    return {
        "report": result.report.to_dict(),
        "baseline": result.baseline.to_dict() if result.baseline else None,
        "counters": {
            "fallbacks": result.counters.fallbacks,
            "skipped_candidates": result.counters.skipped_candidates,
            "classifier_failures": result.counters.classifier_failures,
        },
        "table": result.report.to_table(),
        "out": str(report_path),
    }


def generate(out_path: str, seed: int = 0, counts: dict[str, int] | None = None,
             triples_path: str | None = None, emb_path: str | None = None,
             vocab_path: str | None = None) -> dict:
    """Emit a question file with known gold answers.

    By default a self-contained planted world supplies the structure, with
    counts following the reference test-set proportions (232 total). Given
    a triple file, questions are generated from those triples instead, with
    distractor words drawn from the supplied vocabulary or embedding so the
    questions are answerable by that model.
    """
    if triples_path:
        triples = load_triples(triples_path)
        if emb_path:
            words = sorted({word for word, _ in EmbeddingTable.load(emb_path).keys})
        elif vocab_path:
            words = Vocabulary.load(vocab_path).tokens
        else:
            raise ValueError("generating from triples needs an emb or vocab for distractors")
    else:
        words, triples = plant_question_world(seed)
    if counts is None:
        want = dict(REFERENCE_TYPE_COUNTS)
    else:
        want = {QuestionType(name): n for name, n in counts.items()}
    questions = generate_questions(DEFAULT_TEMPLATES, words, triples, seed, want)
    Path(out_path).parent.mkdir(parents=True, exist_ok=True)
    save_questions(questions, out_path)
    return {
        "questions": len(questions),
        "per_type": {qt.value: n for qt, n in want.items()},
        "out": str(out_path),
    }
