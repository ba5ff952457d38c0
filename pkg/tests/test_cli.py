import json

import pytest

from verbaliq.cli import main
from verbaliq.harness import load_answers
from verbaliq.synth import make_topic_world, plant_pseudoword


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    data = plant_pseudoword(make_topic_world(4, 8), n_background_tokens=6000,
                            occurrences_per_sense=30, seed=2)
    (root / "corpus.txt").write_text(" ".join(data.tokens), encoding="utf-8")
    data.inventory.save(root / "dict.jsonl")
    return root


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def test_end_to_end_pipeline(workspace, capsys):
    code, out = run(capsys, "corpus", "build", "--input", str(workspace / "corpus.txt"),
                    "--min-count", "1", "--window", "3", "--out", str(workspace / "build"))
    assert code == 0
    assert json.loads(out)["vocab_size"] > 0

    code, out = run(capsys, "train-sg",
                    "--corpus", str(workspace / "build" / "corpus.txt"),
                    "--vocab", str(workspace / "build" / "vocab.tsv"),
                    "--dim", "16", "--window", "3", "--negatives", "2",
                    "--epochs", "1", "--seed", "3", "--out", str(workspace / "emb.txt"))
    assert code == 0
    assert json.loads(out)["dimension"] == 16

    code, out = run(capsys, "tag-senses",
                    "--corpus", str(workspace / "build" / "corpus.txt"),
                    "--emb", str(workspace / "emb.txt"),
                    "--dict", str(workspace / "dict.jsonl"),
                    "--seed", "3", "--window", "3", "--out", str(workspace / "tagged"))
    assert code == 0
    assert json.loads(out)["words_clustered"] == 1

    code, out = run(capsys, "generate-questions",
                    "--out", str(workspace / "questions.jsonl"), "--seed", "1",
                    "--counts", json.dumps({"synonym": 6, "antonym": 6,
                                            "classification": 6, "analogy-i": 6,
                                            "analogy-ii": 6}))
    assert code == 0
    assert json.loads(out)["questions"] == 30

    code, out = run(capsys, "train-classifier",
                    "--questions", str(workspace / "questions.jsonl"),
                    "--out", str(workspace / "clf.json"))
    assert code == 0
    assert json.loads(out)["train_accuracy"] >= 0.9

    code, out = run(capsys, "classify", "--model", str(workspace / "clf.json"),
                    "--question", "Which word is most opposite to LOUD? (i) quiet, (ii) big")
    assert code == 0
    assert json.loads(out)["type"] == "antonym"

    code, out = run(capsys, "solve",
                    "--emb", str(workspace / "emb.txt"),
                    "--questions", str(workspace / "questions.jsonl"),
                    "--mode", "1", "--seed", "4",
                    "--out", str(workspace / "answers.jsonl"))
    assert code == 0
    assert json.loads(out)["questions"] == 30
    assert len(load_answers(workspace / "answers.jsonl")) == 30

    code, out = run(capsys, "bench",
                    "--emb", str(workspace / "emb.txt"),
                    "--questions", str(workspace / "questions.jsonl"),
                    "--baseline", "rg", "--seed", "4",
                    "--report", str(workspace / "report.jsonl"))
    assert code == 0
    # response JSON first, then the human-readable table
    assert "total" in out
    assert (workspace / "report.jsonl").exists()


def test_generate_from_triples_uses_embedding_vocabulary(workspace, capsys):
    from verbaliq.relations import save_triples
    from verbaliq.solvers import load_questions
    from verbaliq.synth import plant_relation_world

    world = plant_relation_world(seed=4, n_topics=6, words_per_topic=8,
                                 n_tokens=12_000, n_synonym=5, n_antonym=5)
    (workspace / "world.txt").write_text(" ".join(world.tagged_tokens), encoding="utf-8")
    save_triples(world.triples, workspace / "triples.tsv")
    code, _ = run(capsys, "train-rk", "--tagged-corpus", str(workspace / "world.txt"),
                  "--triples", str(workspace / "triples.tsv"), "--epochs", "1",
                  "--dim", "8", "--window", "2", "--seed", "5",
                  "--out", str(workspace / "joint"))
    assert code == 0
    code, out = run(capsys, "generate-questions",
                    "--triples", str(workspace / "triples.tsv"),
                    "--emb", str(workspace / "joint" / "embeddings.txt"),
                    "--counts", json.dumps({"synonym": 5, "antonym": 5}),
                    "--out", str(workspace / "eval_questions.jsonl"), "--seed", "2")
    assert code == 0
    questions = load_questions(workspace / "eval_questions.jsonl")
    world_words = set(world.words)
    for q in questions:
        assert set(q.candidates[0]) <= world_words


def test_failure_exits_nonzero(workspace, capsys):
    with pytest.raises(SystemExit):
        main(["train-sg", "--corpus", "/nonexistent", "--vocab", "/nonexistent",
              "--out", str(workspace / "nope.txt")])
