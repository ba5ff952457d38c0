"""Command-line client for the verbaliq service.

Each subcommand builds the corresponding service request and posts it.
Without --server the request runs against an in-process app instance, so
the CLI works standalone; with --server it targets a running deployment.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys

import httpx


def _post(route: str, payload: dict, server: str | None) -> dict:
    if server:
        response = httpx.post(server.rstrip("/") + route, json=payload, timeout=None)
    else:
        from .service.app import app

        async def call() -> httpx.Response:
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://verbaliq") as client:
                return await client.post(route, json=payload, timeout=None)

        response = asyncio.run(call())
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise SystemExit(f"error ({response.status_code}): {detail}")
    return response.json()


def _emit(result: dict) -> None:
    table = result.pop("table", None)
    print(json.dumps(result, indent=2))
    if table:
        print(table)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="verbaliq")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    sub = parser.add_subparsers(dest="command", required=True)

    corpus = sub.add_parser("corpus", help="corpus utilities")
    corpus_sub = corpus.add_subparsers(dest="corpus_command", required=True)
    build = corpus_sub.add_parser("build", help="normalize text, build vocab and TF-IDF")
    build.add_argument("--input", required=True)
    build.add_argument("--min-count", type=int, default=1)
    build.add_argument("--window", type=int, default=5)
    build.add_argument("--out", required=True)

    train_sg = sub.add_parser("train-sg", help="train single-sense skip-gram embeddings")
    train_sg.add_argument("--corpus", required=True)
    train_sg.add_argument("--vocab", required=True)
    train_sg.add_argument("--dim", type=int, default=64)
    train_sg.add_argument("--window", type=int, default=5)
    train_sg.add_argument("--negatives", type=int, default=3)
    train_sg.add_argument("--epochs", type=int, default=3)
    train_sg.add_argument("--lr", type=float, default=0.025)
    train_sg.add_argument("--seed", type=int, default=0)
    train_sg.add_argument("--out", required=True)

    tag = sub.add_parser("tag-senses", help="cluster contexts and sense-tag the corpus")
    tag.add_argument("--corpus", required=True)
    tag.add_argument("--emb", required=True)
    tag.add_argument("--dict", required=True)
    tag.add_argument("--seed", type=int, default=0)
    tag.add_argument("--window", type=int, default=5)
    tag.add_argument("--out", required=True)

    train_rk = sub.add_parser("train-rk", help="jointly train sense and relation embeddings")
    train_rk.add_argument("--tagged-corpus", required=True)
    train_rk.add_argument("--triples", required=True)
    train_rk.add_argument("--gamma", type=float, default=1.0)
    train_rk.add_argument("--alpha", type=float, default=0.01)
    train_rk.add_argument("--epochs", type=int, default=3)
    train_rk.add_argument("--seed", type=int, default=0)
    train_rk.add_argument("--dim", type=int, default=64)
    train_rk.add_argument("--window", type=int, default=5)
    train_rk.add_argument("--negatives", type=int, default=3)
    train_rk.add_argument("--lr", type=float, default=0.025)
    train_rk.add_argument("--relation-lr", type=float, default=0.025)
    train_rk.add_argument("--out", required=True)

    train_clf = sub.add_parser("train-classifier", help="train the question-type classifier")
    train_clf.add_argument("--questions", required=True)
    train_clf.add_argument("--regularization", type=float, default=1e-3)
    train_clf.add_argument("--epochs", type=int, default=200)
    train_clf.add_argument("--seed", type=int, default=0)
    train_clf.add_argument("--out", required=True)

    classify = sub.add_parser("classify", help="predict a question's type")
    classify.add_argument("--model", required=True)
    classify.add_argument("--question", required=True)

    solve = sub.add_parser("solve", help="answer a question file")
    solve.add_argument("--emb", required=True)
    solve.add_argument("--relations", default=None)
    solve.add_argument("--classifier", default=None)
    solve.add_argument("--questions", required=True)
    solve.add_argument("--mode", type=int, default=1, choices=(1, 2))
    solve.add_argument("--offset", default="difference", choices=("difference", "absolute"))
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--out", required=True)

    bench = sub.add_parser("bench", help="solve, score, and report")
    bench.add_argument("--emb", required=True)
    bench.add_argument("--relations", default=None)
    bench.add_argument("--classifier", default=None)
    bench.add_argument("--questions", required=True)
    bench.add_argument("--mode", type=int, default=1, choices=(1, 2))
    bench.add_argument("--offset", default="difference", choices=("difference", "absolute"))
    bench.add_argument("--baseline", default=None, choices=("rg",))
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--report", required=True)

    generate = sub.add_parser("generate-questions", help="emit a question set with gold answers")
    generate.add_argument("--out", required=True)
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--counts", default=None,
                          help="JSON object of per-type counts, e.g. '{\"synonym\": 10}'")
    generate.add_argument("--triples", default=None,
                          help="generate from this triple file instead of a planted world")
    generate.add_argument("--emb", default=None,
                          help="embedding whose words supply distractors (with --triples)")
    generate.add_argument("--vocab", default=None,
                          help="vocabulary file supplying distractors (with --triples)")

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)

    args = parser.parse_args(argv)

    if args.command == "corpus" and args.corpus_command == "build":
        _emit(_post("/corpus/build", {
            "input": args.input, "min_count": args.min_count,
            "window": args.window, "out": args.out,
        }, args.server))
    elif args.command == "train-sg":
        _emit(_post("/train/skipgram", {
            "corpus": args.corpus, "vocab": args.vocab, "dim": args.dim,
            "window": args.window, "negatives": args.negatives,
            "epochs": args.epochs, "learning_rate": args.lr,
            "seed": args.seed, "out": args.out,
        }, args.server))
    elif args.command == "tag-senses":
        _emit(_post("/senses/tag", {
            "corpus": args.corpus, "emb": args.emb, "dict": args.dict,
            "seed": args.seed, "window": args.window, "out": args.out,
        }, args.server))
    elif args.command == "train-rk":
        _emit(_post("/train/joint", {
            "tagged_corpus": args.tagged_corpus, "triples": args.triples,
            "gamma": args.gamma, "alpha": args.alpha, "epochs": args.epochs,
            "seed": args.seed, "dim": args.dim, "window": args.window,
            "negatives": args.negatives, "learning_rate": args.lr,
            "relation_learning_rate": args.relation_lr, "out": args.out,
        }, args.server))
    elif args.command == "train-classifier":
        _emit(_post("/classifier/train", {
            "questions": args.questions, "regularization": args.regularization,
            "epochs": args.epochs, "seed": args.seed, "out": args.out,
        }, args.server))
    elif args.command == "classify":
        _emit(_post("/classifier/classify", {
            "model": args.model, "question": args.question,
        }, args.server))
    elif args.command == "solve":
        _emit(_post("/solve", {
            "emb": args.emb, "relations": args.relations,
            "classifier": args.classifier, "questions": args.questions,
            "mode": args.mode, "offset": args.offset, "seed": args.seed,
            "out": args.out,
        }, args.server))
    elif args.command == "bench":
        _emit(_post("/bench", {
            "emb": args.emb, "relations": args.relations,
            "classifier": args.classifier, "questions": args.questions,
            "mode": args.mode, "offset": args.offset, "seed": args.seed,
            "baseline": args.baseline, "report": args.report,
        }, args.server))
    elif args.command == "generate-questions":
        counts = json.loads(args.counts) if args.counts else None
        _emit(_post("/questions/generate", {
            "out": args.out, "seed": args.seed, "counts": counts,
            "triples": args.triples, "emb": args.emb, "vocab": args.vocab,
        }, args.server))
    elif args.command == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())
