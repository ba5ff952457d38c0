"""FastAPI service wrapping the pipeline stages.

Every endpoint operates on filesystem paths shared with the client and
returns stage counters. Pipeline errors surface as HTTP 400 with the
original message.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__, pipeline
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="verbaliq", version=__version__)

    def run(stage, *args, **kwargs):
        try:
            return stage(*args, **kwargs)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/corpus/build", response_model=schemas.CorpusBuildResponse)
    def corpus_build(request: schemas.CorpusBuildRequest):
        return run(pipeline.corpus_build, request.input, request.min_count,
                   request.window, request.out)

    @app.post("/train/skipgram", response_model=schemas.TrainSkipgramResponse)
    def train_skipgram(request: schemas.TrainSkipgramRequest):
        return run(pipeline.train_sg, request.corpus, request.vocab, request.dim,
                   request.window, request.negatives, request.epochs, request.seed,
                   request.out, request.learning_rate)

    @app.post("/senses/tag", response_model=schemas.TagSensesResponse)
    def tag_senses(request: schemas.TagSensesRequest):
        return run(pipeline.tag_senses, request.corpus, request.emb, request.dictionary,
                   request.seed, request.out, request.window)

    @app.post("/train/joint", response_model=schemas.TrainJointResponse)
    def train_joint(request: schemas.TrainJointRequest):
        return run(pipeline.train_rk, request.tagged_corpus, request.triples,
                   request.gamma, request.alpha, request.epochs, request.seed,
                   request.out, request.dim, request.window, request.negatives,
                   request.learning_rate, request.relation_learning_rate)

    @app.post("/classifier/train", response_model=schemas.TrainClassifierResponse)
    def train_classifier(request: schemas.TrainClassifierRequest):
        return run(pipeline.train_classifier, request.questions, request.out,
                   request.regularization, request.epochs, request.seed)

    @app.post("/classifier/classify", response_model=schemas.ClassifyResponse)
    def classify(request: schemas.ClassifyRequest):
        return run(pipeline.classify_text, request.model, request.question)

    @app.post("/solve", response_model=schemas.SolveResponse)
    def solve(request: schemas.SolveRequest):
        return run(pipeline.solve, request.emb, request.questions, request.out,
                   request.relations, request.classifier, request.mode,
                   request.offset, request.seed)

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(request: schemas.BenchRequest):
        return run(pipeline.bench_run, request.emb, request.questions, request.report,
                   request.relations, request.classifier, request.mode,
                   request.offset, request.seed, request.baseline)

    @app.post("/questions/generate", response_model=schemas.GenerateQuestionsResponse)
    def generate_questions(request: schemas.GenerateQuestionsRequest):
        return run(pipeline.generate, request.out, request.seed, request.counts,
                   request.triples, request.emb, request.vocab)

    return app


app = create_app()
