"""HTTP service wrapping the pipeline and the benchmark harness.

One process owns the sandbox scheduling contract (timed runs serialized) and
the replay store, so concurrent clients stay consistent. Endpoints:

* ``GET  /health``
* ``POST /tasks/validate``        - Task invariant check
* ``POST /pipeline/run``          - one task through the pipeline
* ``POST /batch/run``             - a corpus through pipeline + evaluation
* ``POST /eval``                  - score a directory of solution files
* ``POST /replay-store/verify``   - replay store integrity check
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..corpus import CorpusError, load_corpus
from ..gateway import GatewayError, ReplayStore
from ..harness import (
    MissingSolution,
    build_gateway,
    build_sandbox,
    evaluate_directory,
    run_batch,
)
from ..metrics import render_table
from ..pipeline import Pipeline, write_run_record
from ..domain import validate_task
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(
        title="perfgen",
        version=__version__,
        description="Efficiency-first code generation pipeline and benchmark harness",
    )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/tasks/validate", response_model=schemas.ValidateTaskResponse)
    def tasks_validate(request: schemas.ValidateTaskRequest) -> schemas.ValidateTaskResponse:
        return schemas.ValidateTaskResponse(violations=validate_task(request.task))

    @app.post("/pipeline/run", response_model=schemas.RunTaskResponse)
    def pipeline_run(request: schemas.RunTaskRequest) -> schemas.RunTaskResponse:
        tasks = {t.task_id: t for t in _load(request.corpus_dir)}
        if request.task_id not in tasks:
            raise HTTPException(404, f"task {request.task_id!r} not in corpus")
        try:
            gateway = build_gateway(request)
        except (GatewayError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        pipeline = Pipeline(gateway, build_sandbox(request), request.pipeline_config())
        record = pipeline.run_task(tasks[request.task_id])
        if request.report_dir:
            write_run_record(record, Path(request.report_dir) / "runs")
        return schemas.RunTaskResponse(record=record)

    @app.post("/batch/run", response_model=schemas.RunBatchResponse)
    def batch_run(request: schemas.RunBatchRequest) -> schemas.RunBatchResponse:
        tasks = _load(request.corpus_dir)
        try:
            result = run_batch(tasks, request, request.report_dir,
                               evaluate=request.evaluate)
        except (GatewayError, ValueError) as exc:
            raise HTTPException(400, str(exc)) from exc
        recorded = None
        if request.provider == "record" and request.replay_dir:
            recorded = len(ReplayStore(request.replay_dir))
        return schemas.RunBatchResponse(
            run_ids=result.run_ids,
            report=result.report,
            table=render_table(result.report.last) if result.report else "",
            failures=result.failures,
            infrastructure_failed=result.infrastructure_failed,
            report_dir=request.report_dir,
            recorded_entries=recorded,
        )

    @app.post("/eval", response_model=schemas.EvalResponse)
    def eval_solutions(request: schemas.EvalRequest) -> schemas.EvalResponse:
        tasks = _load(request.corpus_dir)
        try:
            report = evaluate_directory(tasks, request.solutions_dir, request,
                                        out_dir=request.report_dir)
        except MissingSolution as exc:
            raise HTTPException(400, str(exc)) from exc
        return schemas.EvalResponse(report=report, table=render_table(report))

    @app.post("/replay-store/verify", response_model=schemas.VerifyStoreResponse)
    def replay_store_verify(request: schemas.VerifyStoreRequest) -> schemas.VerifyStoreResponse:
        store = ReplayStore(request.replay_dir)
        issues = store.verify_integrity()
        return schemas.VerifyStoreResponse(ok=not issues, entries=len(store), issues=issues)

    def _load(corpus_dir: str):
        try:
            return load_corpus(corpus_dir)
        except CorpusError as exc:
            raise HTTPException(400, str(exc)) from exc

    return app
