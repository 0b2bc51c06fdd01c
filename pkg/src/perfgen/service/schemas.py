"""Request/response models for the HTTP service.

Batch-shaped requests extend ``HarnessOptions`` so every pipeline and
evaluation knob is exposed uniformly to HTTP clients and to the CLI (which
is just a thin client of this service).
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..domain import RunRecord, Task
from ..harness import BatchReport, HarnessOptions, TaskFailure
from ..metrics import EfficiencyReport


class HealthResponse(BaseModel):
    status: str
    version: str


class ValidateTaskRequest(BaseModel):
    task: Task


class ValidateTaskResponse(BaseModel):
    violations: list[str]


class RunBatchRequest(HarnessOptions):
    corpus_dir: str
    report_dir: str
    evaluate: bool = True


class RunBatchResponse(BaseModel):
    run_ids: list[str]
    report: Optional[BatchReport] = None
    table: str = ""
    failures: list[TaskFailure] = Field(default_factory=list)
    infrastructure_failed: bool
    report_dir: str
    recorded_entries: Optional[int] = None


class RunTaskRequest(HarnessOptions):
    corpus_dir: str
    task_id: str
    report_dir: Optional[str] = None


class RunTaskResponse(BaseModel):
    record: RunRecord


class EvalRequest(HarnessOptions):
    corpus_dir: str
    solutions_dir: str
    report_dir: Optional[str] = None


class EvalResponse(BaseModel):
    report: EfficiencyReport
    table: str


class VerifyStoreRequest(BaseModel):
    replay_dir: str


class VerifyStoreResponse(BaseModel):
    ok: bool
    entries: int
    issues: list[str]
