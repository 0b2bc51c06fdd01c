"""Domain types shared across the generation pipeline and the benchmark harness.

Everything here is an immutable pydantic model: stages never mutate values in
place, they build successor values. All identifiers (plan ids, candidate ids,
test ids, run ids) are assigned in generation order so that replayed runs are
byte-stable.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Difficulty(str, Enum):
    EASY = "easy"
    MEDIUM = "medium"
    HARD = "hard"
    UNSPECIFIED = "unspecified"


class SolutionRole(str, Enum):
    EXPERT = "expert"
    BASELINE = "baseline"


class TestLifecycle(str, Enum):
    """Lifecycle of a synthesized test case. Transitions are monotone:
    synthesized -> exactly one of {trusted, retained, discarded}."""

    SYNTHESIZED = "synthesized"
    TRUSTED = "trusted"
    RETAINED = "retained"
    DISCARDED = "discarded"


class ExecStatus(str, Enum):
    """Outcome of executing one assertion against one candidate."""

    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"
    TIMEOUT = "timeout"


class Variant(str, Enum):
    """Pipeline configuration variants (ablations and stage reorderings)."""

    FULL = "full"
    V1_NO_LOGIC = "variant1_no_logic"
    V2_NO_CODE_OPT = "variant2_no_code_opt"
    V3_NO_REFINE = "variant3_no_refine"
    NO_UNIQ1 = "no_uniq1"
    NO_UNIQ2 = "no_uniq2"


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


class ReferenceSolution(FrozenModel):
    code: str
    role: SolutionRole = SolutionRole.BASELINE
    # Optional pre-measured wall times per difficulty-level index (seconds).
    measured_runtimes: Optional[dict[int, float]] = None


class Task(FrozenModel):
    """One benchmark problem: the natural-language description plus the
    evaluation-only material (hidden tests, reference solutions).

    Hidden tests and reference solutions are consumed exclusively by the
    evaluation harness; the pipeline stages only ever see ``description``
    and ``entry_point``.
    """

    task_id: str
    description: str
    entry_point: str
    difficulty: Difficulty = Difficulty.UNSPECIFIED
    hidden_tests: list[str] = Field(default_factory=list)
    reference_solutions: list[ReferenceSolution] = Field(default_factory=list)
    # Weight per difficulty-level index; defaults to uniform when absent.
    level_weights: Optional[dict[int, float]] = None

    def expert_solution(self) -> Optional[ReferenceSolution]:
        for ref in self.reference_solutions:
            if ref.role is SolutionRole.EXPERT:
                return ref
        return None


class FormalizedTask(FrozenModel):
    """Code-oriented restatement of a task along four dimensions."""

    entry_point: str
    io_conditions: str
    edge_cases: str
    parameter_types: str
    expected_behavior: str
    source_task_id: str

    def as_prompt_text(self) -> str:
        return (
            f"Entry Point Function Name: {self.entry_point}\n"
            f"Input/Output Conditions: {self.io_conditions}\n"
            f"Parameter Types: {self.parameter_types}\n"
            f"Edge Cases: {self.edge_cases}\n"
            f"Expected Behavior: {self.expected_behavior}"
        )


class AlgorithmPlan(FrozenModel):
    plan_id: int = Field(ge=1)
    key_description: str
    complexity: str = ""
    pseudocode: str

    def as_prompt_text(self) -> str:
        parts = [f"Algorithm {self.plan_id}: {self.key_description}"]
        if self.complexity:
            parts.append(f"Complexity: {self.complexity}")
        parts.append(f"Pseudocode:\n{self.pseudocode}")
        return "\n".join(parts)


class SuggestionSet(FrozenModel):
    suggestions: list[str] = Field(default_factory=list)
    source_plan_ids: list[int] = Field(default_factory=list)

    def as_prompt_text(self) -> str:
        if not self.suggestions:
            return "(none)"
        return "\n".join(f"{i}. {s}" for i, s in enumerate(self.suggestions, start=1))


class CodeCandidate(FrozenModel):
    candidate_id: int
    code: str
    plan_id: int
    refinement_generation: int = Field(default=0, ge=0)
    pass_count: int = Field(default=0, ge=0)
    per_test_results: dict[int, ExecStatus] = Field(default_factory=dict)


class TestCase(FrozenModel):
    test_id: int
    input_repr: str
    assertion: str = ""
    status: TestLifecycle = TestLifecycle.SYNTHESIZED
    review_note: Optional[str] = None


class PipelineConfig(FrozenModel):
    num_plans: int = Field(default=5, ge=1)
    num_tests: int = Field(default=20, ge=1)
    refine_iterations: int = Field(default=1, ge=0)
    temperature: float = Field(default=0.0, ge=0.0)
    timing_repeats: int = Field(default=3, ge=1)
    per_test_timeout: float = Field(default=5.0, gt=0.0)
    variant: Variant = Variant.FULL


class StageTranscript(FrozenModel):
    stage: str
    prompt: str
    response: str


class PassMatrix(FrozenModel):
    """Result grid of every candidate against every synthesized test."""

    candidate_ids: list[int]
    test_ids: list[int]
    grid: list[list[ExecStatus]]

    @model_validator(mode="after")
    def _check_rectangular(self) -> "PassMatrix":
        if len(self.grid) != len(self.candidate_ids):
            raise ValueError("grid row count must equal number of candidates")
        for row in self.grid:
            if len(row) != len(self.test_ids):
                raise ValueError("grid rows must all have one cell per test")
        return self

    def column(self, test_id: int) -> list[ExecStatus]:
        j = self.test_ids.index(test_id)
        return [row[j] for row in self.grid]

    def row(self, candidate_id: int) -> dict[int, ExecStatus]:
        i = self.candidate_ids.index(candidate_id)
        return dict(zip(self.test_ids, self.grid[i]))


class ReviewVerdict(FrozenModel):
    test_id: int
    verdict: str
    reason: str = ""


class VerificationOutcome(FrozenModel):
    trusted: list[int] = Field(default_factory=list)
    retained: list[int] = Field(default_factory=list)
    discarded: list[int] = Field(default_factory=list)
    review_transcripts: list[ReviewVerdict] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_disjoint(self) -> "VerificationOutcome":
        t, r, d = set(self.trusted), set(self.retained), set(self.discarded)
        if (t & r) or (t & d) or (r & d):
            raise ValueError("trusted/retained/discarded must be pairwise disjoint")
        return self


class StatusEvent(FrozenModel):
    test_id: int
    status: TestLifecycle
    note: str = ""


class RefinementRecord(FrozenModel):
    candidate_id: int
    original_pass: int
    refined_pass: int
    kept: str  # "original" or "refined"


class RunRecord(FrozenModel):
    """Full transcript of one pipeline run over one task."""

    run_id: str
    task_id: str
    config_snapshot: PipelineConfig
    stage_transcripts: list[StageTranscript] = Field(default_factory=list)
    candidates: list[CodeCandidate] = Field(default_factory=list)
    tests: list[TestCase] = Field(default_factory=list)
    status_history: list[StatusEvent] = Field(default_factory=list)
    pass_matrix: Optional[PassMatrix] = None
    verification: Optional[VerificationOutcome] = None
    refinements: list[RefinementRecord] = Field(default_factory=list)
    checked_test_ids: list[int] = Field(default_factory=list)
    final_candidate_id: Optional[int] = None
    warnings: list[str] = Field(default_factory=list)
    failure: Optional[str] = None
    wall_clock: float = 0.0


def validate_task(task: Task) -> list[str]:
    """Check Task invariants. Returns one description per violation; never raises."""
    violations: list[str] = []
    if not task.task_id.strip():
        violations.append("task_id empty")
    if not task.entry_point.strip():
        violations.append("entry_point empty")
    experts = [r for r in task.reference_solutions if r.role is SolutionRole.EXPERT]
    if len(experts) > 1:
        violations.append("multiple expert solutions")
    for ref in task.reference_solutions:
        if ref.measured_runtimes is not None:
            if any(v <= 0 for v in ref.measured_runtimes.values()):
                violations.append("non-positive measured runtime in reference solution")
                break
    if task.level_weights is not None:
        if any(w < 0 for w in task.level_weights.values()):
            violations.append("negative level weight")
        elif task.level_weights and sum(task.level_weights.values()) == 0:
            violations.append("level weights sum to zero")
    return violations
