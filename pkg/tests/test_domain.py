import pytest
from pydantic import ValidationError

from perfgen.domain import (
    CodeCandidate,
    Difficulty,
    ExecStatus,
    PassMatrix,
    PipelineConfig,
    ReferenceSolution,
    RunRecord,
    SolutionRole,
    Task,
    Variant,
    VerificationOutcome,
    validate_task,
)
from perfgen.domain import TestCase as SynthTest
from perfgen.domain import TestLifecycle as Lifecycle


def make_task(**overrides) -> Task:
    base = dict(
        task_id="prime_fib",
        description="Return the n-th number that is both prime and a Fibonacci number.",
        entry_point="prime_fib",
        difficulty=Difficulty.HARD,
        hidden_tests=["assert prime_fib(1) == 2"],
        reference_solutions=[
            ReferenceSolution(code="def prime_fib(n): ...", role=SolutionRole.EXPERT)
        ],
    )
    base.update(overrides)
    return Task(**base)


class TestValidateTask:
    def test_well_formed_task_has_no_violations(self):
        assert validate_task(make_task()) == []

    def test_empty_entry_point(self):
        assert validate_task(make_task(entry_point="")) == ["entry_point empty"]

    def test_two_expert_solutions(self):
        refs = [
            ReferenceSolution(code="def prime_fib(n): pass", role=SolutionRole.EXPERT),
            ReferenceSolution(code="def prime_fib(n): return 2", role=SolutionRole.EXPERT),
        ]
        assert validate_task(make_task(reference_solutions=refs)) == [
            "multiple expert solutions"
        ]

    def test_non_positive_runtime_flagged(self):
        refs = [
            ReferenceSolution(
                code="x", role=SolutionRole.BASELINE, measured_runtimes={0: 0.0}
            )
        ]
        assert "non-positive measured runtime in reference solution" in validate_task(
            make_task(reference_solutions=refs)
        )

    def test_negative_level_weight_flagged(self):
        assert "negative level weight" in validate_task(
            make_task(level_weights={0: -1.0})
        )


class TestRoundTrip:
    @pytest.mark.parametrize(
        "value",
        [
            make_task(level_weights={0: 1.0, 1: 2.5}),
            SynthTest(test_id=3, input_repr="[1]", assertion="assert f([1]) == 1",
                      status=Lifecycle.RETAINED, review_note="kept"),
            CodeCandidate(candidate_id=1, code="def f(): pass", plan_id=1,
                          pass_count=2,
                          per_test_results={1: ExecStatus.PASS, 2: ExecStatus.FAIL}),
            PipelineConfig(variant=Variant.NO_UNIQ2, num_tests=7),
            VerificationOutcome(trusted=[1], retained=[2], discarded=[3]),
        ],
    )
    def test_json_round_trip(self, value):
        restored = type(value).model_validate_json(value.model_dump_json())
        assert restored == value

    def test_run_record_round_trip(self):
        record = RunRecord(
            run_id="t--full",
            task_id="t",
            config_snapshot=PipelineConfig(),
            pass_matrix=PassMatrix(
                candidate_ids=[1, 2],
                test_ids=[1],
                grid=[[ExecStatus.PASS], [ExecStatus.TIMEOUT]],
            ),
            final_candidate_id=1,
            wall_clock=1.25,
        )
        assert RunRecord.model_validate_json(record.model_dump_json()) == record


class TestPassMatrix:
    def test_rectangular_enforced(self):
        with pytest.raises(ValidationError):
            PassMatrix(candidate_ids=[1], test_ids=[1, 2], grid=[[ExecStatus.PASS]])
        with pytest.raises(ValidationError):
            PassMatrix(candidate_ids=[1, 2], test_ids=[1], grid=[[ExecStatus.PASS]])

    def test_row_and_column_access(self):
        m = PassMatrix(
            candidate_ids=[10, 20],
            test_ids=[1, 2],
            grid=[[ExecStatus.PASS, ExecStatus.FAIL],
                  [ExecStatus.ERROR, ExecStatus.PASS]],
        )
        assert m.row(20) == {1: ExecStatus.ERROR, 2: ExecStatus.PASS}
        assert m.column(2) == [ExecStatus.FAIL, ExecStatus.PASS]


class TestInvariants:
    def test_verification_outcome_rejects_overlap(self):
        with pytest.raises(ValidationError):
            VerificationOutcome(trusted=[1], retained=[1], discarded=[])

    def test_domain_models_are_frozen(self):
        task = make_task()
        with pytest.raises(ValidationError):
            task.entry_point = "other"

    def test_config_bounds(self):
        with pytest.raises(ValidationError):
            PipelineConfig(num_plans=0)
        with pytest.raises(ValidationError):
            PipelineConfig(num_tests=0)
        with pytest.raises(ValidationError):
            PipelineConfig(temperature=-0.1)
