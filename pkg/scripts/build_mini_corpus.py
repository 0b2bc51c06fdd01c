#!/usr/bin/env python3
"""Build the bundled mini corpus and record its replay store.

Steps:
1. sanity-check every fixture (expert passes its own hidden tests, buggy
   candidates really fail, refinements really fix);
2. write corpus/mini/{manifest.json,tasks/*.json};
3. run the pipeline with the scripted model in record mode - the full
   variant over every task plus each remaining variant over the designated
   task - writing corpus/mini/replay/;
4. assert the recorded runs have the intended structure (no failures,
   non-trivial verification, refinement activity).

Rerunning is idempotent: identical fixtures produce identical bytes.
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))
sys.path.insert(0, str(REPO / "scripts"))

from perfgen.corpus import write_corpus  # noqa: E402
from perfgen.domain import (  # noqa: E402
    Difficulty,
    PipelineConfig,
    ReferenceSolution,
    SolutionRole,
    Task,
    Variant,
    validate_task,
)
from perfgen.gateway import LLMGateway, Provider, ReplayStore  # noqa: E402
from perfgen.pipeline import Pipeline  # noqa: E402
from perfgen.sandbox import Sandbox  # noqa: E402

from scripted_model import ScriptedModel  # noqa: E402
from task_fixtures import ALL_FIXTURES, DESIGNATED_TASK_ID, TaskFixture  # noqa: E402

CORPUS_DIR = REPO / "corpus" / "mini"
MODEL_NAME = "scripted-t0"


def _as_reference(code: str, label: str) -> str:
    # Reference sources carry a marker line so they are textually distinct
    # from any model-generated candidate; the firewall scan checks that no
    # reference string ever appears inside a rendered prompt, and a candidate
    # that legitimately equals the reference implementation must not trip it.
    return f"# {label} reference implementation\n{code}"


def to_task(fixture: TaskFixture) -> Task:
    refs = [ReferenceSolution(code=_as_reference(fixture.expert, "expert"),
                              role=SolutionRole.EXPERT)]
    refs += [
        ReferenceSolution(code=_as_reference(code, "baseline"),
                          role=SolutionRole.BASELINE)
        for code in fixture.baselines
    ]
    return Task(
        task_id=fixture.task_id,
        description=fixture.description,
        entry_point=fixture.entry_point,
        difficulty=Difficulty(fixture.difficulty),
        hidden_tests=fixture.hidden_tests,
        reference_solutions=refs,
        level_weights=fixture.level_weights,
    )


def run_assertion(code: str, assertion: str) -> str:
    namespace: dict = {}
    try:
        exec(code, namespace)
        exec(assertion, namespace)
    except AssertionError:
        return "fail"
    except Exception:
        return "error"
    return "pass"


def sanity_check(fixture: TaskFixture) -> None:
    task = to_task(fixture)
    problems = validate_task(task)
    assert not problems, f"{fixture.task_id}: invalid task: {problems}"
    assert len(fixture.candidates) == 5, f"{fixture.task_id}: need 5 candidates"
    assert len(fixture.plans) == 5, f"{fixture.task_id}: need 5 plans"

    for assertion in fixture.hidden_tests:
        assert run_assertion(fixture.expert, assertion) == "pass", (
            f"{fixture.task_id}: expert fails hidden test {assertion!r}"
        )
        for baseline in fixture.baselines:
            assert run_assertion(baseline, assertion) == "pass", (
                f"{fixture.task_id}: baseline fails hidden test {assertion!r}"
            )

    # Synthetic expectations: correct completions must pass the expert and
    # both designed-buggy candidates must fail at least one correct test.
    model = ScriptedModel([fixture])
    unique_inputs = list(dict.fromkeys(fixture.synth_inputs))
    correct_assertions = []
    for args in unique_inputs:
        expected = fixture.wrong_outputs.get(args)
        if expected is None:
            value = repr(model._run_expert(fixture, args))
            assertion = f"assert {fixture.entry_point}({args}) == {value}"
            assert run_assertion(fixture.expert, assertion) == "pass"
            correct_assertions.append(assertion)
        else:
            assertion = f"assert {fixture.entry_point}({args}) == {expected}"
            assert run_assertion(fixture.expert, assertion) != "pass", (
                f"{fixture.task_id}: wrong output for {args!r} is accidentally right"
            )

    for broken, fixed in fixture.refine_map.items():
        assert broken in fixture.candidates, f"{fixture.task_id}: refine key unknown"
        failures = [a for a in correct_assertions if run_assertion(broken, a) != "pass"]
        assert failures, f"{fixture.task_id}: buggy candidate never fails"

    # Hidden tests and synthetic assertions must not collide textually, or
    # the prompt firewall scan would flag its own synthetic tests.
    for assertion in correct_assertions:
        assert assertion not in fixture.hidden_tests, (
            f"{fixture.task_id}: synthetic assertion duplicates a hidden test: "
            f"{assertion!r}"
        )


def record_runs(tasks: dict[str, Task], store_dir: Path) -> None:
    model = ScriptedModel(ALL_FIXTURES)
    store = ReplayStore(store_dir)
    sandbox = Sandbox(workers=5)
    runs = [(task, Variant.FULL) for task in tasks.values()]
    runs += [
        (tasks[DESIGNATED_TASK_ID], variant)
        for variant in Variant
        if variant is not Variant.FULL
    ]
    for task, variant in runs:
        gateway = LLMGateway(
            Provider.MOCK, MODEL_NAME, store=store, record=True, mock_responder=model
        )
        config = PipelineConfig(variant=variant)
        record = Pipeline(gateway, sandbox, config).run_task(task)
        label = f"{task.task_id}/{variant.value}"
        assert record.failure is None, f"{label}: {record.failure}"
        assert record.final_candidate_id is not None, f"{label}: nothing selected"
        if variant is not Variant.V3_NO_REFINE:
            assert record.verification is not None, f"{label}: no verification"
            assert record.verification.trusted, f"{label}: no trusted tests"
            assert record.verification.retained, f"{label}: no retained tests"
            assert record.verification.discarded, f"{label}: no discarded tests"
            assert record.refinements, f"{label}: no refinement activity"
            best = max(c.pass_count for c in record.candidates)
            final = next(
                c for c in record.candidates
                if c.candidate_id == record.final_candidate_id
            )
            assert final.pass_count == best, f"{label}: selection not optimal"
        print(f"  recorded {label}: {len(record.stage_transcripts)} transcripts, "
              f"final candidate {record.final_candidate_id}")


def main() -> None:
    print("sanity-checking fixtures ...")
    for fixture in ALL_FIXTURES:
        sanity_check(fixture)
        print(f"  {fixture.task_id}: ok")

    tasks = {f.task_id: to_task(f) for f in ALL_FIXTURES}
    if CORPUS_DIR.exists():
        shutil.rmtree(CORPUS_DIR)
    write_corpus(CORPUS_DIR, list(tasks.values()))
    print(f"wrote corpus with {len(tasks)} tasks to {CORPUS_DIR}")

    with tempfile.TemporaryDirectory() as scratch:
        store_dir = Path(scratch) / "replay"
        print("recording replay store ...")
        record_runs(tasks, store_dir)
        target = CORPUS_DIR / "replay"
        shutil.copytree(store_dir, target)
    store = ReplayStore(CORPUS_DIR / "replay")
    issues = store.verify_integrity()
    assert not issues, issues
    print(f"replay store ready: {len(store)} entries")


if __name__ == "__main__":
    main()
