"""End-to-end orchestration of the generation stages.

The stage graph is dictated by the configured variant:

* ``full``                - formalize -> check -> explore -> suggest ->
                            generate -> synthesize/complete tests -> execute ->
                            verify -> refine -> select
* ``variant1_no_logic``   - no algorithmic exploration: candidates come from
                            the direct multi-solution prompt, then code-level
                            suggestions derived from the generated code drive
                            one optimization pass; the rest is unchanged.
* ``variant2_no_code_opt``- no implementation-suggestion stage; generation
                            sees the plans only.
* ``variant3_no_refine``  - no synthetic tests, no verification, no
                            refinement; the model alone picks the final code.
* ``no_uniq1``            - like variant1 but suggestions are derived from the
                            formalized task together with the generated code.
* ``no_uniq2``            - correctness first: direct generation, tests,
                            verification and refinement happen before
                            algorithm exploration and the optimization pass.

Each model call is recorded as a (stage, prompt, response) transcript in
generation order; identifiers are assigned deterministically so a replayed
run reproduces the record byte for byte (wall clock aside).
"""

from __future__ import annotations

import json
import re
import time
from pathlib import Path
from typing import Mapping, Optional

from .domain import (
    AlgorithmPlan,
    CodeCandidate,
    ExecStatus,
    FormalizedTask,
    PassMatrix,
    PipelineConfig,
    RefinementRecord,
    RunRecord,
    StageTranscript,
    SuggestionSet,
    Task,
    TestLifecycle,
    Variant,
    VerificationOutcome,
)
from .gateway import ChatRequest, GatewayError, LLMGateway
from .prompts import PromptError, Stage, render
from .prompts.parsers import (
    InvalidSelection,
    NoAlgorithmBlocks,
    NoCodeBlockFound,
    ParseError,
    extract_complexity,
    parse_algorithm_blocks,
    parse_code_blocks,
    parse_formalization_sections,
    parse_selection,
    parse_suggestions,
    parse_verdict,
    render_candidates_json,
)
from .sandbox import ExecMode, ExecRequest, Sandbox, SandboxError
from .testfoundry import (
    FoundryError,
    TestCaseStore,
    complete_assertions,
    synthesize_inputs,
)
from .verification import checked_set as _checked_set
from .verification import forward_verify, reverse_review

NO_SUGGESTIONS = "(none)"


class PipelineError(Exception):
    pass


class _StageRecorder:
    """Renders a stage, issues the request, and keeps the transcript."""

    def __init__(self, gateway: LLMGateway, temperature: float,
                 transcripts: list[StageTranscript]):
        self._gateway = gateway
        self._temperature = temperature
        self._transcripts = transcripts

    def __call__(self, stage: Stage, context: Mapping[str, str]) -> str:
        messages = render(stage, context)
        request = ChatRequest(
            model_name=self._gateway.model_name,
            messages=messages,
            temperature=self._temperature,
            request_tag=stage.value,
        )
        response = self._gateway.complete(request)
        self._transcripts.append(
            StageTranscript(
                stage=stage.value,
                prompt=f"[system]\n{messages[0].content}\n[user]\n{messages[1].content}",
                response=response.content,
            )
        )
        return response.content


def _defines_entry_point(code: str, entry_point: str) -> bool:
    return re.search(rf"\bdef\s+{re.escape(entry_point)}\s*\(", code) is not None


class Pipeline:
    def __init__(self, gateway: LLMGateway, sandbox: Sandbox, config: PipelineConfig):
        self.gateway = gateway
        self.sandbox = sandbox
        self.config = config

    def run_task(self, task: Task) -> RunRecord:
        """Run the configured stage graph over one task. Stage-fatal errors
        yield a record with a failure marker instead of raising."""
        run = _TaskRun(self, task)
        started = time.perf_counter()
        try:
            run.execute()
        except (GatewayError, ParseError, PromptError, FoundryError,
                SandboxError, PipelineError) as exc:
            run.failure = f"{type(exc).__name__}: {exc}"
        return run.build_record(time.perf_counter() - started)


class _TaskRun:
    """State of a single task flowing through the stage graph."""

    def __init__(self, pipeline: Pipeline, task: Task):
        self.pipeline = pipeline
        self.task = task
        self.config = pipeline.config
        self.transcripts: list[StageTranscript] = []
        self.call = _StageRecorder(pipeline.gateway, self.config.temperature,
                                   self.transcripts)
        self.warnings: list[str] = []
        self.formal: Optional[FormalizedTask] = None
        self.plans: list[AlgorithmPlan] = []
        self.suggestions = SuggestionSet()
        self.candidates: list[CodeCandidate] = []
        self.store: Optional[TestCaseStore] = None
        self.matrix: Optional[PassMatrix] = None
        self.verification: Optional[VerificationOutcome] = None
        self.checked_ids: list[int] = []
        self.refinements: list[RefinementRecord] = []
        self.final_candidate_id: Optional[int] = None
        self.failure: Optional[str] = None

    # -- stage graph ----------------------------------------------------------

    def execute(self) -> None:
        variant = self.config.variant
        self.formalize()
        if variant is Variant.FULL:
            self.explore()
            self.suggest(self._plans_text(), [p.plan_id for p in self.plans])
            self.generate_from_plans()
            self.correctness_phase()
        elif variant is Variant.V1_NO_LOGIC:
            self.generate_direct()
            self.suggest(self._candidates_code_text(), [])
            self.optimize_candidates(with_plans=False)
            self.correctness_phase()
        elif variant is Variant.V2_NO_CODE_OPT:
            self.explore()
            # Implementation-optimization stage disabled: empty suggestion set.
            self.suggestions = SuggestionSet()
            self.generate_from_plans()
            self.correctness_phase()
        elif variant is Variant.V3_NO_REFINE:
            self.explore()
            self.suggest(self._plans_text(), [p.plan_id for p in self.plans])
            self.generate_from_plans()
        elif variant is Variant.NO_UNIQ1:
            self.generate_direct()
            self.suggest(
                self.formal.as_prompt_text() + "\n\n" + self._candidates_code_text(), []
            )
            self.optimize_candidates(with_plans=False)
            self.correctness_phase()
        elif variant is Variant.NO_UNIQ2:
            self.generate_direct()
            self.correctness_phase()
            self.explore()
            self.suggest(self._plans_text(), [p.plan_id for p in self.plans])
            self.optimize_candidates(with_plans=True)
            self.rescore_on_checked()
        else:  # pragma: no cover - enum is closed
            raise PipelineError(f"unknown variant {variant}")
        self.select_final()

    # -- individual stages ----------------------------------------------------

    def formalize(self) -> None:
        formal = self._formalize_once(self.task.description)
        ok, reason = self._check_formalization(formal)
        if not ok:
            amended = (
                f"{self.task.description}\n\n"
                f"A reviewer found the previous explanation inconsistent: {reason}"
            )
            formal = self._formalize_once(amended)
            ok, reason = self._check_formalization(formal)
            if not ok:
                self.warnings.append(
                    f"formalization still judged inconsistent after retry: {reason}"
                )
        self.formal = formal

    def _formalize_once(self, description: str) -> FormalizedTask:
        raw = self.call(Stage.FORMALIZE, {"natural_language_description": description})
        sections = parse_formalization_sections(raw)
        missing = [
            key for key in ("io_conditions", "parameter_types", "edge_cases", "expected_behavior")
            if not sections.get(key)
        ]
        if missing:
            self.warnings.append(
                f"formalization response missing sections {missing}; using full text"
            )
        return FormalizedTask(
            entry_point=self.task.entry_point,  # authoritative, never the model's
            io_conditions=sections.get("io_conditions") or raw.strip(),
            parameter_types=sections.get("parameter_types") or raw.strip(),
            edge_cases=sections.get("edge_cases") or raw.strip(),
            expected_behavior=sections.get("expected_behavior") or raw.strip(),
            source_task_id=self.task.task_id,
        )

    def _check_formalization(self, formal: FormalizedTask) -> tuple[bool, str]:
        raw = self.call(
            Stage.FORMALIZE_CHECK,
            {
                "natural_language_description": self.task.description,
                "task_description": formal.as_prompt_text(),
            },
        )
        try:
            return parse_verdict(raw)
        except ParseError:
            self.warnings.append("unparseable formalization-check verdict; proceeding")
            return True, ""

    def explore(self) -> None:
        context = {
            "task_description": self.formal.as_prompt_text(),
            "algorithm_count": str(self.config.num_plans),
        }
        drafts = None
        for attempt in range(2):
            raw = self.call(Stage.EXPLORE, context)
            try:
                drafts = parse_algorithm_blocks(raw)
                break
            except NoAlgorithmBlocks:
                if attempt == 1:
                    raise
        if len(drafts) < self.config.num_plans:
            self.warnings.append(
                f"exploration yielded {len(drafts)} of {self.config.num_plans} plans"
            )
        self.plans = [
            AlgorithmPlan(
                plan_id=i,
                key_description=desc,
                complexity=extract_complexity(desc) or extract_complexity(pseudo),
                pseudocode=pseudo,
            )
            for i, (desc, pseudo) in enumerate(drafts[: self.config.num_plans], start=1)
        ]

    def suggest(self, basis_text: str, source_plan_ids: list[int]) -> None:
        raw = self.call(Stage.SUGGEST, {"algorithm_description": basis_text})
        items = parse_suggestions(raw)
        if len(items) < 20:
            self.warnings.append(f"only {len(items)} optimization suggestions parsed")
        self.suggestions = SuggestionSet(suggestions=items, source_plan_ids=source_plan_ids)

    def generate_from_plans(self) -> None:
        candidates = []
        for plan in self.plans:
            context = {
                "task_description": self.formal.as_prompt_text(),
                "algorithm_description": plan.as_prompt_text(),
                "efficiency_optimization_suggestions":
                    self.suggestions.as_prompt_text() or NO_SUGGESTIONS,
            }
            code = self._generate_one(context, f"plan {plan.plan_id}")
            if code is None:
                continue
            candidates.append(
                CodeCandidate(candidate_id=plan.plan_id, code=code, plan_id=plan.plan_id)
            )
        if not candidates:
            raise PipelineError("no candidate survived generation")
        self.candidates = candidates

    def _generate_one(self, context: Mapping[str, str], label: str) -> Optional[str]:
        """One generation call with a single re-prompt for empty or renamed
        output; returns None when the plan must be dropped."""
        for attempt in range(2):
            raw = self.call(Stage.GENERATE, context)
            try:
                code = parse_code_blocks(raw)[0]
            except NoCodeBlockFound:
                if attempt == 1:
                    self.warnings.append(f"{label}: no code block twice; dropped")
                    return None
                continue
            if not _defines_entry_point(code, self.formal.entry_point):
                if attempt == 1:
                    self.warnings.append(
                        f"{label}: generated code does not define "
                        f"{self.formal.entry_point!r} twice; dropped"
                    )
                    return None
                continue
            return code
        return None

    def generate_direct(self) -> None:
        """Candidates from the direct multi-solution prompt (no plans)."""
        blocks = None
        for attempt in range(2):
            raw = self.call(Stage.GENERATE_DIRECT,
                            {"task_description": self.formal.as_prompt_text()})
            try:
                blocks = parse_code_blocks(raw)
                break
            except NoCodeBlockFound:
                if attempt == 1:
                    raise
        candidates = []
        for i, code in enumerate(blocks[: self.config.num_plans], start=1):
            if not _defines_entry_point(code, self.formal.entry_point):
                self.warnings.append(f"direct candidate {i} renames the entry point; dropped")
                continue
            candidates.append(CodeCandidate(candidate_id=i, code=code, plan_id=i))
        if not candidates:
            raise PipelineError("no direct candidate defines the entry point")
        self.candidates = candidates

    def optimize_candidates(self, with_plans: bool) -> None:
        """Apply the suggestion set to each existing candidate via one
        regeneration; a failed regeneration keeps the original code."""
        optimized = []
        for cand in self.candidates:
            if with_plans and self.plans:
                plan = self.plans[(cand.candidate_id - 1) % len(self.plans)]
                basis = plan.as_prompt_text() + "\n\nExisting implementation:\n" + cand.code
            else:
                basis = cand.code
            context = {
                "task_description": self.formal.as_prompt_text(),
                "algorithm_description": basis,
                "efficiency_optimization_suggestions":
                    self.suggestions.as_prompt_text() or NO_SUGGESTIONS,
            }
            code = self._generate_one(context, f"optimize candidate {cand.candidate_id}")
            if code is None:
                self.warnings.append(
                    f"candidate {cand.candidate_id}: optimization kept original code"
                )
                optimized.append(cand)
            else:
                optimized.append(cand.model_copy(update={"code": code}))
        self.candidates = optimized

    # -- correctness ----------------------------------------------------------

    def correctness_phase(self) -> None:
        cases = synthesize_inputs(self.call, self.formal, self.config.num_tests)
        cases = complete_assertions(self.call, self.formal, cases, self.warnings)
        self.store = TestCaseStore(cases)
        self.execute_matrix()
        self.verify()
        if self.config.refine_iterations > 0:
            self.refine_failing()

    def execute_matrix(self) -> None:
        assertions = self.store.assertions()
        requests = [
            ExecRequest(
                code=cand.code,
                assertions=assertions,
                per_test_timeout=self.config.per_test_timeout,
                mode=ExecMode.FUNCTIONAL,
            )
            for cand in self.candidates
        ]
        outcomes = self.pipeline.sandbox.run_functional_many(requests)
        test_ids = [c.test_id for c in self.store.cases()]
        grid = [[t.status for t in outcome.per_test] for outcome in outcomes]
        self.matrix = PassMatrix(
            candidate_ids=[c.candidate_id for c in self.candidates],
            test_ids=test_ids,
            grid=grid,
        )

    def verify(self) -> None:
        trusted, suspect = forward_verify(self.matrix)
        if suspect:
            suspects = [self.store.get(t) for t in sorted(suspect)]
            retained, discarded, verdicts = reverse_review(self.call, self.formal, suspects)
        else:
            retained, discarded, verdicts = set(), set(), []
        for test_id in sorted(trusted):
            self.store.record_status(test_id, TestLifecycle.TRUSTED,
                                     "all candidates pass")
        notes = {v.test_id: v.reason for v in verdicts}
        for test_id in sorted(retained):
            self.store.record_status(test_id, TestLifecycle.RETAINED,
                                     "kept by reverse review")
        for test_id in sorted(discarded):
            self.store.record_status(test_id, TestLifecycle.DISCARDED,
                                     notes.get(test_id, "rejected by reverse review"))
        self.verification = VerificationOutcome(
            trusted=sorted(trusted),
            retained=sorted(retained),
            discarded=sorted(discarded),
            review_transcripts=verdicts,
        )
        self.checked_ids = sorted(_checked_set(self.verification))
        self.candidates = [
            cand.model_copy(
                update={
                    "per_test_results": self.matrix.row(cand.candidate_id),
                    "pass_count": self._count_checked(self.matrix.row(cand.candidate_id)),
                }
            )
            for cand in self.candidates
        ]

    def _count_checked(self, results: Mapping[int, ExecStatus]) -> int:
        return sum(
            1 for test_id in self.checked_ids
            if results.get(test_id) is ExecStatus.PASS
        )

    def refine_failing(self) -> None:
        """One refinement round per iteration: all failing checked tests of a
        candidate go into a single prompt, and the better of original/refined
        is kept (ties favor the refined version)."""
        if not self.checked_ids:
            return
        for _ in range(self.config.refine_iterations):
            updated = []
            any_refined = False
            for cand in self.candidates:
                failing = [
                    self.store.get(t) for t in self.checked_ids
                    if cand.per_test_results.get(t) is not ExecStatus.PASS
                ]
                if not failing or cand.refinement_generation >= self.config.refine_iterations:
                    updated.append(cand)
                    continue
                refined = self._refine_one(cand, [f.assertion for f in failing])
                updated.append(refined)
                any_refined = any_refined or refined is not cand
            self.candidates = updated
            if not any_refined:
                break

    def _refine_one(self, cand: CodeCandidate, failing: list[str]) -> CodeCandidate:
        raw = self.call(
            Stage.REFINE,
            {
                "task_description": self.formal.as_prompt_text(),
                "code": cand.code,
                "test_case": "\n".join(failing),
            },
        )
        try:
            code = parse_code_blocks(raw)[0]
        except NoCodeBlockFound:
            self.warnings.append(
                f"candidate {cand.candidate_id}: refinement output unparseable; original kept"
            )
            return cand
        if not _defines_entry_point(code, self.formal.entry_point):
            self.warnings.append(
                f"candidate {cand.candidate_id}: refinement renamed the entry point; original kept"
            )
            return cand
        checked_assertions = [self.store.get(t).assertion for t in self.checked_ids]
        outcome = self.pipeline.sandbox.run_functional(
            ExecRequest(
                code=code,
                assertions=checked_assertions,
                per_test_timeout=self.config.per_test_timeout,
                mode=ExecMode.FUNCTIONAL,
            )
        )
        refined_results = {
            test_id: t.status for test_id, t in zip(self.checked_ids, outcome.per_test)
        }
        refined_pass = sum(
            1 for s in refined_results.values() if s is ExecStatus.PASS
        )
        keep_refined = refined_pass >= cand.pass_count
        self.refinements.append(
            RefinementRecord(
                candidate_id=cand.candidate_id,
                original_pass=cand.pass_count,
                refined_pass=refined_pass,
                kept="refined" if keep_refined else "original",
            )
        )
        if not keep_refined:
            return cand
        return cand.model_copy(
            update={
                "code": code,
                "refinement_generation": cand.refinement_generation + 1,
                "per_test_results": refined_results,
                "pass_count": refined_pass,
            }
        )

    def rescore_on_checked(self) -> None:
        """Re-execute every candidate on the checked set (used after the late
        optimization pass of the correctness-first ordering)."""
        if not self.checked_ids:
            return
        checked_assertions = [self.store.get(t).assertion for t in self.checked_ids]
        requests = [
            ExecRequest(
                code=cand.code,
                assertions=checked_assertions,
                per_test_timeout=self.config.per_test_timeout,
                mode=ExecMode.FUNCTIONAL,
            )
            for cand in self.candidates
        ]
        outcomes = self.pipeline.sandbox.run_functional_many(requests)
        rescored = []
        for cand, outcome in zip(self.candidates, outcomes):
            results = {
                test_id: t.status for test_id, t in zip(self.checked_ids, outcome.per_test)
            }
            rescored.append(
                cand.model_copy(
                    update={
                        "per_test_results": results,
                        "pass_count": sum(
                            1 for s in results.values() if s is ExecStatus.PASS
                        ),
                    }
                )
            )
        self.candidates = rescored

    # -- selection --------------------------------------------------------------

    def select_final(self) -> None:
        if not self.candidates:
            raise PipelineError("nothing to select from")
        if self.config.variant is Variant.V3_NO_REFINE:
            self.final_candidate_id = self._select_via_model(self.candidates)
            return
        if not self.checked_ids:
            self.warnings.append(
                "checked set empty; selection delegated to the model over all candidates"
            )
            self.final_candidate_id = self._select_via_model(self.candidates)
            return
        best = max(c.pass_count for c in self.candidates)
        tied = [c for c in self.candidates if c.pass_count == best]
        if len(tied) == 1:
            self.final_candidate_id = tied[0].candidate_id
        else:
            self.final_candidate_id = self._select_via_model(tied)

    def _select_via_model(self, candidates: list[CodeCandidate]) -> int:
        ids = sorted(c.candidate_id for c in candidates)
        payload = render_candidates_json({c.candidate_id: c.code for c in candidates})
        raw = self.call(Stage.SELECT, {"corrected_code_candidates": payload})
        try:
            choice = parse_selection(raw)
        except InvalidSelection:
            self.warnings.append("unparseable selection; falling back to lowest candidate id")
            return ids[0]
        if choice not in ids:
            self.warnings.append(
                f"selection chose unknown candidate {choice}; falling back to lowest id"
            )
            return ids[0]
        return choice

    # -- record -----------------------------------------------------------------

    def _plans_text(self) -> str:
        return "\n\n".join(p.as_prompt_text() for p in self.plans)

    def _candidates_code_text(self) -> str:
        return "\n\n".join(
            f"Candidate {c.candidate_id}:\n{c.code}" for c in self.candidates
        )

    def build_record(self, wall_clock: float) -> RunRecord:
        return RunRecord(
            run_id=f"{self.task.task_id}--{self.config.variant.value}",
            task_id=self.task.task_id,
            config_snapshot=self.config,
            stage_transcripts=self.transcripts,
            candidates=self.candidates,
            tests=self.store.cases() if self.store else [],
            status_history=self.store.history() if self.store else [],
            pass_matrix=self.matrix,
            verification=self.verification,
            refinements=self.refinements,
            checked_test_ids=self.checked_ids,
            final_candidate_id=self.final_candidate_id,
            warnings=self.warnings,
            failure=self.failure,
            wall_clock=wall_clock,
        )


# -- persistence ----------------------------------------------------------------

VOLATILE_RECORD_FIELDS = ("wall_clock",)


def record_to_json(record: RunRecord) -> str:
    return json.dumps(record.model_dump(mode="json"), indent=2) + "\n"


def write_run_record(record: RunRecord, runs_root: Path | str) -> Path:
    """Persist one run: runs/<run_id>/record.json plus a readable stage log."""
    run_dir = Path(runs_root) / record.run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "record.json").write_text(record_to_json(record), encoding="utf-8")
    lines = [f"run {record.run_id} (task {record.task_id})", ""]
    for i, t in enumerate(record.stage_transcripts, start=1):
        lines += [
            f"=== stage {i}: {t.stage} ===",
            "--- prompt ---",
            t.prompt,
            "--- response ---",
            t.response,
            "",
        ]
    if record.failure:
        lines.append(f"FAILED: {record.failure}")
    (run_dir / "stages.log").write_text("\n".join(lines), encoding="utf-8")
    return run_dir


def stage_sequence(record: RunRecord, collapse: bool = True) -> list[str]:
    """Stage names in transcript order; consecutive repeats collapsed by default
    (retries and per-item calls repeat a stage)."""
    names = [t.stage for t in record.stage_transcripts]
    if not collapse:
        return names
    collapsed: list[str] = []
    for name in names:
        if not collapsed or collapsed[-1] != name:
            collapsed.append(name)
    return collapsed
