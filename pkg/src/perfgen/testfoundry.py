"""Synthesis of test inputs, completion into assertions, and the lifecycle store.

Model-computed expected outputs are accepted as-is here; deciding whether they
are right is the verification module's job. Completions that do not mention
the entry point are dropped rather than rewritten, to avoid silently changing
intent.
"""

from __future__ import annotations

import threading
from typing import Callable, Mapping

from .domain import FormalizedTask, StatusEvent, TestCase, TestLifecycle
from .prompts import Stage
from .prompts.parsers import parse_assertions, parse_test_inputs

StageCaller = Callable[[Stage, Mapping[str, str]], str]


class FoundryError(Exception):
    pass


class NoInputsSynthesized(FoundryError):
    pass


class AllCompletionsFailed(FoundryError):
    pass


class IllegalTransition(FoundryError):
    pass


def synthesize_inputs(
    call_stage: StageCaller, formal: FormalizedTask, n: int
) -> list[TestCase]:
    """Ask for test inputs and keep up to ``n`` deduplicated ones. One
    re-prompt when the model yields fewer than ``n``; whatever parsed after
    that is accepted, zero is an error."""
    if n < 1:
        raise ValueError("n must be >= 1")
    context = {"task_description": formal.as_prompt_text()}
    inputs = parse_test_inputs(call_stage(Stage.SYNTHESIZE_INPUTS, context))
    if len(inputs) < n:
        for extra in parse_test_inputs(call_stage(Stage.SYNTHESIZE_INPUTS, context)):
            if extra not in inputs:
                inputs.append(extra)
    if not inputs:
        raise NoInputsSynthesized("two synthesis attempts parsed to zero inputs")
    return [
        TestCase(test_id=i, input_repr=repr_)
        for i, repr_ in enumerate(inputs[:n], start=1)
    ]


def complete_assertions(
    call_stage: StageCaller,
    formal: FormalizedTask,
    cases: list[TestCase],
    warnings: list[str] | None = None,
) -> list[TestCase]:
    """Complete each input into a single-line assertion on the entry point.
    Cases whose completion fails to parse or that call a different function
    are dropped with a logged reason."""
    completed: list[TestCase] = []
    for case in cases:
        if not case.input_repr.strip():
            raise FoundryError(f"test {case.test_id} has an empty input")
        context = {
            "task_description": formal.as_prompt_text(),
            "input_case": f"input: {case.input_repr}",
        }
        lines = parse_assertions(call_stage(Stage.COMPLETE_TESTS, context))
        if not lines:
            _note(warnings, f"test {case.test_id}: completion produced no assertion; dropped")
            continue
        assertion = lines[0]
        if formal.entry_point not in assertion:
            _note(
                warnings,
                f"test {case.test_id}: assertion does not call {formal.entry_point!r}; dropped",
            )
            continue
        completed.append(case.model_copy(update={"assertion": assertion}))
    if not completed:
        raise AllCompletionsFailed("no assertion survived completion")
    return completed


def _note(warnings: list[str] | None, message: str) -> None:
    if warnings is not None:
        warnings.append(message)


_LEGAL_TARGETS = {TestLifecycle.TRUSTED, TestLifecycle.RETAINED, TestLifecycle.DISCARDED}


class TestCaseStore:
    """Ordered store of test cases with the monotone status machine.

    Once a case leaves ``synthesized`` it never moves again; the full history
    is kept for the run record. Status writes are serialized.
    """

    def __init__(self, cases: list[TestCase]):
        self._lock = threading.Lock()
        self._order = [c.test_id for c in cases]
        self._cases = {c.test_id: c for c in cases}
        self._history: list[StatusEvent] = [
            StatusEvent(test_id=c.test_id, status=c.status) for c in cases
        ]

    def __len__(self) -> int:
        return len(self._order)

    def get(self, test_id: int) -> TestCase:
        return self._cases[test_id]

    def cases(self) -> list[TestCase]:
        return [self._cases[i] for i in self._order]

    def history(self) -> list[StatusEvent]:
        return list(self._history)

    def record_status(self, test_id: int, status: TestLifecycle, note: str = "") -> TestCase:
        with self._lock:
            case = self._cases.get(test_id)
            if case is None:
                raise FoundryError(f"unknown test_id {test_id}")
            if status not in _LEGAL_TARGETS:
                raise IllegalTransition(f"cannot move test {test_id} back to {status.value}")
            if case.status is not TestLifecycle.SYNTHESIZED:
                raise IllegalTransition(
                    f"test {test_id} already {case.status.value}; cannot become {status.value}"
                )
            updated = case.model_copy(update={"status": status, "review_note": note or None})
            self._cases[test_id] = updated
            self._history.append(StatusEvent(test_id=test_id, status=status, note=note))
            return updated

    def checked(self) -> list[TestCase]:
        return [
            c for c in self.cases()
            if c.status in (TestLifecycle.TRUSTED, TestLifecycle.RETAINED)
        ]

    def assertions(self) -> list[str]:
        return [c.assertion for c in self.cases()]
