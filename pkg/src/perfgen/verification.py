"""Bidirectional verification of synthesized tests.

Forward verification trusts a test iff every candidate passes it. Suspects
(everything else, including tests that every candidate fails - those may be
correct, hard tests) go to reverse review: a per-test semantic-consistency
judgment against the formalized task. A yes verdict retains the test, a no
verdict discards it, and an unparseable verdict is re-asked once and then
discarded - a wrongly checked test misdirects refinement, while a dropped
correct test only loses signal.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .domain import (
    ExecStatus,
    FormalizedTask,
    PassMatrix,
    ReviewVerdict,
    TestCase,
    VerificationOutcome,
)
from .prompts import Stage
from .prompts.parsers import UnparseableVerdict, parse_verdict

StageCaller = Callable[[Stage, Mapping[str, str]], str]


class EmptyMatrix(Exception):
    pass


def forward_verify(matrix: PassMatrix) -> tuple[set[int], set[int]]:
    """Split tests into (trusted, suspect): trusted iff the whole column is
    pass; fail, error and timeout all count as not passing."""
    if not matrix.candidate_ids or not matrix.test_ids:
        raise EmptyMatrix("pass matrix must have at least one candidate and one test")
    trusted: set[int] = set()
    suspect: set[int] = set()
    for j, test_id in enumerate(matrix.test_ids):
        if all(row[j] is ExecStatus.PASS for row in matrix.grid):
            trusted.add(test_id)
        else:
            suspect.add(test_id)
    return trusted, suspect


def reverse_review(
    call_stage: StageCaller,
    formal: FormalizedTask,
    suspects: list[TestCase],
) -> tuple[set[int], set[int], list[ReviewVerdict]]:
    """Review each suspect independently. Returns (retained, discarded,
    verdict transcript), transcript ordered by test_id."""
    retained: set[int] = set()
    discarded: set[int] = set()
    verdicts: list[ReviewVerdict] = []
    for case in sorted(suspects, key=lambda c: c.test_id):
        context = {
            "task_description": formal.as_prompt_text(),
            "test_case": case.assertion,
        }
        verdict = None
        for _ in range(2):  # one re-prompt for unparseable verdicts
            raw = call_stage(Stage.REVERSE_REVIEW, context)
            try:
                verdict = parse_verdict(raw)
                break
            except UnparseableVerdict:
                continue
        if verdict is None:
            discarded.add(case.test_id)
            verdicts.append(
                ReviewVerdict(test_id=case.test_id, verdict="unparseable",
                              reason="discarded after two unparseable verdicts")
            )
            continue
        is_yes, reason = verdict
        if is_yes:
            retained.add(case.test_id)
        else:
            discarded.add(case.test_id)
        verdicts.append(
            ReviewVerdict(test_id=case.test_id, verdict="yes" if is_yes else "no",
                          reason=reason)
        )
    return retained, discarded, verdicts


def checked_set(outcome: VerificationOutcome) -> set[int]:
    """Tests that may drive refinement and selection: trusted plus retained."""
    return set(outcome.trusted) | set(outcome.retained)
