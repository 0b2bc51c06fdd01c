import random

import pytest

from perfgen.domain import (
    ExecStatus,
    PassMatrix,
    VerificationOutcome,
)
from perfgen.domain import TestCase as SynthTest
from perfgen.prompts import Stage
from perfgen.verification import (
    EmptyMatrix,
    checked_set,
    forward_verify,
    reverse_review,
)

STATUSES = [ExecStatus.PASS, ExecStatus.FAIL, ExecStatus.ERROR, ExecStatus.TIMEOUT]


def matrix_from_grid(grid):
    return PassMatrix(
        candidate_ids=list(range(1, len(grid) + 1)),
        test_ids=list(range(1, len(grid[0]) + 1)),
        grid=grid,
    )


def oracle_trusted(grid) -> set[int]:
    """Brute-force column scan: a test is trusted iff its column is all pass."""
    trusted = set()
    for j in range(len(grid[0])):
        if all(row[j] is ExecStatus.PASS for row in grid):
            trusted.add(j + 1)
    return trusted


class TestForwardVerify:
    def test_all_pass_column_is_trusted(self):
        grid = [[ExecStatus.PASS] * 8 for _ in range(5)]
        trusted, suspect = forward_verify(matrix_from_grid(grid))
        assert 7 in trusted and not suspect

    def test_timeout_is_not_a_pass(self):
        grid = [[ExecStatus.PASS] * 4 for _ in range(5)]
        grid[4][2] = ExecStatus.TIMEOUT
        trusted, suspect = forward_verify(matrix_from_grid(grid))
        assert 3 in suspect
        assert trusted == {1, 2, 4}

    def test_random_matrices_match_oracle(self):
        rng = random.Random(42)
        for _ in range(200):
            grid = [
                [rng.choice(STATUSES) for _ in range(20)]
                for _ in range(5)
            ]
            trusted, suspect = forward_verify(matrix_from_grid(grid))
            assert trusted == oracle_trusted(grid)
            assert trusted | suspect == set(range(1, 21))
            assert not (trusted & suspect)

    def test_adding_a_candidate_never_grows_trusted(self):
        rng = random.Random(9)
        for _ in range(50):
            grid = [[rng.choice(STATUSES) for _ in range(10)] for _ in range(4)]
            trusted_before, _ = forward_verify(matrix_from_grid(grid))
            extra_row = [rng.choice(STATUSES) for _ in range(10)]
            trusted_after, _ = forward_verify(matrix_from_grid(grid + [extra_row]))
            assert trusted_after <= trusted_before

    def test_empty_matrix_raises(self):
        with pytest.raises(EmptyMatrix):
            forward_verify(PassMatrix(candidate_ids=[], test_ids=[], grid=[]))
        with pytest.raises(EmptyMatrix):
            forward_verify(PassMatrix(candidate_ids=[1], test_ids=[], grid=[[]]))


def suspect_case(test_id, assertion="assert f(1) == 1"):
    return SynthTest(test_id=test_id, input_repr="1", assertion=assertion)


class TestReverseReview:
    def test_yes_retains(self, median_formal, canned_caller):
        caller = canned_caller({"reverse_review": '{"Yes":"NULL"}'})
        retained, discarded, verdicts = reverse_review(
            caller, median_formal, [suspect_case(4)]
        )
        assert retained == {4} and not discarded
        assert verdicts[0].verdict == "yes"

    def test_no_discards_with_reason(self, median_formal, canned_caller):
        caller = canned_caller(
            {"reverse_review": '{"No":"The reason is expected output is wrong"}'}
        )
        retained, discarded, verdicts = reverse_review(
            caller, median_formal, [suspect_case(2)]
        )
        assert discarded == {2} and not retained
        assert verdicts[0].reason == "expected output is wrong"

    def test_two_unparseable_verdicts_discard(self, median_formal, canned_caller):
        caller = canned_caller({"reverse_review": "maybe"})
        retained, discarded, verdicts = reverse_review(
            caller, median_formal, [suspect_case(6)]
        )
        assert discarded == {6}
        assert caller.count("reverse_review") == 2
        assert verdicts[0].verdict == "unparseable"

    def test_each_suspect_reviewed_independently(self, median_formal, canned_caller):
        caller = canned_caller(
            {"reverse_review": ['{"Yes":"NULL"}', '{"No":"The reason is bad"}']}
        )
        retained, discarded, _ = reverse_review(
            caller, median_formal, [suspect_case(1), suspect_case(2)]
        )
        assert retained == {1} and discarded == {2}

    def test_prompt_contains_assertion_and_task(self, median_formal, canned_caller):
        caller = canned_caller({"reverse_review": '{"Yes":"NULL"}'})
        reverse_review(caller, median_formal, [suspect_case(1, "assert f(9) == 81")])
        stage, context = caller.calls[0]
        assert stage == Stage.REVERSE_REVIEW.value
        assert context["test_case"] == "assert f(9) == 81"
        assert "find the median" in context["task_description"]


class TestCheckedSet:
    def test_union(self):
        outcome = VerificationOutcome(trusted=[1, 2], retained=[5], discarded=[3])
        assert checked_set(outcome) == {1, 2, 5}

    def test_all_discarded_is_empty(self):
        outcome = VerificationOutcome(discarded=[1, 2, 3])
        assert checked_set(outcome) == set()

    def test_partition_property_on_random_outcomes(self):
        rng = random.Random(3)
        for _ in range(200):
            ids = list(range(1, rng.randint(2, 25)))
            rng.shuffle(ids)
            cut1 = rng.randint(0, len(ids))
            cut2 = rng.randint(cut1, len(ids))
            outcome = VerificationOutcome(
                trusted=sorted(ids[:cut1]),
                retained=sorted(ids[cut1:cut2]),
                discarded=sorted(ids[cut2:]),
            )
            union = set(outcome.trusted) | set(outcome.retained) | set(outcome.discarded)
            assert union == set(ids)
            assert checked_set(outcome) == set(outcome.trusted) | set(outcome.retained)
