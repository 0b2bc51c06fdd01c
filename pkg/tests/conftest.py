from __future__ import annotations

import pytest

from perfgen.domain import FormalizedTask


@pytest.fixture
def median_formal() -> FormalizedTask:
    return FormalizedTask(
        entry_point="find_the_median",
        io_conditions="takes an unsorted list of integers, returns a float",
        parameter_types="arr: List[int]",
        edge_cases="single element, duplicates, negative numbers, even length",
        expected_behavior="find the median of the array; for even length the "
                          "average of the two middle numbers",
        source_task_id="median",
    )


class CannedCaller:
    """Stage caller returning scripted responses; records every call.

    Responses are keyed by stage value; a list value is consumed one element
    per call (last element repeats once exhausted).
    """

    def __init__(self, responses: dict):
        self.responses = dict(responses)
        self.calls: list[tuple[str, dict]] = []
        self._cursor: dict[str, int] = {}

    def __call__(self, stage, context):
        key = stage.value if hasattr(stage, "value") else str(stage)
        self.calls.append((key, dict(context)))
        value = self.responses[key]
        if isinstance(value, list):
            i = self._cursor.get(key, 0)
            self._cursor[key] = i + 1
            return value[min(i, len(value) - 1)]
        return value

    def count(self, stage_name: str) -> int:
        return sum(1 for name, _ in self.calls if name == stage_name)


@pytest.fixture
def canned_caller():
    return CannedCaller
