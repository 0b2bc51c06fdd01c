"""Conformance suite for the runner shim's line protocol.

Twelve candidate/assertion fixtures drive the shim purely over its external
interface (JSON document on stdin, newline-delimited JSON on stdout): pass,
fail, raise, import-error, syntax-error, mixed sequences, timed runs,
call-expression isolation, and hang-after-N flushing. The final fixtures
check functional/timed status agreement on everything that passes.
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

SHIM = Path(__file__).resolve().parents[1] / "runner_shim.py"

IDENTITY = "def f(x):\n    return x"

SLEEPY = "import time\n\ndef f(x):\n    time.sleep(0.010)\n    return x"

HANG_ON_THIRD = (
    "def f(x):\n"
    "    if x == 3:\n"
    "        while True:\n"
    "            pass\n"
    "    return x"
)


def run_shim(source: str, assertions: list[str], mode: str = "functional",
             repeats: int = 1, timeout: float | None = 10.0):
    doc = {"candidate_source": source, "assertions": assertions,
           "mode": mode, "repeats": repeats}
    proc = subprocess.Popen(
        [sys.executable, str(SHIM)],
        stdin=subprocess.PIPE, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
        text=True,
    )
    try:
        out, err = proc.communicate(json.dumps(doc), timeout=timeout)
    except subprocess.TimeoutExpired:
        proc.kill()
        out, err = proc.communicate()
        return [json.loads(line) for line in out.splitlines() if line.strip()], None, err
    lines = [json.loads(line) for line in out.splitlines() if line.strip()]
    return lines, proc.returncode, err


def sequence(lines):
    return [(line["index"], line["status"]) for line in lines]


class TestLineSequences:
    def test_01_single_pass(self):
        lines, rc, _ = run_shim(IDENTITY, ["assert f(1) == 1"])
        assert sequence(lines) == [(0, "pass")]
        assert rc == 0

    def test_02_single_fail(self):
        lines, rc, _ = run_shim(IDENTITY, ["assert f(1) == 2"])
        assert sequence(lines) == [(0, "fail")]
        assert rc == 0

    def test_03_raise_reports_error_with_message(self):
        source = "def f(x):\n    raise ValueError('broken input')"
        lines, rc, _ = run_shim(source, ["assert f(1) == 1"])
        assert sequence(lines) == [(0, "error")]
        assert "ValueError" in lines[0]["message"]
        assert "broken input" in lines[0]["message"]
        assert rc == 0

    def test_04_import_error_is_single_fatal_line(self):
        source = "import does_not_exist_anywhere\n\ndef f(x):\n    return x"
        lines, rc, _ = run_shim(source, ["assert f(1) == 1", "assert f(2) == 2"])
        assert sequence(lines) == [(-1, "error")]
        assert "ModuleNotFoundError" in lines[0]["message"]
        assert rc == 0

    def test_05_syntax_error_source_is_fatal(self):
        lines, _, _ = run_shim("def broken(:", ["assert True"])
        assert sequence(lines) == [(-1, "error")]

    def test_06_bad_assertion_syntax_does_not_stop_suite(self):
        lines, _, _ = run_shim(
            IDENTITY,
            ["assert f(1) ==", "assert f(2) == 2"],
        )
        assert sequence(lines) == [(0, "error"), (1, "pass")]

    def test_07_mixed_statuses_in_order(self):
        source = (
            "def f(x):\n"
            "    if x == 9:\n"
            "        raise RuntimeError('nine')\n"
            "    return x"
        )
        lines, _, _ = run_shim(
            source,
            ["assert f(1) == 1", "assert f(2) == 3", "assert f(9) == 9",
             "assert f(4) == 4"],
        )
        assert sequence(lines) == [(0, "pass"), (1, "fail"), (2, "error"), (3, "pass")]

    def test_08_empty_suite_emits_nothing(self):
        lines, rc, _ = run_shim(IDENTITY, [])
        assert lines == []
        assert rc == 0


class TestTimedMode:
    def test_09_times_have_length_repeats(self):
        lines, _, _ = run_shim(SLEEPY, ["assert f(5) == 5"], mode="timed", repeats=3)
        assert sequence(lines) == [(0, "pass")]
        times = lines[0]["times"]
        assert len(times) == 3
        assert all(0.010 <= t < 0.010 + 0.025 for t in times)

    def test_10_call_expression_isolation(self):
        # The comparison side is deliberately expensive; timing only the call
        # keeps it out of the measurement.
        source = "def f(x):\n    return 20009900000"
        assertion = "assert f(1) == sum(range(200000)) + 10000000"
        assert sum(range(200000)) + 10000000 == 20009900000
        lines, _, _ = run_shim(source, [assertion], mode="timed", repeats=3)
        assert sequence(lines) == [(0, "pass")]
        assert lines[0]["message"] == ""  # call was isolated
        # Summing 200k ints takes milliseconds; the bare call is microseconds.
        assert min(lines[0]["times"]) < 0.002

    def test_11_no_isolatable_call_times_whole_assertion(self):
        lines, _, _ = run_shim("x = 41", ["assert x + 1 == 42"], mode="timed",
                               repeats=2)
        assert sequence(lines) == [(0, "pass")]
        assert lines[0]["message"] == "timed whole assertion (no isolatable call)"
        assert len(lines[0]["times"]) == 2

    def test_12_hang_after_two_loses_only_later_tests(self):
        lines, rc, _ = run_shim(
            HANG_ON_THIRD,
            ["assert f(1) == 1", "assert f(2) == 2", "assert f(3) == 3",
             "assert f(4) == 4"],
            mode="timed", repeats=1, timeout=2.0,
        )
        # Killed mid-hang: the first two lines were flushed, nothing after.
        assert rc is None
        assert sequence(lines) == [(0, "pass"), (1, "pass")]


class TestFunctionalTimedAgreement:
    @pytest.mark.parametrize("source,assertions", [
        (IDENTITY, ["assert f(1) == 1", "assert f(-3) == -3"]),
        (SLEEPY, ["assert f(2) == 2"]),
        ("def g(items):\n    return sorted(items)",
         ["assert g([3, 1]) == [1, 3]", "assert g([]) == []"]),
    ])
    def test_passing_fixtures_agree_across_modes(self, source, assertions):
        functional, _, _ = run_shim(source, assertions, mode="functional")
        timed, _, _ = run_shim(source, assertions, mode="timed", repeats=2)
        assert sequence(functional) == sequence(timed)
        assert all(status == "pass" for _, status in sequence(functional))
        for line in timed:
            assert len(line["times"]) == 2

    def test_failing_fixture_agrees_too(self):
        assertions = ["assert f(1) == 9"]
        functional, _, _ = run_shim(IDENTITY, assertions, mode="functional")
        timed, _, _ = run_shim(IDENTITY, assertions, mode="timed", repeats=2)
        assert sequence(functional) == sequence(timed) == [(0, "fail")]
        assert timed[0]["times"] == []  # only passing tests are timed
