"""Supervised execution of untrusted candidate code in interpreter subprocesses.

Two modes:

* functional - one subprocess per assertion, so a timeout or crash is
  attributed to exactly one test and cannot leak into the next.
* timed - one warm subprocess per candidate suite (avoids paying interpreter
  startup per measurement); the child reports per-repeat wall times and the
  supervisor takes the minimum per test as that test's time.

Isolation is process + timeout + temp working directory; there is no
OS-level hard sandboxing, which is adequate for a desk-scale harness and
documented as such. Timed runs are globally serialized so measurements never
compete for cores with each other or with functional runs issued here.
"""

from __future__ import annotations

import json
import os
import queue
import subprocess
import sys
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from .domain import ExecStatus

DEFAULT_RUNNER = Path(__file__).parent / "runner_stub.py"

# Headroom added to the child's per-test budget for interpreter startup and
# kill latency; keeps total kill time under per_test_timeout + 1 s.
STARTUP_GRACE = 0.5

_TIMED_LOCK = threading.Lock()


def _child_env() -> dict[str, str]:
    # Deterministic hashing keeps dict/str-heavy candidates comparable across
    # the separate interpreter processes that time them.
    env = dict(os.environ)
    env["PYTHONHASHSEED"] = "0"
    env["PYTHONDONTWRITEBYTECODE"] = "1"
    return env


class SandboxError(Exception):
    pass


class SandboxSpawnFailure(SandboxError):
    pass


class ShimProtocolError(SandboxError):
    pass


class ExecMode(str, Enum):
    FUNCTIONAL = "functional"
    TIMED = "timed"


class ExecRequest(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: str
    assertions: list[str]
    per_test_timeout: float = Field(default=5.0, gt=0.0)
    mode: ExecMode = ExecMode.FUNCTIONAL
    repeats: int = Field(default=1, ge=1)


class TestExecution(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    status: ExecStatus
    message: str = ""
    best_time: Optional[float] = None
    times: list[float] = Field(default_factory=list)


class ExecOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    per_test: list[TestExecution]
    suite_wall_clock: float
    worst_time: Optional[float] = None

    @property
    def all_passed(self) -> bool:
        return all(t.status is ExecStatus.PASS for t in self.per_test)

    def pass_count(self) -> int:
        return sum(1 for t in self.per_test if t.status is ExecStatus.PASS)


def _parse_report_line(line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ShimProtocolError(f"malformed report line {line!r}: {exc}") from exc
    if not isinstance(obj, dict) or "index" not in obj or "status" not in obj:
        raise ShimProtocolError(f"incomplete report line {line!r}")
    if obj["status"] not in ("pass", "fail", "error", "timeout"):
        raise ShimProtocolError(f"unknown status in report line {line!r}")
    return obj


class Sandbox:
    """Spawns the configured interpreter with a runner script per execution."""

    def __init__(
        self,
        interpreter: Optional[str] = None,
        runner_script: Optional[Path | str] = None,
        workers: int = 4,
    ):
        self.interpreter = interpreter or sys.executable
        self.runner_script = Path(runner_script) if runner_script else DEFAULT_RUNNER
        self.workers = max(1, workers)
        if not self.runner_script.is_file():
            raise SandboxError(f"runner script not found: {self.runner_script}")

    # -- functional ---------------------------------------------------------

    def run_functional(self, request: ExecRequest) -> ExecOutcome:
        """Judge each assertion in its own subprocess; failures never cascade."""
        started = time.perf_counter()
        results = [
            self._run_single_assertion(request.code, assertion, i, request.per_test_timeout)
            for i, assertion in enumerate(request.assertions)
        ]
        return ExecOutcome(
            per_test=results,
            suite_wall_clock=time.perf_counter() - started,
            worst_time=None,
        )

    def run_functional_many(self, requests: list[ExecRequest]) -> list[ExecOutcome]:
        """Functional runs for several candidates in parallel, order preserved."""
        if len(requests) <= 1:
            return [self.run_functional(r) for r in requests]
        with ThreadPoolExecutor(max_workers=min(self.workers, len(requests))) as pool:
            return list(pool.map(self.run_functional, requests))

    def _run_single_assertion(
        self, code: str, assertion: str, index: int, timeout: float
    ) -> TestExecution:
        doc = {"candidate_source": code, "assertions": [assertion],
               "mode": "functional", "repeats": 1}
        with tempfile.TemporaryDirectory(prefix="perfgen-exec-") as workdir:
            try:
                proc = subprocess.run(
                    [self.interpreter, str(self.runner_script)],
                    input=json.dumps(doc),
                    capture_output=True,
                    text=True,
                    timeout=timeout + STARTUP_GRACE,
                    cwd=workdir,
                    env=_child_env(),
                )
            except subprocess.TimeoutExpired:
                return TestExecution(
                    index=index,
                    status=ExecStatus.TIMEOUT,
                    message=f"timed out after {timeout}s",
                )
            except OSError as exc:
                raise SandboxSpawnFailure(f"cannot spawn interpreter: {exc}") from exc

        lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
        if not lines:
            raise ShimProtocolError(
                f"runner produced no report (rc={proc.returncode}, stderr={proc.stderr[:200]!r})"
            )
        report = _parse_report_line(lines[-1])
        # A fatal load line (index -1) is attributed to this test.
        return TestExecution(
            index=index,
            status=ExecStatus(report["status"]),
            message=report.get("message", ""),
        )

    # -- timed --------------------------------------------------------------

    def run_timed(self, request: ExecRequest) -> ExecOutcome:
        """Measure the suite in one warm subprocess; requires a candidate that
        already passed functionally. Serialized against all other timed runs."""
        with _TIMED_LOCK:
            return self._run_timed_locked(request)

    def _run_timed_locked(self, request: ExecRequest) -> ExecOutcome:
        started = time.perf_counter()
        doc = {
            "candidate_source": request.code,
            "assertions": request.assertions,
            "mode": "timed",
            "repeats": request.repeats,
        }
        n = len(request.assertions)
        results: dict[int, TestExecution] = {}

        with tempfile.TemporaryDirectory(prefix="perfgen-timed-") as workdir:
            try:
                proc = subprocess.Popen(
                    [self.interpreter, str(self.runner_script)],
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                    stderr=subprocess.DEVNULL,
                    text=True,
                    cwd=workdir,
                    env=_child_env(),
                )
            except OSError as exc:
                raise SandboxSpawnFailure(f"cannot spawn interpreter: {exc}") from exc

            lines: queue.Queue[Optional[str]] = queue.Queue()

            def _feed() -> None:
                try:
                    proc.stdin.write(json.dumps(doc))
                    proc.stdin.close()
                except OSError:
                    pass

            def _read() -> None:
                for line in proc.stdout:
                    lines.put(line)
                lines.put(None)

            threading.Thread(target=_feed, daemon=True).start()
            threading.Thread(target=_read, daemon=True).start()

            fatal = None
            expected = 0
            # Per-line deadline: one test budget (repeats included) + grace;
            # the first line also absorbs interpreter startup.
            per_line_budget = request.per_test_timeout * request.repeats + STARTUP_GRACE
            while expected < n:
                try:
                    line = lines.get(timeout=per_line_budget + (2.0 if expected == 0 else 0.0))
                except queue.Empty:
                    proc.kill()
                    break
                if line is None:
                    break  # child exited; remaining tests are missing
                if not line.strip():
                    continue
                report = _parse_report_line(line)
                if report["index"] == -1:
                    fatal = report
                    break
                times = [float(t) for t in report.get("times", [])]
                results[report["index"]] = TestExecution(
                    index=report["index"],
                    status=ExecStatus(report["status"]),
                    message=report.get("message", ""),
                    best_time=min(times) if times else None,
                    times=times,
                )
                expected = len(results)

            proc.kill()
            proc.wait()

        per_test = []
        for i in range(n):
            if i in results:
                per_test.append(results[i])
            elif fatal is not None:
                per_test.append(
                    TestExecution(index=i, status=ExecStatus.ERROR,
                                  message=fatal.get("message", "load failure"))
                )
            else:
                per_test.append(
                    TestExecution(index=i, status=ExecStatus.TIMEOUT,
                                  message=f"no report within {request.per_test_timeout}s budget")
                )

        timed_out = any(t.status is ExecStatus.TIMEOUT for t in per_test)
        passing_times = [
            t.best_time for t in per_test
            if t.status is ExecStatus.PASS and t.best_time is not None
        ]
        worst = None if (timed_out or not passing_times) else max(passing_times)
        return ExecOutcome(
            per_test=per_test,
            suite_wall_clock=time.perf_counter() - started,
            worst_time=worst,
        )
