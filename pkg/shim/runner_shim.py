#!/usr/bin/env python3
"""In-subprocess test runner: loads one candidate source, judges each
assertion, and reports one structured line per test.

Wire protocol (the only interface to the supervising process):

* stdin - one JSON document:
      {"candidate_source": str, "assertions": [str, ...],
       "mode": "functional" | "timed", "repeats": int}
* stdout - one JSON object per assertion, flushed before the next test
  starts (a later hang therefore loses only later tests):
      {"index": int, "status": "pass" | "fail" | "error",
       "message": str, "times": [seconds, ...]}
  A source that fails to load produces a single fatal line with index -1
  and no per-test lines.
* exit code - 0 unless the shim itself is broken.

In timed mode each assertion is parsed to isolate its call expression (the
leftmost call in the comparison); only that call is timed, ``repeats`` times
after one warmup, so import and comparison overhead stay out of the numbers.
When no call can be isolated the whole assertion is timed and the report
message says so. Pass/fail status always comes from evaluating the complete
assertion.

Assertions run in a copy of a namespace holding only the candidate's
definitions plus builtins, mirroring single-file benchmark solutions. Only
the standard library is imported here: this module rides along with
untrusted code.
"""

import ast
import gc
import json
import sys
import time

FUNCTIONAL = "functional"
TIMED = "timed"


def emit(index, status, message="", times=None):
    sys.stdout.write(json.dumps({
        "index": index,
        "status": status,
        "message": message,
        "times": times or [],
    }) + "\n")
    sys.stdout.flush()


def load_candidate(source):
    namespace = {"__name__": "__candidate__"}
    exec(compile(source, "<candidate>", "exec"), namespace)
    return namespace


def isolate_call(assertion_line):
    """The timing target of an assertion: the leftmost call expression.

    Returns a compiled eval-mode code object, or None when the assertion has
    no isolatable call (then the caller times the whole statement).
    """
    tree = ast.parse(assertion_line)
    if len(tree.body) != 1 or not isinstance(tree.body[0], ast.Assert):
        return None
    test = tree.body[0].test
    target = None
    if isinstance(test, ast.Call):
        target = test
    elif isinstance(test, ast.Compare) and isinstance(test.left, ast.Call):
        target = test.left
    elif isinstance(test, ast.UnaryOp) and isinstance(test.operand, ast.Call):
        target = test.operand
    if target is None:
        return None
    expression = ast.Expression(body=target)
    ast.fix_missing_locations(expression)
    return compile(expression, "<call>", "eval")


def judge(compiled_assertion, namespace):
    """(status, message) of one full-assertion evaluation."""
    try:
        exec(compiled_assertion, dict(namespace))
    except AssertionError as exc:
        return "fail", str(exc)
    except BaseException as exc:  # noqa: BLE001 - candidate code may raise anything
        return "error", "%s: %s" % (type(exc).__name__, exc)
    return "pass", ""


def time_call(code_object, namespace, repeats):
    """Wall times of the isolated call, one warmup plus ``repeats`` runs.

    Raises whatever the call raises; the caller already judged the full
    assertion, so an exception here only happens for calls whose failure the
    assertion swallowed - report it as an unmeasurable timing.
    """
    eval(code_object, dict(namespace))  # warmup
    times = []
    for _ in range(repeats):
        scope = dict(namespace)
        start = time.perf_counter()
        eval(code_object, scope)
        times.append(time.perf_counter() - start)
    return times


def run_test(index, line, namespace, mode, repeats):
    try:
        compiled = compile(line, "<test-%d>" % index, "exec")
    except SyntaxError as exc:
        emit(index, "error", "SyntaxError: %s" % exc)
        return

    status, message = judge(compiled, namespace)
    if mode != TIMED:
        emit(index, status, message)
        return

    times = []
    if status == "pass":
        call = None
        try:
            call = isolate_call(line)
        except SyntaxError:
            call = None
        try:
            if call is not None:
                times = time_call(call, namespace, repeats)
            else:
                message = "timed whole assertion (no isolatable call)"
                times = time_whole(compiled, namespace, repeats)
        except BaseException as exc:  # noqa: BLE001
            status, message = "error", "timing failed: %s: %s" % (
                type(exc).__name__, exc)
            times = []
    emit(index, status, message, times)


def time_whole(compiled, namespace, repeats):
    exec(compiled, dict(namespace))  # warmup
    times = []
    for _ in range(repeats):
        scope = dict(namespace)
        start = time.perf_counter()
        exec(compiled, scope)
        times.append(time.perf_counter() - start)
    return times


def main():
    command = json.load(sys.stdin)
    source = command["candidate_source"]
    assertions = command.get("assertions", [])
    mode = command.get("mode", FUNCTIONAL)
    repeats = max(1, int(command.get("repeats", 1)))

    try:
        namespace = load_candidate(source)
    except BaseException as exc:  # noqa: BLE001
        emit(-1, "error", "%s: %s" % (type(exc).__name__, exc))
        return

    if mode == TIMED:
        # Collector pauses would land on arbitrary repeats; keep them out of
        # the measurements entirely.
        gc.disable()

    for index, line in enumerate(assertions):
        run_test(index, line, namespace, mode, repeats)


if __name__ == "__main__":
    main()
