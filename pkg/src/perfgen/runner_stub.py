"""Minimal in-subprocess suite runner speaking the sandbox line protocol.

Protocol: one JSON document on stdin
    {"candidate_source": str, "assertions": [str, ...], "mode": "functional"|"timed",
     "repeats": int}
and one JSON object per assertion on stdout, flushed per line:
    {"index": int, "status": "pass"|"fail"|"error", "message": str,
     "times": [seconds, ...]}
A source that fails to load produces a single fatal line with index -1.

This runner times the whole assertion statement; the hardened shim package
narrows timing to the call expression. Keep this module dependency-free: it
runs inside the untrusted-code interpreter.
"""

import gc
import json
import sys
import time


def _emit(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def main():
    doc = json.load(sys.stdin)
    code = doc["candidate_source"]
    assertions = doc.get("assertions", [])
    mode = doc.get("mode", "functional")
    repeats = max(1, int(doc.get("repeats", 1)))

    namespace = {"__name__": "__candidate__"}
    try:
        exec(compile(code, "<candidate>", "exec"), namespace)
    except BaseException as exc:  # noqa: BLE001 - candidate code may raise anything
        _emit({"index": -1, "status": "error",
               "message": "%s: %s" % (type(exc).__name__, exc), "times": []})
        return

    if mode == "timed":
        # Collector pauses would land on arbitrary repeats and skew the
        # comparison between separately measured processes.
        gc.disable()

    for index, line in enumerate(assertions):
        status, message, times = "pass", "", []
        try:
            compiled = compile(line, "<test-%d>" % index, "exec")
        except SyntaxError as exc:
            _emit({"index": index, "status": "error",
                   "message": "SyntaxError: %s" % exc, "times": []})
            continue
        try:
            if mode == "timed":
                # One untimed warmup settles caches and lazy imports so the
                # recorded repeats measure steady-state behavior.
                exec(compiled, dict(namespace))
                for _ in range(repeats):
                    scope = dict(namespace)
                    start = time.perf_counter()
                    exec(compiled, scope)
                    times.append(time.perf_counter() - start)
            else:
                exec(compiled, dict(namespace))
        except AssertionError as exc:
            status, message = "fail", str(exc)
        except BaseException as exc:  # noqa: BLE001
            status, message = "error", "%s: %s" % (type(exc).__name__, exc)
        _emit({"index": index, "status": status, "message": message, "times": times})


if __name__ == "__main__":
    main()
