"""A deterministic scripted stand-in for a temperature-0 model.

Each request is answered purely from the request content plus the static
task fixtures, so recording the scripted responses once and replaying them
later reproduces every byte. Expected test outputs are computed by running
the fixture's expert solution in-process (the fixtures are trusted code
authored alongside the corpus, not sandboxed candidates).
"""

from __future__ import annotations

import json
import re

from task_fixtures import TaskFixture

RETRY_MARKER = "A reviewer found the previous explanation inconsistent"
LCS_V2_MARKER = "including the empty-string case"

INPUT_LINE_RE = re.compile(r"^input: (?P<args>.+)$", re.MULTILINE)
ALGORITHM_HEADER_RE = re.compile(r"^Algorithm (?P<plan>\d+): ", re.MULTILINE)
EXISTING_IMPL_RE = re.compile(r"Existing implementation:\n(?P<code>.*)$", re.DOTALL)


def fenced(code: str, label: str = "python") -> str:
    return f"```{label}\n{code}\n```"


class ScriptedModel:
    def __init__(self, fixtures: list[TaskFixture]):
        self.fixtures = list(fixtures)
        self._expert_ns: dict[str, dict] = {}

    def __call__(self, request) -> str:
        stage = request.request_tag
        user = request.messages[-1].content
        fixture = self._identify(user)
        handler = getattr(self, f"_{stage}", None)
        if handler is None:
            raise LookupError(f"scripted model has no handler for stage {stage!r}")
        return handler(fixture, user)

    def _identify(self, user: str) -> TaskFixture:
        # The task under discussion always comes after any worked examples
        # baked into a template, so the match closest to the end wins.
        best = max(self.fixtures, key=lambda f: user.rfind(f.entry_point))
        if user.rfind(best.entry_point) >= 0:
            return best
        # Suggestion prompts may carry only plan text; match on it instead.
        for fixture in self.fixtures:
            if any(desc in user for desc, _ in fixture.plans):
                return fixture
        raise LookupError("no fixture marker mentioned in prompt")

    def _expert(self, fixture: TaskFixture) -> dict:
        if fixture.task_id not in self._expert_ns:
            namespace: dict = {}
            exec(fixture.expert, namespace)  # trusted fixture code
            self._expert_ns[fixture.task_id] = namespace
        return self._expert_ns[fixture.task_id]

    def _run_expert(self, fixture: TaskFixture, args: str):
        namespace = dict(self._expert(fixture))
        return eval(f"{fixture.entry_point}({args})", namespace)

    # -- stages --------------------------------------------------------------

    def _formalize(self, fixture: TaskFixture, user: str) -> str:
        sections = dict(fixture.formalization)
        if fixture.formalize_retry and RETRY_MARKER not in user:
            # First-pass wording omits the clause the checker insists on.
            sections["edge_cases"] = (
                sections["edge_cases"].split(", " + LCS_V2_MARKER)[0]
            )
        return (
            f"Entry Point Function Name: {fixture.entry_point}\n"
            f"Input/Output Conditions: {sections['io_conditions']}\n"
            f"Parameter Types: {sections['parameter_types']}\n"
            f"Edge Cases: {sections['edge_cases']}\n"
            f"Expected Behavior: {sections['expected_behavior']}"
        )

    def _formalize_check(self, fixture: TaskFixture, user: str) -> str:
        if fixture.formalize_retry and LCS_V2_MARKER not in user:
            return '{"No":"The reason is the edge cases do not cover empty inputs"}'
        return '{"Yes":"NULL"}'

    def _explore(self, fixture: TaskFixture, user: str) -> str:
        blocks = [
            "{algorithm key description: %s}\n{pseudo algorithm: %s}" % (desc, pseudo)
            for desc, pseudo in fixture.plans
        ]
        return "```algorithm1\n" + "\n\n".join(blocks) + "\n```"

    def _suggest(self, fixture: TaskFixture, user: str) -> str:
        return "\n".join(
            f"{i}. {item}" for i, item in enumerate(fixture.suggestions, start=1)
        )

    def _generate(self, fixture: TaskFixture, user: str) -> str:
        header = ALGORITHM_HEADER_RE.search(user)
        if header:
            return fenced(fixture.candidates[int(header.group("plan")) - 1])
        existing = EXISTING_IMPL_RE.search(user)
        if existing:
            return fenced(self._find_known_code(fixture, existing.group("code")))
        return fenced(self._find_known_code(fixture, user))

    def _find_known_code(self, fixture: TaskFixture, text: str) -> str:
        known = list(fixture.candidates) + list(fixture.refine_map.values())
        for code in sorted(known, key=len, reverse=True):
            if code in text:
                return code
        raise LookupError(f"no known candidate code in prompt for {fixture.task_id}")

    def _generate_direct(self, fixture: TaskFixture, user: str) -> str:
        return "\n".join(
            fenced(code, label=f"python{i}")
            for i, code in enumerate(fixture.candidates, start=1)
        )

    def _synthesize_inputs(self, fixture: TaskFixture, user: str) -> str:
        return "\n".join(f"input: {args}" for args in fixture.synth_inputs)

    def _complete_tests(self, fixture: TaskFixture, user: str) -> str:
        args = INPUT_LINE_RE.findall(user)[-1].strip()
        if args in fixture.wrong_outputs:
            expected = fixture.wrong_outputs[args]
        else:
            expected = repr(self._run_expert(fixture, args))
        return f"assert {fixture.entry_point}({args}) == {expected}"

    def _reverse_review(self, fixture: TaskFixture, user: str) -> str:
        assertion = next(
            line.strip() for line in user.splitlines()
            if line.strip().startswith("assert ")
        )
        for args in fixture.unparseable_review:
            if f"{fixture.entry_point}({args})" in assertion:
                return "maybe"
        namespace = dict(self._expert(fixture))
        try:
            exec(assertion, namespace)  # trusted expert + fixture assertion
        except AssertionError:
            return '{"No":"The reason is the expected output does not match the task intent"}'
        except Exception as exc:  # noqa: BLE001 - report as inconsistent input
            return '{"No":"The reason is the input is invalid: %s"}' % type(exc).__name__
        return '{"Yes":"NULL"}'

    def _refine(self, fixture: TaskFixture, user: str) -> str:
        for broken, fixed in fixture.refine_map.items():
            if broken in user:
                return fenced(fixed)
        raise LookupError(f"no refinement scripted for this {fixture.task_id} candidate")

    def _select(self, fixture: TaskFixture, user: str) -> str:
        keys = sorted(json.loads(user), key=int)
        preferred = str(fixture.select_preference)
        choice = preferred if preferred in keys else keys[0]
        return f"```text\n{choice}\n```"
