"""Prompt templates and rendering.

Templates live as data files under ``templates/`` (one file per stage, plus a
``baselines/`` set shipped for reference only). A file has a ``[system]``
section and a ``[user]`` section; placeholders are double-braced names from a
closed set, e.g. ``{{task_description}}``.
"""

from __future__ import annotations

import re
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Mapping

from ..gateway import ChatMessage

TEMPLATES_DIR = Path(__file__).parent / "templates"

PLACEHOLDER_RE = re.compile(r"\{\{(\w+)\}\}")

# Closed set of context keys templates may reference.
KNOWN_PLACEHOLDERS = {
    "natural_language_description",
    "task_description",
    "algorithm_description",
    "efficiency_optimization_suggestions",
    "input_case",
    "test_case",
    "code",
    "corrected_code_candidates",
    "algorithm_count",
}


class Stage(str, Enum):
    FORMALIZE = "formalize"
    FORMALIZE_CHECK = "formalize_check"
    EXPLORE = "explore"
    SUGGEST = "suggest"
    GENERATE = "generate"
    GENERATE_DIRECT = "generate_direct"
    SYNTHESIZE_INPUTS = "synthesize_inputs"
    COMPLETE_TESTS = "complete_tests"
    REFINE = "refine"
    REVERSE_REVIEW = "reverse_review"
    SELECT = "select"


class PromptError(Exception):
    pass


class MissingContextKey(PromptError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"missing or empty context key: {key!r}")


class PromptTemplate:
    def __init__(self, stage: Stage, system_text: str, user_text: str):
        self.stage = stage
        self.system_text = system_text
        self.user_text = user_text

    def placeholders(self) -> set[str]:
        found = set(PLACEHOLDER_RE.findall(self.system_text))
        found |= set(PLACEHOLDER_RE.findall(self.user_text))
        return found


def _split_sections(raw: str) -> tuple[str, str]:
    system_lines: list[str] = []
    user_lines: list[str] = []
    current = None
    for line in raw.splitlines():
        stripped = line.strip()
        if stripped == "[system]":
            current = system_lines
            continue
        if stripped == "[user]":
            current = user_lines
            continue
        if current is not None:
            current.append(line)
    return "\n".join(system_lines).strip("\n"), "\n".join(user_lines).strip("\n")


@lru_cache(maxsize=None)
def load_template(stage: Stage) -> PromptTemplate:
    path = TEMPLATES_DIR / f"{stage.value}.txt"
    if not path.is_file():
        raise PromptError(f"no template file for stage {stage.value!r}: {path}")
    system_text, user_text = _split_sections(path.read_text(encoding="utf-8"))
    if not system_text or not user_text:
        raise PromptError(f"template {path} must contain [system] and [user] sections")
    template = PromptTemplate(stage, system_text, user_text)
    unknown = template.placeholders() - KNOWN_PLACEHOLDERS
    if unknown:
        raise PromptError(f"template {path} uses unknown placeholders: {sorted(unknown)}")
    return template


def _substitute(text: str, context: Mapping[str, str]) -> str:
    for key in PLACEHOLDER_RE.findall(text):
        value = context.get(key)
        if value is None or not str(value).strip():
            raise MissingContextKey(key)
    return PLACEHOLDER_RE.sub(lambda m: str(context[m.group(1)]), text)


def render(stage: Stage, context: Mapping[str, str]) -> list[ChatMessage]:
    """Render a stage template into the fixed system+user message pair."""
    template = load_template(stage)
    return [
        ChatMessage(role="system", content=_substitute(template.system_text, context)),
        ChatMessage(role="user", content=_substitute(template.user_text, context)),
    ]


def unresolved_placeholders(text: str) -> list[str]:
    """Placeholder markers still present in a rendered prompt (should be none)."""
    return PLACEHOLDER_RE.findall(text)
