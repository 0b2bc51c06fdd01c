"""Parsers for the structured shapes model responses are asked to produce.

Every parser is pure and total over arbitrary text: it either returns its
result or raises one of the declared error values below, never anything else.
The grammars are deliberately narrow (fenced code blocks, brace-delimited
algorithm blocks, ``input:`` lines, single-line asserts, yes/no verdicts) and
salvage what they can from partially malformed responses.
"""

from __future__ import annotations

import ast
import json
import re
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class ParseError(Exception):
    pass


class NoCodeBlockFound(ParseError):
    pass


class NoAlgorithmBlocks(ParseError):
    pass


class UnparseableVerdict(ParseError):
    pass


class InvalidSelection(ParseError):
    pass


FENCE_RE = re.compile(
    r"^```[ \t]*(?P<label>[\w-]*)[ \t]*\n(?P<body>.*?)^```[ \t]*$",
    re.DOTALL | re.MULTILINE,
)

CODE_LABEL_RE = re.compile(r"^(?:python(?P<num>\d+)?|py)?$", re.IGNORECASE)

# Brace-free capture keeps a malformed block from swallowing its neighbors;
# the brace-delimited format cannot nest braces anyway.
ALGORITHM_BLOCK_RE = re.compile(
    r"\{algorithm key description:(?P<desc>[^{}]*)\}\s*\{pseudo algorithm:(?P<pseudo>[^{}]*)\}",
    re.DOTALL | re.IGNORECASE,
)

COMPLEXITY_RE = re.compile(r"O\([^()]*(?:\([^()]*\)[^()]*)*\)")

VERDICT_JSON_RE = re.compile(r'\{\s*"?(?P<word>yes|no)"?\s*:\s*"(?P<reason>.*?)"\s*\}',
                             re.IGNORECASE | re.DOTALL)

SUGGESTION_ITEM_RE = re.compile(r"^\s*(?:\d+[.)]\s+|[-*]\s+)(?P<item>.+?)\s*$")

SELECTION_FENCE_RE = re.compile(r"```[ \t]*text[ \t]*\n\s*(?P<key>\d+)\s*```",
                                re.DOTALL | re.IGNORECASE)


def parse_code_blocks(raw: str) -> list[str]:
    """Extract fenced code blocks, in order.

    Accepts ```` ```python ````, bare ```` ``` ```` and the numbered labels
    ```` ```python1 ```` .. ```` ```python5 ```` used by direct multi-solution
    prompts; when every labeled block is numbered, blocks come back in label
    order rather than document order.
    """
    hits: list[tuple[Optional[int], int, str]] = []
    for pos, match in enumerate(FENCE_RE.finditer(raw)):
        label_match = CODE_LABEL_RE.match(match.group("label") or "")
        if not label_match:
            continue  # fence labeled as something other than code
        body = match.group("body").strip("\n").rstrip()
        if not body.strip():
            continue
        num = label_match.group("num")
        hits.append((int(num) if num else None, pos, body))
    if not hits:
        raise NoCodeBlockFound("no fenced code block in response")
    if all(num is not None for num, _, _ in hits):
        hits.sort(key=lambda h: h[0])
    return [body for _, _, body in hits]


def parse_algorithm_blocks(raw: str) -> list[tuple[str, str]]:
    """Extract (key_description, pseudocode) pairs; salvages well-formed pairs
    out of partially malformed responses. Raises when nothing parses."""
    drafts: list[tuple[str, str]] = []
    for match in ALGORITHM_BLOCK_RE.finditer(raw):
        desc = match.group("desc").strip()
        pseudo = match.group("pseudo").strip()
        if desc and pseudo:
            drafts.append((desc, pseudo))
    if not drafts:
        raise NoAlgorithmBlocks("no algorithm description/pseudocode pairs in response")
    return drafts


def extract_complexity(text: str) -> str:
    """First big-O statement in a text, or ""."""
    match = COMPLEXITY_RE.search(text)
    return match.group(0) if match else ""


def parse_test_inputs(raw: str) -> list[str]:
    """Lines of the form ``input: <repr>``; prefix stripped, first-occurrence
    deduplication. Empty list when nothing matches."""
    seen: list[str] = []
    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped.lower().startswith("input:"):
            continue
        value = stripped[len("input:"):].strip()
        if value and value not in seen:
            seen.append(value)
    return seen


def _is_single_assert(line: str) -> bool:
    try:
        tree = ast.parse(line)
    except SyntaxError:
        return False
    return len(tree.body) == 1 and isinstance(tree.body[0], ast.Assert)


def parse_assertions(raw: str) -> list[str]:
    """Physical lines that are complete single-line assert statements.

    Multi-line constructs (backslash continuation, open brackets) fail to
    parse standalone and are rejected, which enforces the single-line rule.
    """
    found: list[str] = []
    for line in raw.splitlines():
        stripped = line.strip()
        if not stripped.startswith("assert"):
            continue
        if _is_single_assert(stripped):
            found.append(stripped)
    return found


def parse_verdict(raw: str) -> tuple[bool, str]:
    """Recognize the ``{"Yes":"NULL"}`` / ``{"No":"The reason is ..."}``
    shapes, falling back to a leading Yes/No token. Returns (is_yes, reason)."""
    match = VERDICT_JSON_RE.search(raw)
    if match:
        is_yes = match.group("word").lower() == "yes"
        reason = match.group("reason").strip()
        if is_yes:
            return True, ""
        reason = re.sub(r"^the reason is\b[:\s]*", "", reason, flags=re.IGNORECASE).strip()
        return False, reason
    token = re.match(r'\s*["\']?(yes|no)\b["\']?[.:,]?\s*(?P<rest>.*)', raw,
                     re.IGNORECASE | re.DOTALL)
    if token:
        is_yes = token.group(1).lower() == "yes"
        reason = "" if is_yes else token.group("rest").strip()
        return is_yes, reason
    raise UnparseableVerdict(f"no yes/no verdict in response: {raw[:80]!r}")


def parse_selection(raw: str) -> int:
    """Candidate key from a selection response (```` ```text\\n<key>\\n``` ````
    or a bare integer)."""
    match = SELECTION_FENCE_RE.search(raw)
    if match:
        return int(match.group("key"))
    stripped = raw.strip().strip("`")
    if re.fullmatch(r"\d+", stripped):
        return int(stripped)
    raise InvalidSelection(f"no candidate key in selection response: {raw[:80]!r}")


def parse_suggestions(raw: str) -> list[str]:
    """Numbered or bulleted list items, in order."""
    items: list[str] = []
    for line in raw.splitlines():
        match = SUGGESTION_ITEM_RE.match(line)
        if match:
            items.append(match.group("item"))
    return items


_FORMALIZATION_HEADINGS = {
    "io_conditions": ("input/output conditions",),
    "parameter_types": ("parameter types", "edge cases and parameter types"),
    "edge_cases": ("edge cases", "edge cases and parameter types"),
    "expected_behavior": ("expected behavior",),
}

_HEADING_LINE_RE = re.compile(
    r"^\s*(?:[-*#\d.)\s]*)\s*(?P<name>entry point function name|input/output conditions"
    r"|edge cases and parameter types|parameter types|edge cases|expected behavior)"
    r"\s*[:\-]\s*(?P<rest>.*)$",
    re.IGNORECASE,
)


def parse_formalization_sections(raw: str) -> dict[str, str]:
    """Split a formalization response into its dimension sections.

    Returns whichever of io_conditions / parameter_types / edge_cases /
    expected_behavior / entry_point could be located; missing sections are
    simply absent from the result (the caller decides how to degrade).
    """
    sections: dict[str, list[str]] = {}
    current: Optional[str] = None
    for line in raw.splitlines():
        match = _HEADING_LINE_RE.match(line)
        if match:
            name = match.group("name").lower()
            rest = match.group("rest").strip()
            if name == "entry point function name":
                if rest:
                    sections.setdefault("entry_point", []).append(rest)
                current = "entry_point"
                continue
            keys = [k for k, aliases in _FORMALIZATION_HEADINGS.items() if name in aliases]
            for key in keys:
                sections.setdefault(key, [])
                if rest:
                    sections[key].append(rest)
            current = keys[-1] if keys else None
            continue
        if current is not None and line.strip():
            sections.setdefault(current, []).append(line.strip())
    return {k: "\n".join(v).strip() for k, v in sections.items() if v}


class ParsedBlocks(BaseModel):
    """Every structured shape found in one raw response, order preserved."""

    model_config = ConfigDict(frozen=True)

    code_blocks: list[str] = Field(default_factory=list)
    algorithm_blocks: list[tuple[str, str]] = Field(default_factory=list)
    input_lines: list[str] = Field(default_factory=list)
    assertion_lines: list[str] = Field(default_factory=list)
    verdict: Optional[tuple[bool, str]] = None

    @classmethod
    def from_text(cls, raw: str) -> "ParsedBlocks":
        try:
            code_blocks = parse_code_blocks(raw)
        except NoCodeBlockFound:
            code_blocks = []
        try:
            algorithm_blocks = parse_algorithm_blocks(raw)
        except NoAlgorithmBlocks:
            algorithm_blocks = []
        try:
            verdict = parse_verdict(raw)
        except UnparseableVerdict:
            verdict = None
        return cls(
            code_blocks=code_blocks,
            algorithm_blocks=algorithm_blocks,
            input_lines=parse_test_inputs(raw),
            assertion_lines=parse_assertions(raw),
            verdict=verdict,
        )


def render_candidates_json(candidates: dict[int, str]) -> str:
    """The INPUT shape of the selection prompt: candidate id -> code."""
    return json.dumps({str(k): v for k, v in sorted(candidates.items())}, indent=1)
