"""Task corpus on disk: a directory of per-task JSON documents plus a manifest.

Layout::

    <root>/manifest.json        {"task_ids": ["a", "b", ...]}
    <root>/tasks/<task_id>.json one Task document, field names as in domain.Task
"""

from __future__ import annotations

import json
from pathlib import Path

from .domain import Task, validate_task

MANIFEST_NAME = "manifest.json"
TASKS_DIR = "tasks"


class CorpusError(Exception):
    pass


def load_task_file(path: Path) -> Task:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"unreadable task file {path}: {exc}") from exc
    try:
        return Task.model_validate(payload)
    except Exception as exc:
        raise CorpusError(f"invalid task document {path}: {exc}") from exc


def load_corpus(root: Path | str) -> list[Task]:
    """Load every task listed in the manifest, in manifest order."""
    root = Path(root)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise CorpusError(f"missing corpus manifest: {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CorpusError(f"malformed manifest {manifest_path}: {exc}") from exc
    task_ids = manifest.get("task_ids")
    if not isinstance(task_ids, list) or not task_ids:
        raise CorpusError("manifest must list at least one task_id")
    if len(set(task_ids)) != len(task_ids):
        raise CorpusError("duplicate task_id in manifest")

    tasks = []
    for task_id in task_ids:
        task = load_task_file(root / TASKS_DIR / f"{task_id}.json")
        if task.task_id != task_id:
            raise CorpusError(
                f"task_id mismatch: manifest says {task_id!r}, file says {task.task_id!r}"
            )
        violations = validate_task(task)
        if violations:
            raise CorpusError(f"task {task_id} violates invariants: {violations}")
        tasks.append(task)
    return tasks


def write_corpus(root: Path | str, tasks: list[Task]) -> None:
    root = Path(root)
    (root / TASKS_DIR).mkdir(parents=True, exist_ok=True)
    ids = [t.task_id for t in tasks]
    if len(set(ids)) != len(ids):
        raise CorpusError("duplicate task_id in corpus")
    for task in tasks:
        path = root / TASKS_DIR / f"{task.task_id}.json"
        path.write_text(
            json.dumps(task.model_dump(mode="json"), indent=2) + "\n", encoding="utf-8"
        )
    (root / MANIFEST_NAME).write_text(
        json.dumps({"task_ids": ids}, indent=2) + "\n", encoding="utf-8"
    )
