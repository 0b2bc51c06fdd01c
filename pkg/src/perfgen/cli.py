"""Operator CLI: a thin client of the HTTP service.

Without ``--server`` the commands talk to an in-process instance of the app
over an ASGI test transport (no socket, same wire format), so everything
works offline; with ``--server URL`` the same requests go to a running
``perfgen serve`` instance. Exit codes: 0 on success, 1 when any
infrastructure (non-model) failure occurred, 2 for usage errors.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

import click
import httpx

from .gateway import ENV_API_KEY, ENV_ENDPOINT
from .service import create_app


class ServiceClient:
    def __init__(self, server: Optional[str]):
        if server:
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.filterwarnings(
                    "ignore", message="Using `httpx` with `starlette.testclient`"
                )
                from fastapi.testclient import TestClient

            self._client = TestClient(create_app())

    def post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise click.ClickException(f"cannot reach service: {exc}") from exc
        if response.status_code != 200:
            detail = response.json().get("detail", response.text)
            raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
        return response.json()


def _provider_options(fn):
    decorators = [
        click.option("--provider", type=click.Choice(["live", "replay", "record"]),
                     default="replay", show_default=True,
                     help="Model provider mode."),
        click.option("--replay-store", "replay_dir", type=click.Path(),
                     help="Replay store directory (required for replay/record)."),
        click.option("--model", "model_name", default="", help="Model name."),
        click.option("--endpoint", default=None,
                     help=f"Chat-completions endpoint URL (or ${ENV_ENDPOINT})."),
        click.option("--variant", default="full", show_default=True,
                     type=click.Choice(["full", "variant1_no_logic", "variant2_no_code_opt",
                                        "variant3_no_refine", "no_uniq1", "no_uniq2"])),
        click.option("--num-plans", default=5, show_default=True),
        click.option("--num-tests", default=20, show_default=True),
        click.option("--refine-iterations", default=1, show_default=True),
        click.option("--temperature", default=0.0, show_default=True),
        click.option("--timing-repeats", default=3, show_default=True),
        click.option("--timing-passes", default=4, show_default=True,
                     help="Alternating timed-measurement rounds per comparison."),
        click.option("--eval-repeats", default=9, show_default=True,
                     help="In-process repeats for evaluation timing."),
        click.option("--per-test-timeout", default=5.0, show_default=True),
        click.option("--timed-timeout", default=30.0, show_default=True),
        click.option("--interpreter", default=None,
                     help="Interpreter command for sandboxed execution."),
        click.option("--shim", "runner_script", type=click.Path(exists=True), default=None,
                     help="Runner script to inject next to candidates "
                          "(defaults to the packaged one)."),
        click.option("--workers", default=4, show_default=True),
        click.option("--repeats", default=1, show_default=True,
                     help="Repeat the whole experiment and report means."),
        click.option("--server", default=None,
                     help="URL of a running perfgen service; in-process when omitted."),
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


def _options_payload(kwargs: dict) -> dict:
    payload = {
        key: kwargs[key]
        for key in ("provider", "replay_dir", "model_name", "endpoint", "variant",
                    "num_plans", "num_tests", "refine_iterations", "temperature",
                    "timing_repeats", "timing_passes", "eval_repeats",
                    "per_test_timeout", "timed_timeout",
                    "interpreter", "runner_script", "workers", "repeats")
    }
    if payload["replay_dir"]:
        payload["replay_dir"] = str(Path(payload["replay_dir"]).resolve())
    if payload["runner_script"]:
        payload["runner_script"] = str(Path(payload["runner_script"]).resolve())
    return payload


def _check_provider(provider: str, replay_dir: Optional[str], endpoint: Optional[str]):
    if provider in ("replay", "record") and not replay_dir:
        raise click.UsageError(f"--provider {provider} requires --replay-store")
    if provider in ("live", "record"):
        if not (endpoint or os.environ.get(ENV_ENDPOINT)):
            raise click.UsageError(
                f"--provider {provider} requires --endpoint or ${ENV_ENDPOINT}"
            )
        if not os.environ.get(ENV_API_KEY) and provider == "record":
            click.echo(f"note: ${ENV_API_KEY} not set; recording without credentials",
                       err=True)


def _print_batch(data: dict) -> None:
    if data["table"]:
        click.echo(data["table"])
    if data["report"] and data["report"]["repeats"] > 1:
        mean = data["report"]["mean"]
        click.echo(
            f"\nmean over {data['report']['repeats']} repeats: "
            f"Pass@1={mean['pass_at_1']:.2f} DPS={mean['dps_norm']:.2f} "
            f"Beyond={mean['beyond_at_1']:.2f} eff={mean['eff_at_1']:.3f}"
        )
    for failure in data["failures"]:
        kind = "infrastructure" if failure["infrastructure"] else "model"
        click.echo(f"[{kind} failure] {failure['task_id']}: {failure['message']}",
                   err=True)
    click.echo(f"runs and reports under {data['report_dir']}")


@click.group()
def main() -> None:
    """Explore algorithms, generate verified-efficient code, benchmark it."""


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--report-dir", default="reports", show_default=True, type=click.Path())
@_provider_options
def run(corpus_dir: str, report_dir: str, server: Optional[str], **kwargs) -> None:
    """Run the pipeline over a corpus and evaluate every final solution."""
    _check_provider(kwargs["provider"], kwargs["replay_dir"], kwargs["endpoint"])
    payload = _options_payload(kwargs)
    payload["corpus_dir"] = str(Path(corpus_dir).resolve())
    payload["report_dir"] = str(Path(report_dir).resolve())
    data = ServiceClient(server).post("/batch/run", payload)
    _print_batch(data)
    if data["infrastructure_failed"]:
        raise SystemExit(1)


@main.command()
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--report-dir", default="reports", show_default=True, type=click.Path())
@_provider_options
def record(corpus_dir: str, report_dir: str, server: Optional[str], **kwargs) -> None:
    """Run the batch live, persisting every request/response into the store."""
    kwargs["provider"] = "record"
    _check_provider("record", kwargs["replay_dir"], kwargs["endpoint"])
    payload = _options_payload(kwargs)
    payload["corpus_dir"] = str(Path(corpus_dir).resolve())
    payload["report_dir"] = str(Path(report_dir).resolve())
    payload["evaluate"] = False
    data = ServiceClient(server).post("/batch/run", payload)
    click.echo(f"recorded {data['recorded_entries']} store entries "
               f"into {kwargs['replay_dir']}")
    for failure in data["failures"]:
        click.echo(f"[failure] {failure['task_id']}: {failure['message']}", err=True)
    if data["infrastructure_failed"]:
        raise SystemExit(1)


@main.command("eval")
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True), required=True)
@click.option("--solutions", "solutions_dir", type=click.Path(exists=True), required=True,
              help="Directory with one <task_id>.py per task.")
@click.option("--report-dir", default=None, type=click.Path())
@_provider_options
def eval_cmd(corpus_dir: str, solutions_dir: str, report_dir: Optional[str],
             server: Optional[str], **kwargs) -> None:
    """Evaluate a directory of solutions on hidden tests and timing."""
    payload = _options_payload(kwargs)
    payload["corpus_dir"] = str(Path(corpus_dir).resolve())
    payload["solutions_dir"] = str(Path(solutions_dir).resolve())
    payload["report_dir"] = str(Path(report_dir).resolve()) if report_dir else None
    data = ServiceClient(server).post("/eval", payload)
    click.echo(data["table"])


@main.command("verify-store")
@click.option("--replay-store", "replay_dir", type=click.Path(exists=True), required=True)
@click.option("--server", default=None)
def verify_store(replay_dir: str, server: Optional[str]) -> None:
    """Check replay-store integrity (files, fingerprints, orphans)."""
    data = ServiceClient(server).post(
        "/replay-store/verify", {"replay_dir": str(Path(replay_dir).resolve())}
    )
    if data["ok"]:
        click.echo(f"store ok: {data['entries']} entries")
        return
    for issue in data["issues"]:
        click.echo(f"[issue] {issue}", err=True)
    raise SystemExit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8321, show_default=True)
def serve(host: str, port: int) -> None:
    """Start the HTTP service."""
    import uvicorn

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
