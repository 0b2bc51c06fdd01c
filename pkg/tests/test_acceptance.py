"""Acceptance gate: one test per shipping criterion, at its stated tolerance.

Each test prints a single ``[ACCEPTANCE] <criterion>: PASS`` line on success;
a pytest failure marks the criterion red. The replay-driven criteria share
one session-scoped batch of runs over the bundled mini corpus.
"""

from __future__ import annotations

import json
import random
import time
from pathlib import Path

import pytest
from click.testing import CliRunner

from perfgen.cli import main as cli_main
from perfgen.corpus import load_corpus, write_corpus
from perfgen.domain import ExecStatus, PassMatrix, VerificationOutcome
from perfgen.metrics import RuntimeDistribution, beyond, dps, eff
from perfgen.sandbox import ExecMode, ExecRequest, Sandbox
from perfgen.verification import checked_set, forward_verify

REPO = Path(__file__).resolve().parents[1]
CORPUS_DIR = REPO / "corpus" / "mini"
REPLAY_DIR = CORPUS_DIR / "replay"
GOLDEN = json.loads((Path(__file__).parent / "golden" / "variant_stages.json").read_text())

# Timing flags for runs whose records (not timings) are under test.
LIGHT_TIMING = ["--timing-repeats", "1", "--timing-passes", "1", "--eval-repeats", "1"]

STATUSES = [ExecStatus.PASS, ExecStatus.FAIL, ExecStatus.ERROR, ExecStatus.TIMEOUT]


def announce(criterion: str) -> None:
    print(f"[ACCEPTANCE] {criterion}: PASS")


def _run_cli(args: list[str]) -> None:
    result = CliRunner().invoke(cli_main, args)
    assert result.exit_code == 0, result.output


def load_records(out_dir: Path) -> dict[str, dict]:
    records = {}
    for record_file in sorted(out_dir.glob("runs/*/record.json")):
        payload = json.loads(record_file.read_text(encoding="utf-8"))
        records[payload["run_id"]] = payload
    return records


@pytest.fixture(scope="session")
def replay_runs(tmp_path_factory) -> dict:
    """Three consecutive full-corpus replay executions plus one run of every
    variant over the designated task, all through the CLI."""
    root = tmp_path_factory.mktemp("acceptance")
    base_args = ["run", "--corpus", str(CORPUS_DIR), "--replay-store",
                 str(REPLAY_DIR), *LIGHT_TIMING]

    started = time.perf_counter()
    batch_dirs = []
    for i in range(3):
        out = root / f"batch{i}"
        _run_cli(base_args + ["--report-dir", str(out)])
        batch_dirs.append(out)
    batch_elapsed = time.perf_counter() - started

    designated = [t for t in load_corpus(CORPUS_DIR) if t.task_id == "prime_fib"]
    variant_corpus = root / "designated-corpus"
    write_corpus(variant_corpus, designated)
    variant_dirs = {}
    for variant in GOLDEN:
        out = root / f"variant-{variant}"
        _run_cli([
            "run", "--corpus", str(variant_corpus), "--replay-store",
            str(REPLAY_DIR), "--variant", variant, "--report-dir", str(out),
            *LIGHT_TIMING,
        ])
        variant_dirs[variant] = out
    return {
        "batch_dirs": batch_dirs,
        "batch_elapsed": batch_elapsed,
        "variant_dirs": variant_dirs,
    }


def all_records(replay_runs) -> list[dict]:
    records = []
    for out in replay_runs["batch_dirs"]:
        records.extend(load_records(out).values())
    for out in replay_runs["variant_dirs"].values():
        records.extend(load_records(out).values())
    return records


class TestReplayDeterminism:
    def test_three_executions_byte_identical_under_two_minutes(self, replay_runs):
        def normalized(out_dir: Path) -> dict[str, str]:
            normal = {}
            for run_id, payload in load_records(out_dir).items():
                payload.pop("wall_clock")  # the only volatile field
                normal[run_id] = json.dumps(payload, sort_keys=True)
            return normal

        first, second, third = (normalized(d) for d in replay_runs["batch_dirs"])
        assert set(first) == set(second) == set(third)
        assert len(first) == 8
        for run_id in first:
            assert first[run_id] == second[run_id] == third[run_id], run_id
        assert replay_runs["batch_elapsed"] < 120.0, (
            f"three executions took {replay_runs['batch_elapsed']:.1f}s"
        )
        announce("replay determinism (3 identical executions, "
                 f"{replay_runs['batch_elapsed']:.1f}s)")


class TestVerificationOracle:
    def test_forward_verify_matches_brute_force_on_1000_matrices(self):
        rng = random.Random(20240817)
        for _ in range(1000):
            grid = [[rng.choice(STATUSES) for _ in range(20)] for _ in range(5)]
            matrix = PassMatrix(
                candidate_ids=list(range(1, 6)),
                test_ids=list(range(1, 21)),
                grid=grid,
            )
            trusted, suspect = forward_verify(matrix)
            oracle = {
                j + 1
                for j in range(20)
                if all(grid[i][j] is ExecStatus.PASS for i in range(5))
            }
            assert trusted == oracle
            assert trusted | suspect == set(range(1, 21))
            assert not trusted & suspect
        announce("verification oracle (1000 random 5x20 matrices)")

    def test_partition_invariant_on_randomized_outcomes(self):
        rng = random.Random(99)
        for _ in range(1000):
            ids = list(range(1, rng.randint(2, 30)))
            rng.shuffle(ids)
            cut1 = rng.randint(0, len(ids))
            cut2 = rng.randint(cut1, len(ids))
            outcome = VerificationOutcome(
                trusted=sorted(ids[:cut1]),
                retained=sorted(ids[cut1:cut2]),
                discarded=sorted(ids[cut2:]),
            )
            assert (
                set(outcome.trusted) | set(outcome.retained) | set(outcome.discarded)
            ) == set(ids)
            assert checked_set(outcome) == set(outcome.trusted) | set(outcome.retained)
        announce("verification partition invariant (1000 randomized outcomes)")


class TestSelectionOptimality:
    def test_final_candidate_dominates_in_every_run_record(self, replay_runs):
        checked_runs = 0
        for payload in all_records(replay_runs):
            assert payload["failure"] is None
            final_id = payload["final_candidate_id"]
            counts = {c["candidate_id"]: c["pass_count"] for c in payload["candidates"]}
            assert final_id in counts
            assert all(counts[final_id] >= v for v in counts.values()), payload["run_id"]
            if payload["checked_test_ids"]:
                checked_runs += 1
        assert checked_runs > 0
        announce("selection optimality (max checked pass count in every record)")

    def test_refinement_max_rule_never_regresses(self, replay_runs):
        observed = 0
        for payload in all_records(replay_runs):
            for refinement in payload["refinements"]:
                kept = (
                    refinement["refined_pass"]
                    if refinement["kept"] == "refined"
                    else refinement["original_pass"]
                )
                assert kept >= refinement["original_pass"]
                assert kept == max(refinement["original_pass"], refinement["refined_pass"])
                observed += 1
        assert observed > 0
        announce(f"refinement max rule ({observed} refinement decisions)")


def dps_oracle(s, runtimes):
    return 100.0 * sum(1 for r in runtimes if r >= s) / len(runtimes)


def _beyond_point(runtimes, v):
    slower = sum(1 for r in runtimes if r > v)
    equal = sum(1 for r in runtimes if r == v)
    return 100.0 * (slower + equal / 2.0) / len(runtimes)


def beyond_oracle(s, runtimes):
    rs = sorted(runtimes)
    if s < rs[0]:
        return 100.0
    if s > rs[-1]:
        return 0.0
    if s in rs:
        return _beyond_point(rs, s)
    left = max(r for r in rs if r < s)
    right = min(r for r in rs if r > s)
    frac = (s - left) / (right - left)
    return _beyond_point(rs, left) + frac * (_beyond_point(rs, right) - _beyond_point(rs, left))


class TestMetricOracles:
    def test_dps_and_beyond_match_oracles_on_10000_instances(self):
        rng = random.Random(424242)
        for _ in range(10000):
            n = rng.randint(1, 8)
            runtimes = sorted(round(rng.uniform(0.01, 1.0), 3) for _ in range(n))
            s = round(rng.uniform(0.005, 1.2), 3)
            d = RuntimeDistribution(task_id="t", runtimes=runtimes)
            assert dps(s, d) == pytest.approx(dps_oracle(s, runtimes), abs=1e-12)
            assert beyond(s, d) == pytest.approx(beyond_oracle(s, runtimes), abs=1e-9)
        announce("metric oracles (10000 random dps/beyond instances)")

    def test_eff_worked_example(self):
        value = eff({1: 0.2, 2: 0.4}, {1: 0.1, 2: 0.8})
        assert abs(value - 1.25) < 1e-12
        announce("eff worked example (ratios 0.5 and 2.0 -> 1.25 within 1e-12)")

    def test_eff_scale_invariance_on_1000_scalings(self):
        rng = random.Random(7)
        for _ in range(1000):
            levels = list(range(rng.randint(1, 6)))
            cand = {l: rng.uniform(0.001, 10.0) for l in levels}
            expert = {l: rng.uniform(0.001, 10.0) for l in levels}
            scale = rng.uniform(1e-3, 1e3)
            base = eff(cand, expert)
            scaled = eff({l: v * scale for l, v in cand.items()},
                         {l: v * scale for l, v in expert.items()})
            assert scaled == pytest.approx(base, rel=1e-9)
        announce("eff scale invariance (1000 random positive scalings)")


class TestTimingHarnessCalibration:
    def test_sleep_ratio_within_25_percent(self):
        sandbox = Sandbox()
        base = dict(assertions=["assert f(1) == 1"], mode=ExecMode.TIMED,
                    repeats=3, per_test_timeout=10.0)
        fast = "import time\ndef f(x):\n    time.sleep(0.010)\n    return x"
        slow = "import time\ndef f(x):\n    time.sleep(0.030)\n    return x"
        w_fast = sandbox.run_timed(ExecRequest(code=fast, **base)).worst_time
        w_slow = sandbox.run_timed(ExecRequest(code=slow, **base)).worst_time
        assert w_fast is not None and w_slow is not None
        ratio = w_slow / w_fast
        assert 2.25 <= ratio <= 3.75, f"ratio {ratio:.3f}"
        announce(f"timing calibration (10ms vs 30ms sleeps, ratio {ratio:.2f})")

    def test_infinite_loop_killed_within_budget(self):
        sandbox = Sandbox()
        timeout = 1.0
        started = time.perf_counter()
        outcome = sandbox.run_functional(
            ExecRequest(
                code="def f(x):\n    while True:\n        pass",
                assertions=["assert f(1) == 1"],
                per_test_timeout=timeout,
            )
        )
        elapsed = time.perf_counter() - started
        assert outcome.per_test[0].status is ExecStatus.TIMEOUT
        assert elapsed <= timeout + 1.0, f"killed after {elapsed:.2f}s"
        announce(f"timeout enforcement (killed in {elapsed:.2f}s <= {timeout + 1.0:.2f}s)")


class TestFirewall:
    def test_no_oracle_material_appears_in_any_prompt(self, replay_runs):
        tasks = load_corpus(CORPUS_DIR)
        oracle_strings = [
            hidden for t in tasks for hidden in t.hidden_tests
        ] + [
            ref.code for t in tasks for ref in t.reference_solutions
        ]
        scanned_prompts = 0
        for payload in all_records(replay_runs):
            for transcript in payload["stage_transcripts"]:
                scanned_prompts += 1
                for secret in oracle_strings:
                    assert secret not in transcript["prompt"], (
                        payload["run_id"], transcript["stage"], secret[:60]
                    )
        assert scanned_prompts > 200
        announce(f"stage-visibility firewall ({scanned_prompts} prompts scanned)")


class TestVariantGraphs:
    @pytest.mark.parametrize("variant", list(GOLDEN))
    def test_stage_sequence_matches_golden(self, replay_runs, variant):
        out = replay_runs["variant_dirs"][variant]
        payload = load_records(out)[f"prime_fib--{variant}"]
        names = [t["stage"] for t in payload["stage_transcripts"]]
        collapsed = []
        for name in names:
            if not collapsed or collapsed[-1] != name:
                collapsed.append(name)
        assert collapsed == GOLDEN[variant], (variant, collapsed)
        announce(f"variant stage graph ({variant})")


class TestSelfEvaluationSanity:
    def test_expert_solutions_score_pass100_and_eff_near_one(self, tmp_path):
        solutions = tmp_path / "solutions"
        solutions.mkdir()
        tasks = load_corpus(CORPUS_DIR)
        for task in tasks:
            expert = task.expert_solution()
            assert expert is not None
            (solutions / f"{task.task_id}.py").write_text(expert.code + "\n",
                                                          encoding="utf-8")
        out = tmp_path / "report"
        _run_cli([
            "eval", "--corpus", str(CORPUS_DIR), "--solutions", str(solutions),
            "--report-dir", str(out),
        ])
        report = json.loads((out / "report.json").read_text())["per_repeat"][0]
        assert report["pass_at_1"] == 100.0
        for row in report["rows"]:
            assert row["passed"] is True, row["task_id"]
            assert abs(row["eff"] - 1.0) <= 0.15, (row["task_id"], row["eff"])
        announce("self-evaluation sanity (Pass@1=100, per-task eff within 1.0 +/- 0.15)")
