"""Efficiency and correctness scoring against reference runtime distributions.

Four quantities, all documented with formulas and tie rules in METRICS.md:

* ``pass_at_1``  - percent of tasks whose single greedy solution passes every
                   hidden test.
* ``dps``        - percent of the reference runtime distribution that is
                   slower than or equal to the solution (ties count in the
                   solution's favor).
* ``beyond``     - percentile of the reference distribution the solution is
                   strictly faster than, linearly interpolated between
                   neighboring distribution points.
* ``eff``        - weighted mean over difficulty levels of expert-to-candidate
                   worst-runtime ratios; above 1.0 means faster than the
                   expert solution.

Failed solutions contribute 0 to every efficiency score but stay in the
denominator of the aggregates.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Mapping, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .domain import Difficulty


class MetricError(Exception):
    pass


class EmptyDistribution(MetricError):
    pass


class LevelMismatch(MetricError):
    pass


class ZeroWeightSum(MetricError):
    pass


class RuntimeDistribution(BaseModel):
    model_config = ConfigDict(frozen=True)

    task_id: str
    runtimes: list[float]

    @model_validator(mode="after")
    def _check(self) -> "RuntimeDistribution":
        if any(r <= 0 for r in self.runtimes):
            raise ValueError("reference runtimes must be strictly positive")
        if self.runtimes != sorted(self.runtimes):
            raise ValueError("reference runtimes must be sorted ascending")
        return self


def pass_at_1(results: Sequence[bool]) -> float:
    if not results:
        raise MetricError("pass_at_1 needs at least one task result")
    return 100.0 * sum(1 for r in results if r) / len(results)


def dps(solution_runtime: float, dist: RuntimeDistribution) -> float:
    """Percent of references the solution matches or beats (r >= s counts)."""
    if not dist.runtimes:
        raise EmptyDistribution(f"no reference runtimes for {dist.task_id}")
    slower_or_equal = len(dist.runtimes) - bisect_left(dist.runtimes, solution_runtime)
    return 100.0 * slower_or_equal / len(dist.runtimes)


def _beyond_at_point(runtimes: list[float], value: float) -> float:
    n = len(runtimes)
    lo = bisect_left(runtimes, value)
    hi = bisect_right(runtimes, value)
    strictly_slower = n - hi
    equal = hi - lo
    return 100.0 * (strictly_slower + equal / 2.0) / n


def beyond(solution_runtime: float, dist: RuntimeDistribution) -> float:
    """Interpolated percentile of references strictly slower than the solution.

    At a runtime equal to a reference value the score is the midpoint rule
    (strictly slower + half of the ties); between two neighboring reference
    values the score is linearly interpolated; faster than every reference is
    100 and slower than every reference is 0.
    """
    runtimes = dist.runtimes
    if not runtimes:
        raise EmptyDistribution(f"no reference runtimes for {dist.task_id}")
    if solution_runtime < runtimes[0]:
        return 100.0
    if solution_runtime > runtimes[-1]:
        return 0.0
    lo = bisect_left(runtimes, solution_runtime)
    hi = bisect_right(runtimes, solution_runtime)
    if lo != hi:  # exactly on a reference value
        return _beyond_at_point(runtimes, solution_runtime)
    left, right = runtimes[lo - 1], runtimes[lo]
    v_left = _beyond_at_point(runtimes, left)
    v_right = _beyond_at_point(runtimes, right)
    frac = (solution_runtime - left) / (right - left)
    return v_left + frac * (v_right - v_left)


def eff(
    level_worst_times: Mapping[int, Optional[float]],
    expert_times: Mapping[int, float],
    weights: Optional[Mapping[int, float]] = None,
) -> float:
    """Weighted mean of expert/candidate worst-time ratios across levels.

    A level where the candidate timed out (time None or <= 0) contributes 0.
    Weights default to uniform.
    """
    if set(level_worst_times) != set(expert_times):
        raise LevelMismatch(
            f"level keys differ: {sorted(level_worst_times)} vs {sorted(expert_times)}"
        )
    if not expert_times:
        raise LevelMismatch("no levels to score")
    if weights is None:
        weights = {level: 1.0 for level in expert_times}
    if set(weights) != set(expert_times):
        raise LevelMismatch("weight keys must match level keys")
    if any(w < 0 for w in weights.values()):
        raise ZeroWeightSum("weights must be non-negative")
    total_weight = sum(weights.values())
    if total_weight == 0:
        raise ZeroWeightSum("weights must not all be zero")
    score = 0.0
    for level, expert in expert_times.items():
        candidate = level_worst_times[level]
        if candidate is None or candidate <= 0:
            continue  # timeout at this level contributes 0
        score += weights[level] * (expert / candidate)
    return score / total_weight


class TaskScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    task_id: str
    difficulty: Difficulty = Difficulty.UNSPECIFIED
    passed: bool
    solution_runtime: Optional[float] = None
    dps: float = 0.0
    beyond: float = 0.0
    eff: float = 0.0
    notes: list[str] = Field(default_factory=list)


class EfficiencyReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    rows: list[TaskScore]
    pass_at_1: float
    dps_norm: float
    beyond_at_1: float
    eff_at_1: float
    beyond_by_difficulty: dict[str, float] = Field(default_factory=dict)


def aggregate(rows: Sequence[TaskScore]) -> EfficiencyReport:
    """Arithmetic means over tasks; failed tasks count in every denominator."""
    if not rows:
        raise MetricError("cannot aggregate an empty report")
    n = len(rows)
    by_difficulty: dict[str, list[float]] = {}
    for row in rows:
        by_difficulty.setdefault(row.difficulty.value, []).append(row.beyond)
    return EfficiencyReport(
        rows=list(rows),
        pass_at_1=pass_at_1([r.passed for r in rows]),
        dps_norm=sum(r.dps for r in rows) / n,
        beyond_at_1=sum(r.beyond for r in rows) / n,
        eff_at_1=sum(r.eff for r in rows) / n,
        beyond_by_difficulty={
            d: sum(vals) / len(vals) for d, vals in sorted(by_difficulty.items())
        },
    )


def render_table(report: EfficiencyReport) -> str:
    """Aligned text table: one row per task plus the aggregate line."""
    headers = ["task", "difficulty", "passed", "runtime_s", "DPS", "Beyond", "eff"]
    rows = []
    for r in report.rows:
        rows.append([
            r.task_id,
            r.difficulty.value,
            "yes" if r.passed else "no",
            f"{r.solution_runtime:.6f}" if r.solution_runtime is not None else "-",
            f"{r.dps:.2f}",
            f"{r.beyond:.2f}",
            f"{r.eff:.3f}",
        ])
    rows.append([
        "MEAN",
        "-",
        f"{report.pass_at_1:.2f}%",
        "-",
        f"{report.dps_norm:.2f}",
        f"{report.beyond_at_1:.2f}",
        f"{report.eff_at_1:.3f}",
    ])
    widths = [max(len(h), *(len(row[i]) for row in rows)) for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    if report.beyond_by_difficulty:
        lines.append("")
        lines.append("Beyond by difficulty: " + ", ".join(
            f"{d}={v:.2f}" for d, v in report.beyond_by_difficulty.items()
        ))
    return "\n".join(lines)
