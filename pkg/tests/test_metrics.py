import random

import pytest

from perfgen.domain import Difficulty
from perfgen.metrics import (
    EmptyDistribution,
    LevelMismatch,
    MetricError,
    RuntimeDistribution,
    TaskScore,
    ZeroWeightSum,
    aggregate,
    beyond,
    dps,
    eff,
    pass_at_1,
    render_table,
)


def dist(*runtimes, task_id="t"):
    return RuntimeDistribution(task_id=task_id, runtimes=sorted(runtimes))


# -- independent oracles (naive loops, no bisect) ------------------------------

def dps_oracle(s, runtimes):
    return 100.0 * sum(1 for r in runtimes if r >= s) / len(runtimes)


def beyond_point_oracle(runtimes, v):
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
        return beyond_point_oracle(rs, s)
    left = max(r for r in rs if r < s)
    right = min(r for r in rs if r > s)
    v_left = beyond_point_oracle(rs, left)
    v_right = beyond_point_oracle(rs, right)
    return v_left + (s - left) / (right - left) * (v_right - v_left)


class TestPassAt1:
    def test_three_of_four(self):
        assert pass_at_1([True, True, True, False]) == 75.0

    def test_boundaries(self):
        assert pass_at_1([True, True]) == 100.0
        assert pass_at_1([False]) == 0.0

    def test_empty_raises(self):
        with pytest.raises(MetricError):
            pass_at_1([])


class TestDps:
    def test_worked_example(self):
        # One reference (0.100) is slower-or-equal than 0.060 in a 3-point dist.
        assert dps(0.060, dist(0.020, 0.050, 0.100)) == pytest.approx(100.0 / 3.0)

    def test_faster_than_all(self):
        assert dps(0.001, dist(0.02, 0.05)) == 100.0

    def test_slower_than_all(self):
        assert dps(9.0, dist(0.02, 0.05)) == 0.0

    def test_tie_counts_in_solutions_favor(self):
        assert dps(0.05, dist(0.02, 0.05)) == 50.0

    def test_empty_distribution(self):
        with pytest.raises(EmptyDistribution):
            dps(1.0, RuntimeDistribution(task_id="t", runtimes=[]))


class TestBeyond:
    def test_equal_to_fastest_of_two(self):
        # Pinned by the midpoint-interpolation oracle: (1 + 0.5) / 2 = 75%.
        value = beyond(0.020, dist(0.020, 0.100))
        assert value == pytest.approx(75.0)
        assert 50.0 <= value <= 100.0

    def test_slower_than_all(self):
        assert beyond(1.0, dist(0.020, 0.100)) == 0.0

    def test_faster_than_all(self):
        assert beyond(0.001, dist(0.020, 0.100)) == 100.0

    def test_midpoint_between_two(self):
        assert beyond(0.060, dist(0.020, 0.100)) == pytest.approx(50.0)

    def test_empty_distribution(self):
        with pytest.raises(EmptyDistribution):
            beyond(1.0, RuntimeDistribution(task_id="t", runtimes=[]))


class TestOracleEquivalence:
    def test_random_instances_match_oracles_exactly(self):
        rng = random.Random(1234)
        for _ in range(2000):
            n = rng.randint(1, 8)
            runtimes = sorted(round(rng.uniform(0.01, 1.0), 3) for _ in range(n))
            s = round(rng.uniform(0.005, 1.2), 3)
            d = dist(*runtimes)
            assert dps(s, d) == pytest.approx(dps_oracle(s, runtimes), abs=1e-12)
            assert beyond(s, d) == pytest.approx(beyond_oracle(s, runtimes), abs=1e-9)

    def test_monotone_in_runtime(self):
        rng = random.Random(77)
        for _ in range(300):
            runtimes = sorted(rng.uniform(0.01, 1.0) for _ in range(rng.randint(1, 8)))
            d = dist(*runtimes)
            s1 = rng.uniform(0.005, 1.2)
            s2 = s1 + rng.uniform(0.0, 0.5)
            assert dps(s1, d) >= dps(s2, d)
            assert beyond(s1, d) >= beyond(s2, d)

    def test_ranges(self):
        rng = random.Random(5)
        for _ in range(200):
            runtimes = sorted(rng.uniform(0.01, 1.0) for _ in range(rng.randint(1, 8)))
            s = rng.uniform(0.001, 2.0)
            d = dist(*runtimes)
            assert 0.0 <= dps(s, d) <= 100.0
            assert 0.0 <= beyond(s, d) <= 100.0


class TestEff:
    def test_equal_times_is_one(self):
        assert eff({0: 0.2, 1: 0.4}, {0: 0.2, 1: 0.4}) == pytest.approx(1.0)

    def test_single_level_twice_as_fast(self):
        assert eff({0: 0.05}, {0: 0.1}) == pytest.approx(2.0)

    def test_worked_example(self):
        # Ratios 0.5 and 2.0 under uniform weights -> 1.25.
        value = eff({1: 0.2, 2: 0.4}, {1: 0.1, 2: 0.8})
        assert value == pytest.approx(1.25, abs=1e-12)

    def test_timeout_level_contributes_zero(self):
        assert eff({0: None, 1: 0.4}, {0: 0.2, 1: 0.4}) == pytest.approx(0.5)

    def test_weighted(self):
        value = eff({0: 0.1, 1: 0.1}, {0: 0.2, 1: 0.05}, weights={0: 3.0, 1: 1.0})
        assert value == pytest.approx((3.0 * 2.0 + 1.0 * 0.5) / 4.0)

    def test_scale_invariance(self):
        rng = random.Random(11)
        for _ in range(200):
            levels = list(range(rng.randint(1, 5)))
            cand = {l: rng.uniform(0.01, 1.0) for l in levels}
            expert = {l: rng.uniform(0.01, 1.0) for l in levels}
            scale = rng.uniform(0.001, 1000.0)
            base = eff(cand, expert)
            scaled = eff({l: v * scale for l, v in cand.items()},
                         {l: v * scale for l, v in expert.items()})
            assert scaled == pytest.approx(base, rel=1e-9)

    def test_level_mismatch(self):
        with pytest.raises(LevelMismatch):
            eff({0: 0.1}, {0: 0.1, 1: 0.2})

    def test_zero_weight_sum(self):
        with pytest.raises(ZeroWeightSum):
            eff({0: 0.1}, {0: 0.1}, weights={0: 0.0})


def row(task_id, passed, dps_v=0.0, beyond_v=0.0, eff_v=0.0,
        difficulty=Difficulty.UNSPECIFIED):
    return TaskScore(task_id=task_id, passed=passed, dps=dps_v, beyond=beyond_v,
                     eff=eff_v, difficulty=difficulty)


class TestAggregate:
    def test_mean_of_dps(self):
        report = aggregate([row("a", True, dps_v=100.0), row("b", True, dps_v=0.0)])
        assert report.dps_norm == 50.0

    def test_single_row_identity(self):
        report = aggregate([row("a", True, dps_v=80.0, beyond_v=60.0, eff_v=1.5)])
        assert (report.dps_norm, report.beyond_at_1, report.eff_at_1) == (80.0, 60.0, 1.5)
        assert report.pass_at_1 == 100.0

    def test_failed_task_zero_but_counted(self):
        report = aggregate([row("a", True, dps_v=100.0, eff_v=2.0), row("b", False)])
        assert report.pass_at_1 == 50.0
        assert report.dps_norm == 50.0
        assert report.eff_at_1 == 1.0

    def test_beyond_by_difficulty(self):
        report = aggregate([
            row("a", True, beyond_v=80.0, difficulty=Difficulty.EASY),
            row("b", True, beyond_v=40.0, difficulty=Difficulty.EASY),
            row("c", True, beyond_v=10.0, difficulty=Difficulty.HARD),
        ])
        assert report.beyond_by_difficulty == {"easy": 60.0, "hard": 10.0}

    def test_render_table_contains_rows_and_mean(self):
        report = aggregate([row("median", True, dps_v=100.0)])
        table = render_table(report)
        assert "median" in table and "MEAN" in table
