import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pintime.errors import TaskError
from pintime.exec_harness import (CommStats, ExecConfig, ScheduleModel, Stopwatch,
                                  default_workers, modeled_time_nievergelt,
                                  modeled_time_parareal, parallel_map, parareal_message_count,
                                  timed, timed_call)
from pintime.nievergelt import run_nievergelt
from pintime.pde_problems import make_heat_problem


def test_exec_config_validation():
    with pytest.raises(ValueError):
        ExecConfig(workers=0)
    with pytest.raises(ValueError):
        ExecConfig(latency_per_receive=-1.0)
    with pytest.raises(ValueError):
        ExecConfig(clock_mode="wall")
    assert ExecConfig(1, 1e-3, "both").sleeps
    assert not ExecConfig(1, 1e-3, "modeled").sleeps
    assert not ExecConfig(1, 0.0, "measured").sleeps


def test_default_workers(monkeypatch):
    monkeypatch.delenv("PINTIME_WORKERS", raising=False)
    assert default_workers() == 1
    monkeypatch.setenv("PINTIME_WORKERS", "6")
    assert default_workers() == 6


# ---------------------------------------------------------------------------
# parallel_map

def test_sequential_semantics():
    assert parallel_map(lambda v: v * v, range(5), workers=1) == [0, 1, 4, 9, 16]
    assert parallel_map(lambda v: v, [], workers=4) == []


def test_many_tasks_same_as_sequential():
    items = list(range(100))
    f = lambda v: np.sin(v) * v  # noqa: E731
    assert parallel_map(f, items, workers=8) == parallel_map(f, items, workers=1)


def test_index_order_despite_completion_order():
    def slow_first(v):
        time.sleep(0.002 * (10 - v))
        return v
    assert parallel_map(slow_first, range(10), workers=10) == list(range(10))


@pytest.mark.parametrize("workers", [1, 4])
def test_first_failure_is_reported(workers):
    def f(v):
        if v in (3, 7):
            raise ValueError(f"bad {v}")
        return v
    with pytest.raises(TaskError) as info:
        parallel_map(f, range(10), workers=workers, labels=[f"item {i}" for i in range(10)])
    assert info.value.index == 3
    assert "item 3" in str(info.value)
    assert isinstance(info.value.cause, ValueError)


@settings(max_examples=20, deadline=None)
@given(values=st.lists(st.floats(-1e6, 1e6), max_size=40), workers=st.integers(1, 8))
def test_parallel_map_matches_list_comprehension(values, workers):
    assert parallel_map(lambda v: 3.0 * v + 1.0, values, workers=workers) == \
        [3.0 * v + 1.0 for v in values]


# ---------------------------------------------------------------------------
# timing

def test_timed_zero_work():
    with timed() as box:
        pass
    assert box[0] >= 0.0


def test_timed_sleep():
    with timed() as box:
        time.sleep(0.010)
    assert 0.009 <= box[0] <= 0.050


def test_timed_call():
    result, seconds = timed_call(sum, [1, 2, 3])
    assert result == 6 and seconds >= 0.0


def test_stopwatch_sections_compose():
    watch = Stopwatch()
    with timed() as total:
        with watch.section("outer"):
            with watch.section("a"):
                time.sleep(0.002)
            with watch.section("b"):
                time.sleep(0.002)
    assert watch["a"] + watch["b"] <= watch["outer"] <= total[0]
    assert watch["missing"] == 0.0


def test_comm_stats_receive_modeled():
    stats = CommStats()
    config = ExecConfig(1, 0.5, "modeled")
    start = time.perf_counter()
    for _ in range(3):
        stats.receive(16, config)
    assert time.perf_counter() - start < 0.1
    assert stats.messages == 3 and stats.bytes == 48
    assert stats.t_latency == pytest.approx(1.5)


# ---------------------------------------------------------------------------
# modeled schedule time

def test_modeled_nievergelt_single_slice():
    assert modeled_time_nievergelt([0.7], 1e-3, 0.1) == 0.7


def test_modeled_nievergelt_uniform():
    c, L, a, N = 2.0, 1e-3, 1e-4, 16
    assert modeled_time_nievergelt([c] * N, L, a) == pytest.approx(c + (N - 1) * (L + a))


@given(work=st.floats(1e-3, 10), N=st.integers(1, 64), L1=st.floats(0, 1e-2),
       L2=st.floats(0, 1e-2))
def test_modeled_nievergelt_monotone(work, N, L1, L2):
    lo, hi = sorted((L1, L2))
    per_slice = [work / N] * N
    assert modeled_time_nievergelt(per_slice, lo) <= modeled_time_nievergelt(per_slice, hi)
    bigger = [work / (N + 1)] * (N + 1)
    # with a fixed apply cost, adding slices costs at least one more hand-off
    assert (modeled_time_nievergelt(bigger, hi, 1e-3) - (N) * (hi + 1e-3)
            <= modeled_time_nievergelt(per_slice, hi, 1e-3) - (N - 1) * (hi + 1e-3))


def test_modeled_nievergelt_not_below_max():
    per_slice = [0.3, 0.9, 0.1]
    assert modeled_time_nievergelt(per_slice, 0.0) >= 0.9
    assert ScheduleModel(per_slice, 1e-3).time() >= max(per_slice)


def test_latency_dominated_comm_time():
    N, L = 64, 1e-3
    comm = modeled_time_nievergelt([0.0] * N, L, 0.0)
    assert 0.5 * (N - 1) * L <= comm <= 2 * (N - 1) * L


def test_modeled_parareal_degenerate():
    assert modeled_time_parareal([0.4, 0.2], 0.0, 1, 0.0) == 0.4


def test_modeled_parareal_dominates_nievergelt():
    N, c, coarse, a, L = 16, 1.0, 1e-3, 1e-4, 1e-3
    for k in (2, 3, 5):
        assert (modeled_time_parareal([c] * N, coarse, k, L)
                >= modeled_time_nievergelt([c] * N, L, a))


def test_modeled_parareal_comm_grows_with_k():
    N, L = 32, 1e-3
    comm = [modeled_time_parareal([0.0] * N, 0.0, k, L) for k in (2, 4, 8)]
    assert comm[0] < comm[1] < comm[2]
    assert parareal_message_count(0, N) == N - 1


def test_schedule_model_parareal():
    m = ScheduleModel([1.0, 2.0], 1e-3, shape="parareal", k=2, coarse_cost=0.01)
    assert m.time() == pytest.approx(modeled_time_parareal([1.0, 2.0], 0.01, 2, 1e-3))


# ---------------------------------------------------------------------------
# injected latency, measured

@pytest.mark.parametrize("N", [2, 8, 32])
def test_measured_comm_with_latency(N):
    problem = make_heat_problem(0.1, T=1.0 * N / 2)
    report = run_nievergelt(problem, N, 0.005, config=ExecConfig(1, 1e-3, "both"),
                            compute_serial=False)
    assert (N - 1) * 1e-3 <= report.T_comm <= 3 * (N - 1) * 1e-3
    assert report.T_latency == pytest.approx((N - 1) * 1e-3)
