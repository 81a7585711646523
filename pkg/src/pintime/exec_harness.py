"""Task execution, timing, message accounting and modeled schedule time.

``parallel_map`` runs independent tasks on a thread pool.  The compiled
kernels release the GIL, so slice and sample tasks genuinely overlap; the
results are always returned in task order, so worker count never changes a
numerical output.
"""
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
import os
import time

from .errors import TaskError

CLOCK_MODES = ("measured", "modeled", "both")


def default_workers():
    env = os.environ.get("PINTIME_WORKERS")
    if env:
        return max(1, int(env))
    return 1


@dataclass(frozen=True)
class ExecConfig:
    """How a run is executed.

    ``latency_per_receive`` seconds are added for every message received
    during a communication sweep: slept in ``measured``/``both`` modes and
    added to the modeled time in ``modeled``/``both`` modes.
    """

    workers: int = 1
    latency_per_receive: float = 0.0
    clock_mode: str = "both"

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.latency_per_receive < 0:
            raise ValueError("latency must be non-negative")
        if self.clock_mode not in CLOCK_MODES:
            raise ValueError(f"clock_mode must be one of {CLOCK_MODES}")

    @property
    def sleeps(self):
        return self.latency_per_receive > 0 and self.clock_mode in ("measured", "both")


def parallel_map(func, items, workers=1, labels=None):
    """``[func(item) for item in items]`` spread over ``workers`` threads.

    The first failing task (lowest index) is re-raised as :class:`TaskError`
    carrying its index and optional label; other results are discarded.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        results = []
        for i, item in enumerate(items):
            try:
                results.append(func(item))
            except Exception as exc:
                raise TaskError(i, exc, None if labels is None else labels[i]) from exc
        return results

    def guarded(arg):
        try:
            return True, func(arg)
        except Exception as exc:  # collected and re-raised in index order
            return False, exc

    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(guarded, items))
    for i, (ok, value) in enumerate(outcomes):
        if not ok:
            raise TaskError(i, value, None if labels is None else labels[i]) from value
    return [value for _, value in outcomes]


class Stopwatch:
    """Accumulates named sections on the monotonic clock."""

    def __init__(self):
        self.totals = {}

    @contextmanager
    def section(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.totals[name] = self.totals.get(name, 0.0) + time.perf_counter() - start

    def __getitem__(self, name):
        return self.totals.get(name, 0.0)


@contextmanager
def timed():
    """Yield a one-element list that holds the elapsed seconds on exit."""
    box = [0.0]
    start = time.perf_counter()
    try:
        yield box
    finally:
        box[0] = time.perf_counter() - start


def timed_call(func, *args, **kwargs):
    """``(result, seconds)`` for one call."""
    start = time.perf_counter()
    result = func(*args, **kwargs)
    return result, time.perf_counter() - start


@dataclass
class CommStats:
    """Message accounting for one run."""

    messages: int = 0
    bytes: int = 0
    t_comm: float = 0.0
    t_apply: float = 0.0
    t_latency: float = 0.0

    def receive(self, nbytes, config):
        """Account one received message; sleeps when latency is injected."""
        self.messages += 1
        self.bytes += int(nbytes)
        if config.latency_per_receive > 0:
            self.t_latency += config.latency_per_receive
            if config.sleeps:
                time.sleep(config.latency_per_receive)


@dataclass
class ScheduleModel:
    per_slice: list
    latency: float
    shape: str = "nievergelt"
    k: int = 0
    apply_cost: float = 0.0
    coarse_cost: float = 0.0

    def time(self):
        if self.shape == "nievergelt":
            return modeled_time_nievergelt(self.per_slice, self.latency, self.apply_cost)
        return modeled_time_parareal(self.per_slice, self.coarse_cost, self.k, self.latency)


def modeled_time_nievergelt(per_slice, latency, apply_cost=0.0):
    """Construction blocks run concurrently, then a chain of ``N - 1`` hand-offs.

    ``max(per_slice) + (N - 1) * (latency + apply_cost)``.
    """
    per_slice = list(per_slice)
    if not per_slice:
        raise ValueError("need at least one slice")
    n = len(per_slice)
    return max(per_slice) + (n - 1) * (latency + apply_cost)


def parareal_message_count(k, N):
    """Messages for ``k`` parareal iterations on ``N`` slices: ``(2k + 1)(N - 1)``."""
    return (2 * k + 1) * (N - 1)


def modeled_time_parareal(per_slice_fine, coarse_per_slice, k, latency):
    """``k`` fine blocks plus ``k + 1`` coarse chains plus every message's latency."""
    if k < 0:
        raise ValueError("k must be non-negative")
    per_slice_fine = list(per_slice_fine)
    n = len(per_slice_fine)
    fine = max(per_slice_fine) if per_slice_fine else 0.0
    return (k * fine + (k + 1) * n * coarse_per_slice
            + parareal_message_count(k, n) * latency)
