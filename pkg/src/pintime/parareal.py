"""Reference parareal implementation.

Iteration ``k + 1`` updates every slice entry with

    lam[j+1] = G(lam_new[j]) + F(lam_old[j]) - G(lam_old[j])

where ``F`` is the fine propagator (run on all slices in parallel) and ``G``
the coarse one (run in the sequential sweep).  Iteration 0 is a plain coarse
sweep.
"""
from dataclasses import dataclass
import time

import numpy as np

from .exec_harness import CommStats, ExecConfig, modeled_time_parareal, parallel_map
from .nievergelt import (RunReport, _fill_exact_error, initial_state, problem_T, problem_t0,
                         relative_error, serial_solve)
from .ode_core import TimeSliceDecomposition, propagate


@dataclass(frozen=True)
class PararealConfig:
    dt: float
    DT: float = 0.1
    k: int = 2
    N: int = 4

    def __post_init__(self):
        if self.dt <= 0 or self.DT <= 0:
            raise ValueError("step sizes must be positive")
        if self.DT < self.dt:
            raise ValueError("coarse step must not be smaller than the fine step")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.N < 1:
            raise ValueError("N must be a positive integer")


def coarse_propagate(problem, lam, slice_bounds, DT):
    """Backward Euler across the slice with the coarse step."""
    t_start, t_end = slice_bounds
    return propagate(problem, lam, t_start, t_end, DT)


def fine_propagate(problem, lam, slice_bounds, dt):
    t_start, t_end = slice_bounds
    return propagate(problem, lam, t_start, t_end, dt)


def _copy(state):
    return state if np.isscalar(state) else np.array(state, dtype=float)


def parareal_sweep(problem, config, y0=None, exec_config=None, T=None):
    """Run ``config.k`` parareal iterations.

    Returns ``(finals, report)`` where ``finals[i]`` is the end state after
    iteration ``i`` (``finals[0]`` is the coarse-only answer).
    """
    exec_config = exec_config or ExecConfig()
    t0 = problem_t0(problem)
    T = problem_T(problem) if T is None else float(T)
    y0 = initial_state(problem) if y0 is None else _copy(y0)
    N, k = config.N, config.k
    decomposition = TimeSliceDecomposition(t0, T, N, config.dt)
    slices = list(decomposition)
    nbytes = 8 * problem.dim
    stats = CommStats()
    cfg = {"algorithm": "parareal", "N": N, "dt": config.dt, "DT": config.DT, "k": k,
           "T": T, "workers": exec_config.workers,
           "latency": exec_config.latency_per_receive}
    t_begin = time.perf_counter()

    if N == 1:
        t = time.perf_counter()
        final = fine_propagate(problem, y0, slices[0], config.dt)
        elapsed = time.perf_counter() - t
        report = RunReport("parareal", final, per_slice_compute=[elapsed],
                           per_slice_work=[decomposition.steps(1)[0]], config=cfg,
                           iterates=[final] * (k + 1))
        report.modeled_time = elapsed
        report.T_total = time.perf_counter() - t_begin
        return [final] * (k + 1), report

    coarse_time = 0.0
    coarse_calls = 0

    def coarse(j, lam):
        nonlocal coarse_time, coarse_calls
        t = time.perf_counter()
        out = coarse_propagate(problem, lam, slices[j], config.DT)
        coarse_time += time.perf_counter() - t
        coarse_calls += 1
        return out

    # iteration 0: sequential coarse sweep
    sweep_start = time.perf_counter()
    lam = [y0]
    g_old = []
    for j in range(N):
        if j > 0:
            stats.receive(nbytes, exec_config)
        g = coarse(j, lam[j])
        g_old.append(g)
        lam.append(g)
    stats.t_comm += time.perf_counter() - sweep_start
    finals = [_copy(lam[-1])]

    fine_per_slice = np.zeros(N)

    def fine_task(j):
        t = time.perf_counter()
        out = fine_propagate(problem, lam[j], slices[j], config.dt)
        return out, time.perf_counter() - t

    labels = [f"slice {j + 1}" for j in range(N)]
    for _ in range(k):
        results = parallel_map(fine_task, range(N), workers=exec_config.workers, labels=labels)
        fine = [out for out, _ in results]
        fine_per_slice += [sec for _, sec in results]

        sweep_start = time.perf_counter()
        # fine results move to the neighbour that owns the next correction
        for _ in range(N - 1):
            stats.receive(nbytes, exec_config)
        new = [y0]
        for j in range(N):
            if j > 0:
                stats.receive(nbytes, exec_config)
            g = coarse(j, new[j])
            new.append(g + fine[j] - g_old[j])
            g_old[j] = g
        stats.t_comm += time.perf_counter() - sweep_start
        lam = new
        finals.append(_copy(lam[-1]))

    per_slice = list(fine_per_slice / k) if k else [0.0] * N
    work = [decomposition.steps(j + 1)[0] * k for j in range(N)]
    report = RunReport(
        "parareal", finals[-1],
        T_comm=stats.t_comm, T_latency=stats.t_latency,
        message_count=stats.messages, bytes_communicated=stats.bytes,
        per_slice_compute=per_slice, per_slice_work=work,
        iterates=finals, config=cfg,
    )
    coarse_per_slice = coarse_time / coarse_calls if coarse_calls else 0.0
    report.modeled_time = modeled_time_parareal(per_slice, coarse_per_slice, k,
                                                exec_config.latency_per_receive)
    report.T_total = time.perf_counter() - t_begin
    return finals, report


def run_parareal(problem, config, exec_config=None, T=None, serial=None, compute_serial=True):
    """:func:`parareal_sweep` plus error reporting against exact and serial solutions."""
    finals, report = parareal_sweep(problem, config, exec_config=exec_config, T=T)
    T = report.config["T"]
    if serial is not None:
        report.serial_state = serial
    elif compute_serial:
        report.serial_state = serial_solve(problem, config.dt, problem_t0(problem), T)
    if report.serial_state is not None:
        report.error_vs_serial = relative_error(report.final_state, report.serial_state)
    _fill_exact_error(report, problem, T)
    return report

