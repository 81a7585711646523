"""Nievergelt's minimal-communication time decomposition.

Computation phase: on every slice, build the map from entry state to exit
state without knowing the entry state.  Scalar nonlinear problems sample the
initial-value space and interpolate; linear problems get the exact affine
map from one forced run and one homogeneous run per unit vector.

Communication phase: one sequential sweep, ``N - 1`` hand-offs in total.
"""
from dataclasses import dataclass, field
import time
from typing import Optional

import numpy as np

from .errors import NoRealRoot
from .exec_harness import CommStats, ExecConfig, modeled_time_nievergelt, parallel_map
from .interp import InitialValueSpace, InterpolantData, interp_eval
from .ode_core import ScalarIVP, TimeSliceDecomposition, propagate, slice_steps


@dataclass(frozen=True)
class SliceMap:
    """Interpolated entry-to-exit map for one slice of a scalar problem."""

    slice_index: int
    interpolant: InterpolantData
    space: InitialValueSpace
    t_start: float = 0.0
    t_end: float = 0.0

    @property
    def dim(self):
        return 1

    def apply(self, xi):
        return interp_eval(self.interpolant, xi)

    def extrapolates(self, xi):
        return not self.space.contains(xi)


@dataclass(frozen=True, eq=False)
class AffinePropagator:
    """Exact map ``y -> G y + c`` for one slice of a linear problem."""

    G: np.ndarray
    c: np.ndarray
    slice_index: int = 0

    @property
    def dim(self):
        return self.c.shape[0]

    def apply(self, y):
        return self.G @ np.asarray(y, dtype=float) + self.c

    def extrapolates(self, y):
        return False


@dataclass
class RunReport:
    """Outcome of one parallel-in-time run.

    ``error_vs_exact`` is an absolute max-norm error; ``error_vs_serial`` is
    relative to the max-norm of the serial reference.  ``T_comm`` covers the
    sequential communication phases (receives plus map applications);
    ``T_apply`` and ``T_latency`` break it down.
    """

    algorithm: str
    final_state: object
    T_total: float = 0.0
    T_comm: float = 0.0
    T_apply: float = 0.0
    T_latency: float = 0.0
    modeled_time: Optional[float] = None
    message_count: int = 0
    bytes_communicated: int = 0
    per_slice_compute: list = field(default_factory=list)
    per_slice_work: list = field(default_factory=list)
    extrapolation_count: int = 0
    error_vs_exact: Optional[float] = None
    error_vs_serial: Optional[float] = None
    serial_state: object = None
    iterates: list = field(default_factory=list)
    config: dict = field(default_factory=dict)


def max_error(a, b):
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def relative_error(a, ref):
    ref = np.asarray(ref, dtype=float)
    scale = float(np.max(np.abs(ref)))
    err = max_error(a, ref)
    return err / scale if scale > 0 else err


# ---------------------------------------------------------------------------
# map construction

def _sample_task(problem, t_start, t_end, dt):
    def run(xi):
        return propagate(problem, float(xi), t_start, t_end, dt)
    return run


def build_scalar_slice_map(problem, slice_bounds, space, dt, slice_index=0, workers=1):
    """Integrate from every node of ``space`` across the slice and interpolate the exits."""
    t_start, t_end = slice_bounds
    nodes = space.nodes()
    run = _sample_task(problem, t_start, t_end, dt)
    labels = [f"slice {slice_index}, sample {k} (xi={xi!r})" for k, xi in enumerate(nodes)]
    values = parallel_map(run, nodes, workers=workers, labels=labels)
    return SliceMap(slice_index, InterpolantData.from_samples(nodes, values), space,
                    t_start, t_end)


def _basis_runs(problem):
    """Initial states for the propagator runs: zero (forced) then each unit vector."""
    dim = problem.dim
    runs = []
    if getattr(problem, "has_forcing", True):
        runs.append((np.zeros(dim), False))
    eye = np.eye(dim)
    runs.extend((eye[j].copy(), True) for j in range(dim))
    return runs


def _assemble_propagator(problem, outputs, slice_index):
    dim = problem.dim
    if getattr(problem, "has_forcing", True):
        c, cols = outputs[0], outputs[1:]
    else:
        c, cols = np.zeros(dim), outputs
    G = np.column_stack(cols) if cols else np.zeros((dim, 0))
    return AffinePropagator(np.ascontiguousarray(G), np.asarray(c, dtype=float), slice_index)


def build_affine_propagator(problem, slice_bounds, dt, slice_index=0, workers=1):
    """Exact affine map of a linear problem over one slice.

    ``c`` is the forced run from zero; column ``j`` of ``G`` is the
    homogeneous run from ``e_j``.  The ``dim + 1`` runs are independent tasks.
    """
    t_start, t_end = slice_bounds
    runs = _basis_runs(problem)

    def run(spec):
        y, homogeneous = spec
        return propagate(problem, y, t_start, t_end, dt, homogeneous=homogeneous)

    labels = [f"slice {slice_index}, run {i}" for i in range(len(runs))]
    outputs = parallel_map(run, runs, workers=workers, labels=labels)
    return _assemble_propagator(problem, outputs, slice_index)


# ---------------------------------------------------------------------------
# communication phase

def compose_sweep(maps, y0, config=None, latency_per_receive=None):
    """Apply the slice maps in order, starting from ``y0``.

    Returns ``(final_state, CommStats, extrapolation_count)``.  Every map
    after the first receives its entry state from its predecessor, so ``N``
    maps cost ``N - 1`` messages of ``8 * dim`` bytes.
    """
    if config is None:
        config = ExecConfig()
    if latency_per_receive is not None:
        config = ExecConfig(config.workers, latency_per_receive, config.clock_mode)
    stats = CommStats()
    extrapolated = 0
    state = y0
    start = time.perf_counter()
    for j, phi in enumerate(maps):
        if j > 0:
            stats.receive(8 * phi.dim, config)
        if phi.extrapolates(state):
            extrapolated += 1
        t = time.perf_counter()
        state = phi.apply(state)
        stats.t_apply += time.perf_counter() - t
    stats.t_comm = time.perf_counter() - start
    return state, stats, extrapolated


# ---------------------------------------------------------------------------
# driver

def _is_scalar(problem):
    return isinstance(problem, ScalarIVP)


def serial_solve(problem, dt, t0=None, T=None):
    """Single-worker reference solution over the whole horizon."""
    t0 = problem_t0(problem) if t0 is None else t0
    T = problem_T(problem) if T is None else T
    return propagate(problem, initial_state(problem), t0, T, dt)


def problem_t0(problem):
    return float(getattr(problem, "t0", 0.0))


def problem_T(problem):
    return float(getattr(problem, "T"))


def initial_state(problem):
    y0 = problem.y0
    return float(y0) if _is_scalar(problem) else np.asarray(y0, dtype=float)


def exact_final(problem, T):
    exact = getattr(problem, "exact", None)
    if exact is None:
        return None
    return exact(T)


def run_nievergelt(problem, N, dt, space=None, config=None, T=None, serial=None,
                   compute_serial=True):
    """Full computation + communication run.

    ``space`` is required for scalar problems.  ``serial`` may carry a
    precomputed serial reference; otherwise it is computed once when
    ``compute_serial`` is set.  ``N = 1`` is plain serial stepping.
    """
    config = config or ExecConfig()
    t0 = problem_t0(problem)
    T = problem_T(problem) if T is None else float(T)
    decomposition = TimeSliceDecomposition(t0, T, N, dt)
    y0 = initial_state(problem)
    scalar = _is_scalar(problem)
    if scalar and space is None:
        raise ValueError("scalar problems need an InitialValueSpace")

    cfg = {"algorithm": "nievergelt", "N": N, "dt": dt, "T": T,
           "workers": config.workers, "latency": config.latency_per_receive}
    if scalar:
        cfg.update(M=space.M, a=space.a, b=space.b, nodes=space.family)

    t_begin = time.perf_counter()
    if N == 1:
        t = time.perf_counter()
        final = propagate(problem, y0, t0, T, dt)
        elapsed = time.perf_counter() - t
        n, _ = decomposition.steps(1)
        report = RunReport("nievergelt", final, per_slice_compute=[elapsed],
                           per_slice_work=[n], config=cfg)
        report.modeled_time = elapsed
        report.T_total = time.perf_counter() - t_begin
        if compute_serial or serial is not None:
            report.serial_state = final if serial is None else serial
            report.error_vs_serial = relative_error(final, report.serial_state)
        _fill_exact_error(report, problem, T)
        return report

    slices = list(decomposition)
    if scalar:
        nodes = space.nodes()
        tasks = [(j, k) for j in range(N) for k in range(len(nodes))]
        labels = [f"slice {j + 1}, sample {k} (xi={nodes[k]!r})" for j, k in tasks]

        def run(task):
            j, k = task
            t = time.perf_counter()
            out = propagate(problem, float(nodes[k]), slices[j][0], slices[j][1], dt)
            return out, time.perf_counter() - t
    else:
        runs = _basis_runs(problem)
        tasks = [(j, r) for j in range(N) for r in range(len(runs))]
        labels = [f"slice {j + 1}, run {r}" for j, r in tasks]

        def run(task):
            j, r = task
            y, homogeneous = runs[r]
            t = time.perf_counter()
            out = propagate(problem, y, slices[j][0], slices[j][1], dt,
                            homogeneous=homogeneous)
            return out, time.perf_counter() - t

    results = parallel_map(run, tasks, workers=config.workers, labels=labels)

    per_task = len(tasks) // N
    per_slice_compute = []
    per_slice_work = []
    maps = []
    for j in range(N):
        chunk = results[j * per_task:(j + 1) * per_task]
        per_slice_compute.append(sum(sec for _, sec in chunk))
        n, _ = decomposition.steps(j + 1)
        per_slice_work.append(n * per_task)
        outputs = [out for out, _ in chunk]
        if scalar:
            maps.append(SliceMap(j + 1, InterpolantData.from_samples(nodes, outputs), space,
                                 *slices[j]))
        else:
            maps.append(_assemble_propagator(problem, outputs, j + 1))

    final, stats, extrapolated = compose_sweep(maps, y0, config)
    report = RunReport(
        "nievergelt", final,
        T_comm=stats.t_comm, T_apply=stats.t_apply, T_latency=stats.t_latency,
        message_count=stats.messages, bytes_communicated=stats.bytes,
        per_slice_compute=per_slice_compute, per_slice_work=per_slice_work,
        extrapolation_count=extrapolated, config=cfg,
    )
    apply_cost = stats.t_apply / N
    report.modeled_time = modeled_time_nievergelt(per_slice_compute,
                                                  config.latency_per_receive, apply_cost)
    report.T_total = time.perf_counter() - t_begin
    if serial is not None:
        report.serial_state = serial
    elif compute_serial:
        report.serial_state = serial_solve(problem, dt, t0, T)
    if report.serial_state is not None:
        report.error_vs_serial = relative_error(final, report.serial_state)
    _fill_exact_error(report, problem, T)
    return report


def _fill_exact_error(report, problem, T):
    exact = exact_final(problem, T)
    if exact is not None:
        report.error_vs_exact = max_error(report.final_state, exact)


__all__ = [
    "AffinePropagator", "NoRealRoot", "RunReport", "SliceMap",
    "build_affine_propagator", "build_scalar_slice_map", "compose_sweep",
    "run_nievergelt", "serial_solve",
]
