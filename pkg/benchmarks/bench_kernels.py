"""Compiled vs pure-Python kernel timings.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on a workload taken from the benchmark problems (one
scalar slice, one heat slice, one wave slice).  Prints best-of-``repeat``
seconds per backend, the speedup, and the max difference between outputs.
"""
import argparse
import sys
import timeit

import numpy as np

from pintime.kernels import get_backend
from pintime.pde_problems import make_heat_system, make_wave_problem


def workloads():
    heat = make_heat_system(0.01)
    lower, diag, upper = heat.tridiag
    h = 0.005
    times = h * np.arange(1, 201)
    coef = np.array([heat.coef(t) for t in times])
    forcing = np.array([heat.forcing(t) for t in times])
    wave = make_wave_problem(40)
    dt2 = wave.dt * wave.dt
    rng = np.random.default_rng(0)
    rhs = rng.standard_normal(99)

    return {
        "riccati_integrate (5000 steps)": lambda k: k.riccati_integrate(1.0, 1e-4, 5000),
        "thomas_solve (99 unknowns)": lambda k: k.thomas_solve(
            -0.5 * lower, 1.0 - 0.5 * diag, -0.5 * upper, rhs),
        "tridiag_be_integrate (99 x 200 steps)": lambda k: k.tridiag_be_integrate(
            np.sin(np.pi * heat.meta["x"]), lower, diag, upper, coef, forcing, h),
        "leapfrog_integrate (M=40, 200 steps)": lambda k: k.leapfrog_integrate(
            wave.D2, dt2, wave.y_init, wave.y_prev_init, 200),
    }


def _flatten(out):
    if isinstance(out, tuple):
        return np.concatenate([np.atleast_1d(o) for o in out])
    return np.atleast_1d(np.asarray(out, dtype=float))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=3, help="calls per timing sample")
    args = parser.parse_args(argv)

    python = get_backend("python")
    try:
        compiled = get_backend("compiled")
    except ImportError:
        print("compiled kernels not built; nothing to compare", file=sys.stderr)
        return 1

    print(f"{'kernel':40s} {'python [s]':>12s} {'compiled [s]':>13s} {'speedup':>9s} {'max diff':>10s}")
    for name, call in workloads().items():
        t_py = min(timeit.repeat(lambda: call(python), number=args.number,
                                 repeat=args.repeat)) / args.number
        t_c = min(timeit.repeat(lambda: call(compiled), number=args.number,
                                repeat=args.repeat)) / args.number
        diff = float(np.max(np.abs(_flatten(call(python)) - _flatten(call(compiled)))))
        print(f"{name:40s} {t_py:12.3e} {t_c:13.3e} {t_py / t_c:9.1f} {diff:10.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
