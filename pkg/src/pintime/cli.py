"""Benchmark command line.

Subcommands::

    pintime scalar-table   error grid for y' = y**2 over dt x M
    pintime compare        Nievergelt vs parareal errors per slice count
    pintime heat           timing/communication table for the heat equation
    pintime wave           timing/communication table for the wave equation
    pintime costmodel      fit device cost parameters from a timing fixture

Exit codes: 0 success, 1 numerical failure, 2 bad arguments.
"""
import argparse
import sys

from . import cost_model
from .errors import BadGrid, PintimeError
from .exec_harness import ExecConfig, default_workers
from .interp import NODE_FAMILIES, InitialValueSpace
from .kernels import BACKEND
from .nievergelt import run_nievergelt, serial_solve
from .ode_core import riccati_problem
from .parareal import PararealConfig, parareal_sweep, run_parareal
from .pde_problems import make_heat_problem, make_wave_problem
from .tables import Table, render

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2

TIMING_COLUMNS = ["algorithm", "k", "N", "T_total", "T_comm", "T_modeled", "messages",
                  "bytes", "error_vs_serial", "error_vs_exact"]


def _list_of(kind):
    def parse(text):
        try:
            values = [kind(v) for v in text.split(",") if v.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")
        if not values:
            raise argparse.ArgumentTypeError("empty list")
        return values
    return parse


def _positive_float(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _nonneg_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _add_output(p):
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.add_argument("--output", metavar="PATH", help="write here instead of standard output")
    p.add_argument("--precision", type=int, default=3,
                   help="significant digits; 0 prints full precision (default 3)")


def _add_exec(p):
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (default: $PINTIME_WORKERS or 1)")
    p.add_argument("--latency", type=_nonneg_float, default=0.0,
                   help="seconds of injected delay per received message")
    p.add_argument("--clock", choices=("measured", "modeled", "both"), default="both",
                   help="sleep for injected latency (measured), only model it, or both")


def build_parser():
    parser = argparse.ArgumentParser(prog="pintime", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scalar-table", help="Nievergelt error over a dt x M grid")
    p.add_argument("--dt", type=_list_of(float), default=[0.01, 0.005, 0.0025, 0.001, 0.0001])
    p.add_argument("--cheb-points", type=_list_of(int), default=[3, 4, 5, 6, 7])
    p.add_argument("--slices", type=_list_of(int), default=[4])
    p.add_argument("--final-time", type=_positive_float, default=0.5)
    p.add_argument("--nodes", choices=NODE_FAMILIES, default="lobatto")
    p.add_argument("--xi-range", type=_list_of(float), default=[0.0, 2.0], metavar="A,B")
    _add_exec(p)
    _add_output(p)

    p = sub.add_parser("compare", help="Nievergelt vs parareal error per slice count")
    p.add_argument("--dt", type=_positive_float, default=1e-4)
    p.add_argument("--coarse-dt", type=_positive_float, default=0.1)
    p.add_argument("--cheb-points", type=_list_of(int), default=[6])
    p.add_argument("--iterations", type=_list_of(int), default=[2, 3, 5])
    p.add_argument("--slices", type=_list_of(int), default=[1, 2, 4, 8, 16, 32, 64])
    p.add_argument("--final-time", type=_positive_float, default=0.5)
    p.add_argument("--nodes", choices=NODE_FAMILIES, default="gauss")
    p.add_argument("--xi-range", type=_list_of(float), default=[0.0, 2.0], metavar="A,B")
    _add_exec(p)
    _add_output(p)

    p = sub.add_parser("heat", help="heat equation timing and communication")
    p.add_argument("--dt", type=_positive_float, default=0.005)
    p.add_argument("--dx", type=_positive_float, default=0.1)
    p.add_argument("--final-time", type=_positive_float, default=10.0)
    p.add_argument("--slices", type=_list_of(int), default=[1, 2, 4, 8, 16])
    p.add_argument("--iterations", type=_list_of(int), default=[],
                   help="also run parareal with these iteration counts")
    p.add_argument("--coarse-dt", type=_positive_float, default=0.1)
    _add_exec(p)
    _add_output(p)

    p = sub.add_parser("wave", help="wave equation timing and communication")
    p.add_argument("--wave-points", type=int, default=40)
    p.add_argument("--final-time", type=_positive_float, default=16.0)
    p.add_argument("--slices", type=_list_of(int), default=[1, 2, 4, 8, 16])
    _add_exec(p)
    _add_output(p)

    p = sub.add_parser("costmodel", help="fit device cost parameters")
    p.add_argument("fixture", nargs="?", default=str(cost_model.FIXTURE),
                   help="observation file: dt, N, M, T_total[, ratio] per line")
    p.add_argument("--final-time", type=_positive_float, default=cost_model.DEFAULT_HORIZON,
                   help="problem horizon used to turn dt into a step count")
    p.add_argument("--weighting", choices=("absolute", "relative"), default="absolute")
    _add_output(p)
    return parser


def _exec_config(args):
    workers = args.workers if args.workers is not None else default_workers()
    return ExecConfig(workers, args.latency, args.clock)


def _manifest(args):
    keys = sorted(k for k in vars(args) if k not in ("format", "output"))
    return {"command": args.command,
            "parameters": " ".join(f"{k}={_echo(getattr(args, k))}" for k in keys),
            "backend": BACKEND}


def _echo(value):
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


def _xi_space(args, M):
    a, b = args.xi_range
    return InitialValueSpace(a, b, M, args.nodes)


def cmd_scalar_table(args):
    config = _exec_config(args)
    problem = riccati_problem(T=args.final_time)
    table = Table(["dt", "N"] + [f"M={M}" for M in args.cheb_points], meta=_manifest(args))
    for N in args.slices:
        for dt in args.dt:
            errors = [run_nievergelt(problem, N, dt, _xi_space(args, M), config,
                                     compute_serial=False).error_vs_exact
                      for M in args.cheb_points]
            table.add(dt, N, *errors)
    return table


def cmd_compare(args):
    config = _exec_config(args)
    problem = riccati_problem(T=args.final_time)
    columns = ["N"] + [f"nievergelt_M{M}" for M in args.cheb_points]
    columns += [f"parareal_k{k}" for k in args.iterations]
    table = Table(columns, meta=_manifest(args))
    kmax = max(args.iterations)
    for N in args.slices:
        row = [N]
        for M in args.cheb_points:
            row.append(run_nievergelt(problem, N, args.dt, _xi_space(args, M), config,
                                      compute_serial=False).error_vs_exact)
        finals, _ = parareal_sweep(problem, PararealConfig(args.dt, args.coarse_dt, kmax, N),
                                   exec_config=config)
        exact = problem.exact(problem.T)
        row.extend(abs(finals[k] - exact) for k in args.iterations)
        table.add(*row)
    return table


def _timing_row(table, report, k=None):
    N = report.config["N"]
    table.add(report.algorithm, k, N, report.T_total,
              None if N == 1 else report.T_comm,
              report.modeled_time, report.message_count, report.bytes_communicated,
              report.error_vs_serial, report.error_vs_exact)


def _timing_table(args, problem, dt, iterations=()):
    config = _exec_config(args)
    table = Table(list(TIMING_COLUMNS), meta=_manifest(args))
    serial = serial_solve(problem, dt)
    for N in args.slices:
        _timing_row(table, run_nievergelt(problem, N, dt, config=config, serial=serial))
    for k in iterations:
        for N in args.slices:
            report = run_parareal(problem, PararealConfig(dt, args.coarse_dt, k, N),
                                  exec_config=config, serial=serial)
            _timing_row(table, report, k)
    return table


def cmd_heat(args):
    problem = make_heat_problem(args.dx, T=args.final_time)
    return _timing_table(args, problem, args.dt, args.iterations)


def cmd_wave(args):
    problem = make_wave_problem(args.wave_points, T=args.final_time)
    return _timing_table(args, problem, problem.dt)


def cmd_costmodel(args):
    obs = cost_model.load_observations(args.fixture, horizon=args.final_time)
    if not obs:
        raise ValueError(f"{args.fixture}: no observations")
    fit = cost_model.fit_params(obs, weighting=args.weighting)
    ref = cost_model.REFERENCE_PARAMS
    meta = _manifest(args)
    p = fit.params
    meta["fit"] = (f"tau_F={p.tau_F!r} tau_N={p.tau_N!r} tau_K={p.tau_K!r} "
                   f"tau_F_cpu={p.tau_F_cpu!r} weighting={fit.weighting}")
    table = Table(["dt", "N", "M", "n", "T_total", "T_fit", "residual", "T_reference"],
                  meta=meta)
    for o, pred, res in zip(obs, fit.predictions, fit.residuals):
        table.add(o.dt, o.N, o.M, o.n, o.total, float(pred), float(res),
                  cost_model.device_cost(o.n, o.N, o.M, ref))
    return table


COMMANDS = {
    "scalar-table": cmd_scalar_table,
    "compare": cmd_compare,
    "heat": cmd_heat,
    "wave": cmd_wave,
    "costmodel": cmd_costmodel,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "xi_range", None) is not None and len(args.xi_range) != 2:
        parser.error("--xi-range takes exactly two values A,B")
    if getattr(args, "workers", None) is not None and args.workers < 1:
        parser.error("--workers must be at least 1")
    try:
        table = COMMANDS[args.command](args)
    except cost_model.RankDeficient as exc:
        print(f"pintime: {exc}\n  hint: the fixture needs rows with at least three "
              "distinct (n*M/N, N) combinations", file=sys.stderr)
        return EXIT_NUMERICAL
    except BadGrid as exc:
        print(f"pintime: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PintimeError as exc:
        print(f"pintime: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (OSError, ValueError) as exc:
        print(f"pintime: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(table, args.format, args.precision)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
