"""Cost model for running the slice-map construction on a many-worker device.

Device time for ``n`` fine steps, ``N`` slices and ``M`` samples per slice::

    C_G = (M n / N) tau_F + N tau_N + tau_K

and the serial time is ``C_C = n tau_F_cpu``.  All times are in microseconds.
"""
from dataclasses import dataclass
import math
from pathlib import Path

import numpy as np

from .errors import RankDeficient

DEFAULT_HORIZON = 0.5
FIXTURE = Path(__file__).with_name("data") / "table3.txt"


@dataclass(frozen=True)
class CostParams:
    tau_F: float
    tau_N: float
    tau_K: float
    tau_F_cpu: float

    def __post_init__(self):
        for name in ("tau_F", "tau_N", "tau_K", "tau_F_cpu"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def kappa_F(self):
        return self.tau_F_cpu / self.tau_F

    @property
    def kappa_N(self):
        return self.tau_N / self.tau_F


# values reported for a Tesla C2075 against a six-core Opteron
REFERENCE_PARAMS = CostParams(tau_F=0.040, tau_N=0.701, tau_K=137.0, tau_F_cpu=0.051)


@dataclass(frozen=True)
class CostObservation:
    dt: float
    N: int
    M: int
    total: float
    ratio: float = float("nan")
    horizon: float = DEFAULT_HORIZON

    @property
    def n(self):
        n = self.horizon / self.dt
        steps = round(n)
        if steps < 1 or abs(n - steps) > 1e-9 * n:
            raise ValueError(f"horizon/dt = {n!r} is not a positive integer")
        return steps

    @property
    def serial_total(self):
        return self.ratio * self.total


def device_cost(n, N, M, p):
    return (M * n / N) * p.tau_F + N * p.tau_N + p.tau_K


def serial_cost(n, p):
    return n * p.tau_F_cpu


def speedup(n, N, M, p):
    """Exact ratio ``C_C / C_G``."""
    return serial_cost(n, p) / device_cost(n, N, M, p)


def speedup_approx(n, N, M, kappa_F, kappa_N):
    """``N n kappa_F / (M n + N**2 kappa_N)`` (fixed overhead dropped)."""
    return N * n * kappa_F / (M * n + N * N * kappa_N)


def optimal_slices(n, alpha, kappa_N, kappa_F=1.0):
    """Slice count balancing construction and sweep when ``M ~ n**alpha``.

    Returns ``(N, predicted_speedup)`` with ``N = round(sqrt(n**(alpha+1) / kappa_N))``
    and the asymptotic speedup ``kappa_F / (2 sqrt(kappa_N)) * n**((1 - alpha) / 2)``.
    """
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    if kappa_N <= 0:
        raise ValueError("kappa_N must be positive")
    N = max(1, int(round(math.sqrt(n ** (alpha + 1) / kappa_N))))
    predicted = kappa_F / (2.0 * math.sqrt(kappa_N)) * n ** ((1.0 - alpha) / 2.0)
    return N, predicted


@dataclass(frozen=True)
class FitResult:
    params: CostParams
    residuals: np.ndarray
    predictions: np.ndarray
    weighting: str


def fit_params(observations, weighting="absolute"):
    """Least-squares fit of ``(tau_F, tau_N, tau_K)`` to device totals.

    ``weighting="absolute"`` is plain unweighted least squares;
    ``"relative"`` minimises relative residuals (each row divided by its
    measured total).  ``tau_F_cpu`` is fitted separately from ``ratio * total``
    through the origin, when ratios are present.
    """
    obs = list(observations)
    if len(obs) < 3:
        raise RankDeficient("need at least three observations")
    A = np.array([[o.M * o.n / o.N, o.N, 1.0] for o in obs])
    b = np.array([o.total for o in obs])
    if np.linalg.matrix_rank(A) < 3:
        raise RankDeficient("observations do not separate tau_F, tau_N and tau_K; "
                            "vary n*M/N and N independently")
    if weighting == "relative":
        w = 1.0 / b
    elif weighting == "absolute":
        w = np.ones_like(b)
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    tau, *_ = np.linalg.lstsq(A * w[:, None], b * w, rcond=None)

    cpu = [(o.n, o.serial_total) for o in obs if math.isfinite(o.ratio)]
    if cpu:
        n_arr = np.array([c[0] for c in cpu], dtype=float)
        t_arr = np.array([c[1] for c in cpu])
        tau_cpu = float(n_arr @ t_arr / (n_arr @ n_arr))
    else:
        tau_cpu = 0.0
    # exact data with a zero parameter can come back as -1e-15
    tau = np.where((tau < 0) & (tau > -1e-9 * np.max(np.abs(tau))), 0.0, tau)
    if np.any(tau < 0):
        raise RankDeficient(f"fit produced negative costs {tau.tolist()}; "
                            "the observations do not support this model")
    params = CostParams(float(tau[0]), float(tau[1]), float(tau[2]), tau_cpu)
    predictions = A @ tau
    return FitResult(params, b - predictions, predictions, weighting)


def parse_observations(lines, horizon=DEFAULT_HORIZON):
    """Parse ``dt, N, M, T_total[, ratio]`` lines; ``#`` starts a comment."""
    obs = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.replace("\t", ",").split(",") if p.strip()]
        if len(parts) not in (4, 5):
            raise ValueError(f"line {lineno}: expected 4 or 5 fields, got {len(parts)}")
        try:
            dt = float(parts[0])
            N = int(parts[1])
            M = int(parts[2])
            total = float(parts[3])
            ratio = float(parts[4]) if len(parts) == 5 else float("nan")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        obs.append(CostObservation(dt, N, M, total, ratio, horizon))
    return obs


def load_observations(path=FIXTURE, horizon=DEFAULT_HORIZON):
    with open(path) as fh:
        return parse_observations(fh, horizon)


def format_observations(observations):
    lines = ["# dt, N, M, T_total, ratio"]
    for o in observations:
        lines.append(f"{o.dt!r}, {o.N}, {o.M}, {o.total!r}, {o.ratio!r}")
    return "\n".join(lines) + "\n"
