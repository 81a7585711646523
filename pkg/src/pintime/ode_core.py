"""Time-stepping primitives.

Backward Euler for scalar problems and for linear systems
``y' = A(t) y + b(t)``, leapfrog for second-order systems, and the slice
integration loops used by every parallel-in-time driver.

Problems expose one method, ``advance(y, t_start, h, n, homogeneous=False)``,
which takes ``n`` steps of size ``h``.  :func:`propagate` turns a time
interval and a nominal step into ``(n, h)`` and calls it.
"""
from dataclasses import dataclass, field
import math
import warnings
from typing import Callable, Optional

import numpy as np
import scipy.linalg
import scipy.optimize

from . import kernels
from .errors import NoRealRoot, NonIntegerStepCount, SingularSystem

STEP_RTOL = 1e-9


# ---------------------------------------------------------------------------
# step counting

def step_count(width, dt, strict=True):
    """Number of steps of size ``dt`` covering ``width``.

    With ``strict=True`` a width that is not an integer multiple of ``dt``
    (relative tolerance 1e-9) raises :class:`NonIntegerStepCount`.  Otherwise
    the count is rounded up, so the realised step never exceeds ``dt``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if width < 0:
        raise ValueError("interval width must be non-negative")
    ratio = width / dt
    n = round(ratio)
    if abs(ratio - n) <= STEP_RTOL * max(1.0, ratio):
        return int(n)
    if strict:
        raise NonIntegerStepCount(
            f"interval of width {width!r} is {ratio!r} steps of {dt!r}, not an integer")
    return int(math.ceil(ratio))


def slice_steps(t_start, t_end, dt, strict=False):
    """``(n, h)``: step count and realised step size for one interval.

    ``h = (t_end - t_start) / n``, which equals ``dt`` up to rounding whenever
    the interval is an integer number of steps.
    """
    width = t_end - t_start
    n = step_count(width, dt, strict=strict)
    if n == 0:
        return 0, dt
    return n, width / n


def step_times(t_start, h, n):
    """End-of-step times ``t_start + (i+1) h`` for ``i < n``."""
    return [t_start + (i + 1) * h for i in range(n)]


@dataclass(frozen=True)
class TimeSliceDecomposition:
    """Uniform partition of ``[t0, T]`` into ``N`` slices with fine step ``dt``.

    ``strict`` controls what happens when a slice is not a whole number of
    steps: raise, or round the step count up and shrink the step.
    """

    t0: float
    T: float
    N: int
    dt: float
    strict: bool = False

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        if not self.T > self.t0:
            raise ValueError("T must exceed t0")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.strict:
            for j in range(1, self.N + 1):
                self.steps(j)

    @property
    def boundaries(self):
        return np.array([self.boundary(j) for j in range(self.N + 1)])

    def boundary(self, j):
        if j == self.N:
            return float(self.T)
        return self.t0 + j * (self.T - self.t0) / self.N

    def slice(self, j):
        """Interval ``(T_{j-1}, T_j)`` for ``j = 1..N``."""
        if not 1 <= j <= self.N:
            raise IndexError(f"slice index {j} outside 1..{self.N}")
        return self.boundary(j - 1), self.boundary(j)

    def steps(self, j):
        t_start, t_end = self.slice(j)
        return slice_steps(t_start, t_end, self.dt, strict=self.strict)

    def __iter__(self):
        return (self.slice(j) for j in range(1, self.N + 1))


# ---------------------------------------------------------------------------
# scalar problems

def be_step_scalar_riccati(y, dt):
    """One backward Euler step for ``y' = y**2``.

    Returns the root of ``z = y + dt z**2`` that tends to ``y`` as ``dt -> 0``,
    written as ``2y / (1 + sqrt(1 - 4 dt y))`` to avoid cancellation.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    disc = 1.0 - 4.0 * dt * y
    if disc < 0.0:
        raise NoRealRoot(f"backward Euler step from y={y!r} with dt={dt!r} has no real root",
                         y=y, dt=dt)
    return 2.0 * y / (1.0 + math.sqrt(disc))


@dataclass(frozen=True, eq=False)
class ScalarIVP:
    """``y' = rhs(t, y)``, ``y(t0) = y0`` on ``[t0, T]``.

    ``kind="riccati"`` marks ``rhs = y**2`` and routes stepping through the
    closed-form kernel; anything else is stepped with Newton's method.
    """

    rhs: Callable[[float, float], float]
    t0: float
    T: float
    y0: float
    exact: Optional[Callable[[float], float]] = None
    kind: str = "generic"
    drhs: Optional[Callable[[float, float], float]] = None

    def __post_init__(self):
        if not self.T > self.t0:
            raise ValueError("T must exceed t0")
        if self.exact is not None and abs(self.exact(self.t0) - self.y0) > 1e-12:
            raise ValueError("exact(t0) does not match y0")

    dim = 1
    bytes_per_state = 8

    def advance(self, y, t_start, h, n, homogeneous=False):
        if n == 0:
            return float(y)
        if self.kind == "riccati":
            out = kernels.riccati_integrate(float(y), h, n)
            if math.isnan(out):
                raise NoRealRoot(f"backward Euler from y={y!r} blows up within {n} steps of {h!r}",
                                 y=y, dt=h)
            return out
        for t_next in step_times(t_start, h, n):
            y = be_step_scalar(self, y, t_next, h)
        return y


def be_step_scalar(problem, y, t_next, dt):
    """Backward Euler step for a general scalar problem (Newton iteration)."""
    if problem.kind == "riccati":
        return be_step_scalar_riccati(y, dt)
    f = problem.rhs

    def residual(z):
        return z - y - dt * f(t_next, z)

    fprime = None
    if problem.drhs is not None:
        def fprime(z):
            return 1.0 - dt * problem.drhs(t_next, z)
    try:
        z, info = scipy.optimize.newton(residual, y, fprime=fprime, tol=1e-14,
                                        maxiter=100, full_output=True, disp=False)
    except (RuntimeError, ZeroDivisionError) as exc:
        raise NoRealRoot(f"Newton failed from y={y!r}: {exc}", y=y, dt=dt) from exc
    if not info.converged or not math.isfinite(z):
        raise NoRealRoot(f"Newton did not converge from y={y!r}", y=y, dt=dt)
    return float(z)


def riccati_problem(y0=1.0, T=0.5, t0=0.0):
    """The model problem ``y' = y**2``; exact solution ``y0 / (1 - y0 (t - t0))``."""
    return ScalarIVP(
        rhs=lambda t, y: y * y,
        t0=t0,
        T=T,
        y0=y0,
        exact=lambda t: y0 / (1.0 - y0 * (t - t0)),
        kind="riccati",
        drhs=lambda t, y: 2.0 * y,
    )


# ---------------------------------------------------------------------------
# linear systems

@dataclass(frozen=True, eq=False)
class LinearSystem:
    """``y' = A(t) y + b(t)`` with ``dim`` unknowns.

    ``solve_implicit(t, dt, rhs)`` solves ``(I - dt A(t)) x = rhs``.  When
    ``A(t) = coef(t) * L`` for a constant tridiagonal ``L`` the triple
    ``(lower, diag, upper)`` and ``coef`` are stored as well, and multi-step
    integration runs in the compiled kernel.
    """

    dim: int
    apply_A: Callable[[float, np.ndarray], np.ndarray]
    forcing: Callable[[float], np.ndarray]
    solve_implicit: Callable[[float, float, np.ndarray], np.ndarray]
    structure: str = "dense"
    tridiag: Optional[tuple] = None
    coef: Optional[Callable[[float], float]] = None
    exact: Optional[Callable[[float], np.ndarray]] = None
    meta: dict = field(default_factory=dict)

    @property
    def bytes_per_state(self):
        return 8 * self.dim

    def advance(self, y, t_start, h, n, homogeneous=False):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.dim,):
            raise ValueError(f"state has shape {y.shape}, expected ({self.dim},)")
        if n == 0:
            return y.copy()
        times = step_times(t_start, h, n)
        if self.tridiag is not None and self.coef is not None:
            lower, diag, upper = self.tridiag
            coef = np.array([self.coef(t) for t in times])
            forcing = None if homogeneous else np.array([self.forcing(t) for t in times])
            out = kernels.tridiag_be_integrate(y, lower, diag, upper, coef, forcing, h)
            if not np.all(np.isfinite(out)):
                raise SingularSystem("tridiagonal backward Euler produced non-finite values")
            return out
        for t_next in times:
            y = be_step_linear(self, y, t_next, h, homogeneous=homogeneous)
        return y


@dataclass(frozen=True, eq=False)
class LinearIVP:
    """A :class:`LinearSystem` with an initial state on ``[t0, T]``."""

    system: LinearSystem
    y0: np.ndarray
    t0: float
    T: float
    exact: Optional[Callable[[float], np.ndarray]] = None

    def __post_init__(self):
        if not self.T > self.t0:
            raise ValueError("T must exceed t0")
        if np.asarray(self.y0).shape != (self.system.dim,):
            raise ValueError("y0 does not match the system dimension")

    has_forcing = True

    @property
    def dim(self):
        return self.system.dim

    @property
    def bytes_per_state(self):
        return self.system.bytes_per_state

    def advance(self, y, t_start, h, n, homogeneous=False):
        return self.system.advance(y, t_start, h, n, homogeneous=homogeneous)


def be_step_linear(sys, y, t_next, dt, homogeneous=False):
    """Solve ``(I - dt A(t_next)) x = y + dt b(t_next)``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    y = np.asarray(y, dtype=float)
    if y.shape != (sys.dim,):
        raise ValueError(f"state has shape {y.shape}, expected ({sys.dim},)")
    rhs = y if homogeneous else y + dt * np.asarray(sys.forcing(t_next), dtype=float)
    try:
        x = sys.solve_implicit(t_next, dt, rhs)
    except (np.linalg.LinAlgError, ZeroDivisionError, ValueError) as exc:
        raise SingularSystem(str(exc)) from exc
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise SingularSystem("implicit solve produced non-finite values")
    return x


def tridiagonal_system(lower, diag, upper, coef, forcing=None, exact=None, meta=None):
    """Linear system ``A(t) = coef(t) * tridiag(lower, diag, upper)``.

    ``lower[0]`` and ``upper[-1]`` are ignored.  ``forcing=None`` means zero.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    dim = len(diag)
    if forcing is None:
        zero = np.zeros(dim)
        forcing = lambda t: zero  # noqa: E731

    def apply_A(t, y):
        y = np.asarray(y, dtype=float)
        out = diag * y
        out[1:] += lower[1:] * y[:-1]
        out[:-1] += upper[:-1] * y[1:]
        return coef(t) * out

    def solve_implicit(t, dt, rhs):
        c = coef(t)
        # same expression order as the kernels
        sub = -dt * c * lower
        dg = 1.0 - dt * c * diag
        sup = -dt * c * upper
        return kernels.thomas_solve(np.ascontiguousarray(sub), np.ascontiguousarray(dg),
                                    np.ascontiguousarray(sup),
                                    np.ascontiguousarray(rhs, dtype=float))

    return LinearSystem(dim=dim, apply_A=apply_A, forcing=forcing,
                        solve_implicit=solve_implicit, structure="tridiagonal",
                        tridiag=(lower, diag, upper), coef=coef, exact=exact,
                        meta=dict(meta or {}))


def dense_system(A, forcing=None, exact=None):
    """Linear system from a matrix-valued function ``A(t)``; LU with partial pivoting."""
    dim = np.asarray(A(0.0)).shape[0]
    if forcing is None:
        zero = np.zeros(dim)
        forcing = lambda t: zero  # noqa: E731

    def apply_A(t, y):
        return np.asarray(A(t), dtype=float) @ np.asarray(y, dtype=float)

    def solve_implicit(t, dt, rhs):
        mat = np.eye(dim) - dt * np.asarray(A(t), dtype=float)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(mat, check_finite=True)
        if np.any(np.diag(lu) == 0.0):
            raise SingularSystem(f"(I - dt A) is singular at t={t!r}")
        return scipy.linalg.lu_solve((lu, piv), rhs)

    return LinearSystem(dim=dim, apply_A=apply_A, forcing=forcing,
                        solve_implicit=solve_implicit, structure="dense", exact=exact)


# ---------------------------------------------------------------------------
# slice loops

def integrate_slice(stepper, y, t_start, t_end, dt):
    """Apply ``stepper(y, t_next, dt)`` exactly ``(t_end - t_start) / dt`` times.

    The step count must be an integer (relative tolerance 1e-9).
    """
    n = step_count(t_end - t_start, dt, strict=True)
    for t_next in step_times(t_start, dt, n):
        y = stepper(y, t_next, dt)
    return y


def propagate(problem, y, t_start, t_end, dt, homogeneous=False, strict=False):
    """Advance ``problem`` from ``t_start`` to ``t_end`` with nominal step ``dt``."""
    n, h = slice_steps(t_start, t_end, dt, strict=strict)
    return problem.advance(y, t_start, h, n, homogeneous=homogeneous)


def leapfrog_integrate(y_curr, y_prev, n_steps, dt, apply_D2):
    """Leapfrog ``y+ = 2y - y- + dt**2 D2(y)`` on a full grid.

    The first and last entries are zeroed after every step (homogeneous
    Dirichlet).  Returns the final ``(y_curr, y_prev)`` pair.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    y_curr = np.array(y_curr, dtype=float)
    y_prev = np.array(y_prev, dtype=float)
    if y_curr.shape != y_prev.shape:
        raise ValueError("y_curr and y_prev differ in length")
    dt2 = dt * dt
    for _ in range(n_steps):
        y_next = 2.0 * y_curr - y_prev + dt2 * np.asarray(apply_D2(y_curr), dtype=float)
        y_next[0] = 0.0
        y_next[-1] = 0.0
        y_prev, y_curr = y_curr, y_next
    return y_curr, y_prev


def observed_order(coarse, mid, fine, ratio=2.0):
    """Richardson order estimate from solutions at steps ``h``, ``h/r``, ``h/r**2``."""
    d1 = np.max(np.abs(np.asarray(coarse) - np.asarray(mid)))
    d2 = np.max(np.abs(np.asarray(mid) - np.asarray(fine)))
    return math.log(d1 / d2) / math.log(ratio)
