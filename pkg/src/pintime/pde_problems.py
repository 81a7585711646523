"""Linear test problems: a variable-coefficient heat equation and a spectral wave equation."""
from dataclasses import dataclass, field
import math

import numpy as np

from . import kernels
from .errors import BadGrid
from .interp import cheb_diff_matrix
from .ode_core import LinearIVP, tridiagonal_system


# ---------------------------------------------------------------------------
# heat equation  y_t = a(t) y_xx + b(x, t)  on (0, 1), y = cos(t) sin(pi x)

def heat_coefficient(t):
    return 1.0 + math.sin(t) / 4.0


def heat_exact(x, t):
    return math.cos(t) * np.sin(np.pi * np.asarray(x, dtype=float))


def heat_forcing(x, t):
    """Forcing that makes ``cos(t) sin(pi x)`` an exact solution.

    ``b = -sin(t) sin(pi x) + a(t) pi**2 cos(t) sin(pi x)``.
    """
    s = np.sin(np.pi * np.asarray(x, dtype=float))
    out = (-math.sin(t) + heat_coefficient(t) * math.pi ** 2 * math.cos(t)) * s
    return float(out) if np.ndim(out) == 0 else out


def heat_interior_count(dx):
    if not dx > 0:
        raise BadGrid(f"dx must be positive, got {dx!r}")
    ratio = 1.0 / dx
    n = round(ratio)
    if n < 2 or abs(ratio - n) > 1e-9 * ratio:
        raise BadGrid(f"1/dx must be an integer >= 2, got dx={dx!r}")
    return n - 1


def make_heat_system(dx):
    """Centered-difference semi-discretization on the interior points ``i dx``.

    ``A(t) = a(t) tridiag(1, -2, 1) / dx**2``; the forcing is sampled from
    :func:`heat_forcing`.
    """
    m = heat_interior_count(dx)
    x = dx * np.arange(1, m + 1)
    inv = 1.0 / (dx * dx)
    lower = np.full(m, inv)
    upper = np.full(m, inv)
    lower[0] = 0.0
    upper[-1] = 0.0
    diag = np.full(m, -2.0 * inv)
    profile = np.sin(np.pi * x)

    def forcing(t):
        return (-math.sin(t) + heat_coefficient(t) * math.pi ** 2 * math.cos(t)) * profile

    def exact(t):
        return math.cos(t) * profile

    return tridiagonal_system(lower, diag, upper, heat_coefficient, forcing=forcing,
                              exact=exact, meta={"dx": dx, "x": x, "name": "heat"})


def make_heat_problem(dx, T=10.0):
    """Heat system with initial state ``sin(pi x_i)`` on ``[0, T]``."""
    system = make_heat_system(dx)
    return LinearIVP(system, system.exact(0.0), 0.0, float(T), exact=system.exact)


# ---------------------------------------------------------------------------
# wave equation  y_tt = y_xx  with Chebyshev collocation and leapfrog

@dataclass(frozen=True, eq=False)
class WaveProblem:
    """Spectral wave problem; the state is the stacked pair ``(y^n, y^{n-1})``.

    Both halves hold the ``M - 1`` interior values; boundary values are zero.
    """

    M: int
    x: np.ndarray
    D: np.ndarray
    D2_full: np.ndarray
    D2: np.ndarray
    dt: float
    y_init: np.ndarray
    y_prev_init: np.ndarray
    x0: float
    sigma: float
    T: float = 16.0
    t0: float = 0.0
    meta: dict = field(default_factory=dict)

    has_forcing = False
    exact = None

    @property
    def interior(self):
        return self.M - 1

    @property
    def dim(self):
        return 2 * self.interior

    @property
    def bytes_per_state(self):
        return 8 * self.dim

    @property
    def y0(self):
        return np.concatenate([self.y_init, self.y_prev_init])

    def pulse(self, t):
        """Free-space solution ``p(x + t)`` on the interior grid (valid before reflection)."""
        xi = self.x[1:-1]
        return np.exp(-self.sigma * (xi + t - self.x0) ** 2)

    def split(self, state):
        state = np.asarray(state, dtype=float)
        m = self.interior
        return state[:m], state[m:]

    def full_grid(self, interior_values):
        out = np.zeros(self.M + 1)
        out[1:-1] = interior_values
        return out

    def advance(self, y, t_start, h, n, homogeneous=False):
        """``n`` leapfrog steps; ``h`` must equal the problem's ``dt``."""
        if n and abs(h - self.dt) > 1e-12 * self.dt:
            raise ValueError(f"wave step must be {self.dt!r}, got {h!r}")
        cur, prev = self.split(y)
        if n == 0:
            return np.concatenate([cur, prev])
        cur, prev = kernels.leapfrog_integrate(self.D2, self.dt * self.dt,
                                               np.ascontiguousarray(cur),
                                               np.ascontiguousarray(prev), n)
        return np.concatenate([cur, prev])

    def apply_D2_full(self, v):
        """Full-grid second derivative (boundary rows included)."""
        return self.D2_full @ v


def make_wave_problem(M, x0=0.0, sigma=200.0, domain=(-1.0, 1.0), dt=None, T=16.0):
    """Chebyshev collocation wave problem with ``M + 1`` points and ``dt = 8 / M**2``.

    The initial pair is ``y^0 = p(x)``, ``y^{-1} = p(x - dt)`` with
    ``p(x) = exp(-sigma (x - x0)**2)``, i.e. a pulse moving left.
    """
    if M < 8 or M % 2:
        raise BadGrid(f"M must be an even integer >= 8, got {M!r}")
    a, b = domain
    D, x = cheb_diff_matrix(M, a, b)
    D2_full = D @ D
    D2 = np.ascontiguousarray(D2_full[1:-1, 1:-1])
    step = 8.0 / M ** 2 if dt is None else float(dt)
    xi = x[1:-1]
    y_init = np.exp(-sigma * (xi - x0) ** 2)
    y_prev = np.exp(-sigma * (xi - step - x0) ** 2)
    return WaveProblem(M=M, x=x, D=D, D2_full=D2_full, D2=D2, dt=step,
                       y_init=y_init, y_prev_init=y_prev, x0=x0, sigma=sigma,
                       T=float(T), meta={"name": "wave", "domain": (a, b)})


def make_standing_wave(M, mode=2, domain=(-1.0, 1.0), dt=None, T=16.0):
    """Wave problem started on the standing mode ``cos(w t) sin(mode pi (x - a) / L)``.

    The mode is resolved by the spectral grid, so time-stepping error
    dominates; useful for measuring the order of leapfrog.
    """
    base = make_wave_problem(M, domain=domain, dt=dt, T=T)
    a, b = domain
    omega = mode * math.pi / (b - a)
    shape = np.sin(omega * (base.x[1:-1] - a))
    meta = {"name": "standing wave", "domain": (a, b), "mode": mode, "omega": omega}
    return WaveProblem(M=M, x=base.x, D=base.D, D2_full=base.D2_full, D2=base.D2,
                       dt=base.dt, y_init=shape, y_prev_init=math.cos(omega * base.dt) * shape,
                       x0=math.nan, sigma=math.nan, T=base.T, meta=meta)


def standing_wave_exact(problem, t):
    """Interior values of the continuous standing-mode solution at time ``t``."""
    a, _ = problem.meta["domain"]
    omega = problem.meta["omega"]
    return math.cos(omega * t) * np.sin(omega * (problem.x[1:-1] - a))


def wave_step_map(problem):
    """One leapfrog step as a matrix on the stacked state.

    ``[[2I + dt**2 D2, -I], [I, 0]]``.
    """
    m = problem.interior
    eye = np.eye(m)
    top = np.hstack([2.0 * eye + problem.dt ** 2 * problem.D2, -eye])
    bottom = np.hstack([eye, np.zeros((m, m))])
    return np.vstack([top, bottom])
