# cython: language_level=3
"""Compiled inner loops.

Each routine mirrors one in ``_pykernels`` operation for operation so the two
backends agree to the last bit on the scalar and tridiagonal paths.  The
loops release the GIL, which is what lets ``parallel_map`` overlap tasks on
threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, NAN

cnp.import_array()


def riccati_integrate(double y, double h, Py_ssize_t n):
    """Backward Euler for y' = y**2, ``n`` steps of size ``h``.

    Returns NaN as soon as a step has no real root.
    """
    cdef Py_ssize_t i
    cdef double disc
    with nogil:
        for i in range(n):
            disc = 1.0 - 4.0 * h * y
            if disc < 0.0:
                y = NAN
                break
            y = 2.0 * y / (1.0 + sqrt(disc))
    return y


cdef void _thomas(Py_ssize_t m, double* sub, double* dg, double* sup,
                  double* rhs, double* cp, double* dp, double* x) noexcept nogil:
    cdef Py_ssize_t i
    cdef double piv
    cp[0] = sup[0] / dg[0]
    dp[0] = rhs[0] / dg[0]
    for i in range(1, m):
        piv = dg[i] - sub[i] * cp[i - 1]
        cp[i] = sup[i] / piv
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / piv
    x[m - 1] = dp[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]


def thomas_solve(double[::1] sub, double[::1] dg, double[::1] sup, double[::1] rhs):
    """Solve one tridiagonal system; ``sub[0]`` and ``sup[-1]`` are ignored."""
    cdef Py_ssize_t m = dg.shape[0]
    cdef cnp.ndarray[cnp.double_t, ndim=1] x = np.empty(m)
    cdef double[::1] cp = np.empty(m)
    cdef double[::1] dp = np.empty(m)
    cdef double[::1] xv = x
    with nogil:
        _thomas(m, &sub[0], &dg[0], &sup[0], &rhs[0], &cp[0], &dp[0], &xv[0])
    return x


def tridiag_be_integrate(double[::1] y0, double[::1] lower, double[::1] diag,
                         double[::1] upper, double[::1] coef, forcing, double h):
    """Backward Euler for y' = coef(t) * L y + f(t) with constant tridiagonal L.

    ``coef[i]`` and ``forcing[i]`` are evaluated at the end of step ``i``;
    ``forcing`` may be None for the homogeneous problem.
    """
    cdef Py_ssize_t m = y0.shape[0]
    cdef Py_ssize_t nsteps = coef.shape[0]
    cdef Py_ssize_t i, k
    cdef double c
    cdef bint forced = forcing is not None
    cdef double[:, ::1] f
    if forced:
        f = np.ascontiguousarray(forcing, dtype=np.float64)
    else:
        f = np.zeros((1, 1))
    cdef cnp.ndarray[cnp.double_t, ndim=1] out = np.array(y0, dtype=np.float64)
    cdef double[::1] y = out
    cdef double[::1] sub = np.empty(m)
    cdef double[::1] dg = np.empty(m)
    cdef double[::1] sup = np.empty(m)
    cdef double[::1] rhs = np.empty(m)
    cdef double[::1] cp = np.empty(m)
    cdef double[::1] dp = np.empty(m)
    if m == 0:
        return out
    with nogil:
        for i in range(nsteps):
            c = coef[i]
            for k in range(m):
                sub[k] = -h * c * lower[k]
                dg[k] = 1.0 - h * c * diag[k]
                sup[k] = -h * c * upper[k]
                if forced:
                    rhs[k] = y[k] + h * f[i, k]
                else:
                    rhs[k] = y[k]
            _thomas(m, &sub[0], &dg[0], &sup[0], &rhs[0], &cp[0], &dp[0], &y[0])
    return out


def leapfrog_integrate(double[:, ::1] D2, double dt2, double[::1] y_curr,
                       double[::1] y_prev, Py_ssize_t n):
    """``n`` leapfrog steps y+ = 2y - y- + dt2 * D2 y on interior unknowns."""
    cdef Py_ssize_t m = y_curr.shape[0]
    cdef Py_ssize_t s, i, j
    cdef double acc
    cdef cnp.ndarray[cnp.double_t, ndim=1] a = np.array(y_curr, dtype=np.float64)
    cdef cnp.ndarray[cnp.double_t, ndim=1] b = np.array(y_prev, dtype=np.float64)
    cdef double[::1] cur = a
    cdef double[::1] prev = b
    cdef double[::1] nxt = np.empty(m)
    with nogil:
        for s in range(n):
            for i in range(m):
                acc = 0.0
                for j in range(m):
                    acc = acc + D2[i, j] * cur[j]
                nxt[i] = 2.0 * cur[i] - prev[i] + dt2 * acc
            for i in range(m):
                prev[i] = cur[i]
                cur[i] = nxt[i]
    return a, b
