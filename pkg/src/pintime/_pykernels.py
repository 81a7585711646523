"""Pure-Python versions of the compiled kernels in ``_ckernels.pyx``.

Same signatures, same operation order.  The leapfrog loop uses a numpy
matrix-vector product, so it agrees with the compiled version only to
rounding.
"""
import math

import numpy as np


def riccati_integrate(y, h, n):
    y = float(y)
    for _ in range(n):
        disc = 1.0 - 4.0 * h * y
        if disc < 0.0:
            return math.nan
        y = 2.0 * y / (1.0 + math.sqrt(disc))
    return y


def _thomas(sub, dg, sup, rhs):
    m = len(dg)
    cp = [0.0] * m
    dp = [0.0] * m
    cp[0] = sup[0] / dg[0]
    dp[0] = rhs[0] / dg[0]
    for i in range(1, m):
        piv = dg[i] - sub[i] * cp[i - 1]
        cp[i] = sup[i] / piv
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / piv
    x = [0.0] * m
    x[m - 1] = dp[m - 1]
    for i in range(m - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def thomas_solve(sub, dg, sup, rhs):
    return np.array(_thomas([float(v) for v in sub], [float(v) for v in dg],
                            [float(v) for v in sup], [float(v) for v in rhs]))


def tridiag_be_integrate(y0, lower, diag, upper, coef, forcing, h):
    y = [float(v) for v in y0]
    m = len(y)
    if m == 0:
        return np.array(y, dtype=float)
    lower = [float(v) for v in lower]
    diag = [float(v) for v in diag]
    upper = [float(v) for v in upper]
    f = None if forcing is None else np.asarray(forcing, dtype=float).tolist()
    for i, c in enumerate(coef):
        c = float(c)
        sub = [-h * c * lower[k] for k in range(m)]
        dg = [1.0 - h * c * diag[k] for k in range(m)]
        sup = [-h * c * upper[k] for k in range(m)]
        if f is None:
            rhs = y
        else:
            fi = f[i]
            rhs = [y[k] + h * fi[k] for k in range(m)]
        y = _thomas(sub, dg, sup, rhs)
    return np.array(y)


def leapfrog_integrate(D2, dt2, y_curr, y_prev, n):
    cur = np.array(y_curr, dtype=float)
    prev = np.array(y_prev, dtype=float)
    for _ in range(n):
        cur, prev = 2.0 * cur - prev + dt2 * (D2 @ cur), cur
    return cur, prev
