import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pintime import kernels
from pintime.kernels import get_backend

py = get_backend("python")

try:
    cc = get_backend("compiled")
except ImportError:
    cc = None

needs_compiled = pytest.mark.skipif(cc is None, reason="compiled kernels not built")


def random_tridiag(rng, m, h=1e-3):
    lower = rng.uniform(0.5, 1.5, m)
    upper = rng.uniform(0.5, 1.5, m)
    diag = -(lower + upper) - rng.uniform(0, 1, m)
    lower[0] = upper[-1] = 0.0
    return lower, diag, upper


def test_backend_names():
    assert kernels.BACKEND in ("compiled", "python")
    assert get_backend() in (py, cc)
    with pytest.raises(ValueError):
        get_backend("fortran")


def test_riccati_python_oracle():
    y = py.riccati_integrate(1.0, 1e-3, 10)
    z = 1.0
    for _ in range(10):
        z = (1.0 - math.sqrt(1.0 - 4e-3 * z)) / 2e-3
    assert y == pytest.approx(z, rel=1e-13)


def test_riccati_blowup_is_nan():
    for backend in filter(None, (py, cc)):
        assert math.isnan(backend.riccati_integrate(1.0, 0.25, 2))
        assert backend.riccati_integrate(1.0, 0.25, 1) == 2.0


def test_thomas_python_oracle():
    rng = np.random.default_rng(3)
    m = 12
    sub, dg, sup = random_tridiag(rng, m)
    rhs = rng.standard_normal(m)
    A = np.diag(dg) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    np.testing.assert_allclose(py.thomas_solve(sub, dg, sup, rhs), np.linalg.solve(A, rhs),
                               rtol=1e-12)


@needs_compiled
@settings(max_examples=30, deadline=None)
@given(y=st.floats(0.0, 2.0), h=st.floats(1e-5, 1e-2), n=st.integers(0, 200))
def test_riccati_backends_identical(y, h, n):
    a, b = py.riccati_integrate(y, h, n), cc.riccati_integrate(y, h, n)
    assert a == b or (math.isnan(a) and math.isnan(b))


@needs_compiled
@pytest.mark.parametrize("m", [1, 2, 9, 40])
def test_thomas_backends_identical(m):
    rng = np.random.default_rng(m)
    sub, dg, sup = random_tridiag(rng, m)
    rhs = rng.standard_normal(m)
    np.testing.assert_array_equal(py.thomas_solve(sub, dg, sup, rhs),
                                  cc.thomas_solve(sub, dg, sup, rhs))


@needs_compiled
@pytest.mark.parametrize("forced", [False, True])
def test_tridiag_backends_identical(forced):
    rng = np.random.default_rng(11)
    m, steps = 9, 30
    lower, diag, upper = random_tridiag(rng, m)
    coef = 1.0 + 0.25 * np.sin(np.arange(steps) * 0.01)
    forcing = rng.standard_normal((steps, m)) if forced else None
    y0 = rng.standard_normal(m)
    np.testing.assert_array_equal(py.tridiag_be_integrate(y0, lower, diag, upper, coef, forcing, 0.01),
                                  cc.tridiag_be_integrate(y0, lower, diag, upper, coef, forcing, 0.01))


@needs_compiled
def test_tridiag_no_steps():
    y0 = np.arange(3.0)
    z = np.zeros(3)
    out = cc.tridiag_be_integrate(y0, z, z, z, np.zeros(0), None, 0.1)
    np.testing.assert_array_equal(out, y0)
    np.testing.assert_array_equal(py.tridiag_be_integrate(y0, z, z, z, np.zeros(0), None, 0.1), y0)


@needs_compiled
def test_leapfrog_backends_agree_to_rounding():
    rng = np.random.default_rng(5)
    m = 20
    D2 = -np.diag(np.full(m, 2.0)) + np.diag(np.ones(m - 1), 1) + np.diag(np.ones(m - 1), -1)
    cur, prev = rng.standard_normal(m), rng.standard_normal(m)
    a = py.leapfrog_integrate(D2, 0.1, cur, prev, 50)
    b = cc.leapfrog_integrate(np.ascontiguousarray(D2), 0.1, cur, prev, 50)
    scale = max(1.0, np.max(np.abs(a[0])))
    assert np.max(np.abs(a[0] - b[0])) <= 1e-12 * scale
    assert np.max(np.abs(a[1] - b[1])) <= 1e-12 * scale
