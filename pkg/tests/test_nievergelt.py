import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pintime.errors import NoRealRoot, TaskError
from pintime.exec_harness import ExecConfig
from pintime.interp import InitialValueSpace
from pintime.nievergelt import (AffinePropagator, build_affine_propagator,
                                build_scalar_slice_map, compose_sweep, run_nievergelt,
                                serial_solve)
from pintime.ode_core import dense_system, LinearIVP, propagate, riccati_problem
from pintime.pde_problems import make_heat_problem

GAUSS6 = InitialValueSpace(0.0, 2.0, 6, "gauss")


class Identity:
    dim = 1

    def apply(self, y):
        return y

    def extrapolates(self, y):
        return False


@pytest.fixture(scope="module")
def riccati():
    return riccati_problem()


@pytest.fixture(scope="module")
def heat():
    return make_heat_problem(0.1, T=10.0)


# ---------------------------------------------------------------------------
# slice maps

def test_slice_map_hits_nodes(riccati):
    phi = build_scalar_slice_map(riccati, (0.0, 0.125), GAUSS6, 1e-4, slice_index=1)
    nodes = GAUSS6.nodes()
    for k, xi in enumerate(nodes):
        assert phi.apply(xi) == phi.interpolant.values[k]
        assert phi.apply(xi) == propagate(riccati, float(xi), 0.0, 0.125, 1e-4)


def test_slice_map_against_direct_integration(riccati):
    phi = build_scalar_slice_map(riccati, (0.0, 0.125), GAUSS6, 1e-4)
    direct = propagate(riccati, 1.0, 0.0, 0.125, 1e-4)
    assert abs(phi.apply(1.0) - direct) <= 1e-3
    # and both sit near the exact value 1 / (1 - 0.125)
    assert direct == pytest.approx(1.0 / 0.875, abs=1e-4)


def test_single_sample_map_is_constant(riccati):
    space = InitialValueSpace(0.0, 2.0, 1)
    phi = build_scalar_slice_map(riccati, (0.0, 0.125), space, 1e-3)
    assert phi.apply(0.1) == phi.apply(1.9) == phi.interpolant.values[0]


def test_slice_map_reports_failing_sample(riccati):
    space = InitialValueSpace(0.0, 20.0, 6)
    with pytest.raises(TaskError) as info:
        build_scalar_slice_map(riccati, (0.0, 0.125), space, 1e-3, slice_index=2)
    assert "slice 2, sample" in str(info.value)
    assert isinstance(info.value.cause, NoRealRoot)


# ---------------------------------------------------------------------------
# affine propagators

def test_propagator_zero_steps(heat):
    P = build_affine_propagator(heat, (1.0, 1.0), 0.005)
    np.testing.assert_array_equal(P.G, np.eye(heat.dim))
    np.testing.assert_array_equal(P.c, np.zeros(heat.dim))


def test_propagator_scalar_decay():
    problem = LinearIVP(dense_system(lambda t: np.array([[-1.0]])), np.array([1.0]), 0.0, 1.0)
    P = build_affine_propagator(problem, (0.0, 0.1), 0.1)
    assert P.G[0, 0] == pytest.approx(1.0 / 1.1, rel=1e-15)
    assert P.c[0] == 0.0


def test_heat_propagator_matches_serial(heat):
    P = build_affine_propagator(heat, (0.0, 1.0), 0.005)
    rng = np.random.default_rng(7)
    for _ in range(5):
        y0 = rng.standard_normal(heat.dim)
        direct = propagate(heat, y0, 0.0, 1.0, 0.005)
        assert np.max(np.abs(P.apply(y0) - direct)) <= 1e-12


def test_propagator_parallel_build_identical(heat):
    a = build_affine_propagator(heat, (2.0, 3.0), 0.005, workers=1)
    b = build_affine_propagator(heat, (2.0, 3.0), 0.005, workers=4)
    np.testing.assert_array_equal(a.G, b.G)
    np.testing.assert_array_equal(a.c, b.c)


# ---------------------------------------------------------------------------
# sweep

@given(N=st.integers(1, 40), y0=st.floats(-10, 10))
def test_identity_sweep(N, y0):
    final, stats, extrapolated = compose_sweep([Identity()] * N, y0)
    assert final == y0
    assert stats.messages == N - 1
    assert stats.bytes == 8 * (N - 1)
    assert extrapolated == 0


def test_single_map_no_communication():
    _, stats, _ = compose_sweep([Identity()], 1.0)
    assert stats.messages == 0 and stats.t_latency == 0.0


def test_affine_sweep_bytes():
    maps = [AffinePropagator(np.eye(3), np.ones(3), j) for j in range(4)]
    final, stats, _ = compose_sweep(maps, np.zeros(3))
    np.testing.assert_array_equal(final, [4.0, 4.0, 4.0])
    assert stats.bytes == 3 * 8 * 3


def test_sweep_latency_is_accounted():
    _, stats, _ = compose_sweep([Identity()] * 5, 0.0,
                                config=ExecConfig(1, 0.01, "modeled"))
    assert stats.t_latency == pytest.approx(0.04)
    assert stats.t_comm < 0.04


# ---------------------------------------------------------------------------
# full runs, scalar problem

def test_single_slice_is_serial(riccati):
    report = run_nievergelt(riccati, 1, 1e-4, GAUSS6)
    assert report.final_state == serial_solve(riccati, 1e-4)
    assert report.error_vs_serial == 0.0
    assert report.message_count == 0
    assert report.T_comm == 0.0


def test_four_slices_six_nodes(riccati):
    # printed as 2.83e-4
    report = run_nievergelt(riccati, 4, 1e-4, GAUSS6)
    assert report.error_vs_exact == pytest.approx(2.83e-4, rel=0.05)
    assert report.message_count == 3
    assert report.bytes_communicated == 24


def test_four_slices_five_nodes(riccati):
    # printed as 0.000050
    report = run_nievergelt(riccati, 4, 1e-4, InitialValueSpace(0.0, 2.0, 5, "lobatto"))
    assert report.error_vs_exact == pytest.approx(5.0e-5, rel=0.15)


@pytest.mark.parametrize("M", [6, 7, 8])
def test_recovers_time_discretization_error(riccati, M):
    serial_err = abs(serial_solve(riccati, 1e-4) - 2.0)
    for family in ("gauss", "lobatto"):
        report = run_nievergelt(riccati, 4, 1e-4, InitialValueSpace(0.0, 2.0, M, family),
                                compute_serial=False)
        assert serial_err / 2 <= report.error_vs_exact <= 2 * serial_err


@pytest.mark.slow
def test_error_envelope_over_slice_counts(riccati):
    for N in (2, 4, 8, 16, 32, 64):
        report = run_nievergelt(riccati, N, 1e-4, GAUSS6, compute_serial=False)
        assert 1e-4 <= report.error_vs_exact <= 1e-3, N


def test_extrapolation_counted(riccati):
    narrow = InitialValueSpace(0.0, 1.5, 6)
    report = run_nievergelt(riccati, 4, 1e-3, narrow, compute_serial=False)
    # entry states above 1.5 appear once t > 1/3
    assert report.extrapolation_count >= 1
    wide = run_nievergelt(riccati, 4, 1e-3, GAUSS6, compute_serial=False)
    assert wide.extrapolation_count == 0


def test_task_failure_attribution(riccati):
    with pytest.raises(TaskError) as info:
        run_nievergelt(riccati, 4, 1e-3, InitialValueSpace(0.0, 20.0, 6))
    assert "slice 1, sample" in str(info.value)


@settings(max_examples=15, deadline=None)
@given(N=st.integers(2, 12), M=st.integers(1, 8), steps=st.integers(20, 60))
def test_message_count_invariant(riccati, N, M, steps):
    dt = 0.5 / (N * steps)
    report = run_nievergelt(riccati, N, dt, InitialValueSpace(0.0, 2.0, M),
                            compute_serial=False)
    assert report.message_count == N - 1
    assert report.bytes_communicated == 8 * (N - 1)
    assert report.T_comm <= report.T_total


def test_scalar_needs_space(riccati):
    with pytest.raises(ValueError):
        run_nievergelt(riccati, 4, 1e-3)


@pytest.mark.parametrize("workers", [2, 8])
def test_worker_count_does_not_change_result(riccati, workers):
    base = run_nievergelt(riccati, 32, 1e-4, GAUSS6, ExecConfig(1), compute_serial=False)
    other = run_nievergelt(riccati, 32, 1e-4, GAUSS6, ExecConfig(workers),
                           compute_serial=False)
    assert other.final_state == base.final_state
    assert other.error_vs_exact == base.error_vs_exact


# ---------------------------------------------------------------------------
# full runs, linear problems

@pytest.mark.parametrize("N", [2, 4, 8])
def test_heat_exactness(heat, N):
    serial = serial_solve(heat, 0.005)
    report = run_nievergelt(heat, N, 0.005, serial=serial)
    assert report.error_vs_serial <= 1e-10
    assert report.message_count == N - 1
    assert report.bytes_communicated == (N - 1) * 8 * heat.dim


def test_heat_error_matches_serial_error(heat):
    serial = serial_solve(heat, 0.005)
    serial_err = np.max(np.abs(serial - heat.exact(10.0)))
    for N in (2, 4, 8, 16):
        report = run_nievergelt(heat, N, 0.005, serial=serial)
        assert report.error_vs_exact == pytest.approx(serial_err, rel=1e-10)


def test_heat_report_work_and_timing(heat):
    report = run_nievergelt(heat, 4, 0.005)
    assert len(report.per_slice_compute) == 4
    assert report.per_slice_work == [500 * (heat.dim + 1)] * 4
    assert report.modeled_time >= max(report.per_slice_compute)
    assert report.T_comm <= report.T_total
