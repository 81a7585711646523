"""Minimal-communication parallel-in-time integration.

Nievergelt's time decomposition (interpolated slice maps for scalar
nonlinear problems, exact affine propagators for linear systems), a parareal
reference, an execution harness that counts messages and can inject latency,
and a cost model for many-worker devices.
"""
from .kernels import BACKEND
from .ode_core import (LinearIVP, LinearSystem, ScalarIVP, TimeSliceDecomposition,
                       be_step_linear, be_step_scalar_riccati, integrate_slice,
                       leapfrog_integrate, propagate, riccati_problem)
from .interp import (InitialValueSpace, InterpolantData, barycentric_weights, cheb_diff_matrix,
                     cheb_lobatto_nodes, cheb_nodes, interp_eval)
from .exec_harness import ExecConfig, parallel_map
from .nievergelt import (AffinePropagator, RunReport, SliceMap, build_affine_propagator,
                         build_scalar_slice_map, compose_sweep, run_nievergelt, serial_solve)
from .parareal import PararealConfig, coarse_propagate, parareal_sweep, run_parareal
from .pde_problems import make_heat_problem, make_heat_system, make_wave_problem, wave_step_map

__version__ = "0.1.0"
