"""Backend selection for the inner loops.

The compiled extension is used when it imports; set ``PINTIME_PURE_PYTHON=1``
to force the pure-Python fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

python_backend = _pykernels
compiled_backend = None

if os.environ.get("PINTIME_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "compiled" if _active is compiled_backend else "python"

riccati_integrate = _active.riccati_integrate
thomas_solve = _active.thomas_solve
tridiag_be_integrate = _active.tridiag_be_integrate
leapfrog_integrate = _active.leapfrog_integrate


def get_backend(name=None):
    """Return the kernel module called ``name`` ('compiled' or 'python').

    ``None`` returns the active backend.
    """
    if name is None:
        return _active
    if name == "python":
        return python_backend
    if name == "compiled":
        if compiled_backend is None:
            raise ImportError("compiled kernels are not available")
        return compiled_backend
    raise ValueError(f"unknown backend {name!r}")
