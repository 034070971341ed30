"""Backend selection for the hot kernels.

The compiled extension is used when importable. Setting the environment
variable ``CORESET_SMI_PURE=1`` before import forces the numpy fallback.
"""
import os

from . import _pykernels

if os.environ.get("CORESET_SMI_PURE"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

OPTIMAL = _pykernels.OPTIMAL
INFEASIBLE = _pykernels.INFEASIBLE
UNBOUNDED = _pykernels.UNBOUNDED
ITERATION_LIMIT = _pykernels.ITERATION_LIMIT

lp_simplex = _impl.lp_simplex
jacobi_eigenvalues = _impl.jacobi_eigenvalues
hit_and_run = _impl.hit_and_run
hildreth_project = _impl.hildreth_project


def implementation(name):
    """Return the kernel module for ``name`` ("compiled" or "python")."""
    if name == "python":
        return _pykernels
    if name == "compiled":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
