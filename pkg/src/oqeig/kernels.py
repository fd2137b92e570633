"""Backend selection for the dense kernels.

Prefers the compiled extension; falls back to the numpy implementation when
the extension is absent or when ``OQEIG_PURE_PYTHON`` is set (any non-empty
value) in the environment.
"""

import os

if os.environ.get("OQEIG_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

jacobi_eigh = _impl.jacobi_eigh
cholesky = _impl.cholesky
lu_factor = _impl.lu_factor
solve_triangular = _impl.solve_triangular


def get_backend():
    """Name of the kernel backend in use: ``"cython"`` or ``"python"``."""
    return BACKEND
