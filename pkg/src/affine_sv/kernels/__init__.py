"""Numerical kernels for the Riccati integrator.

The compiled Cython module ``_dopri`` is used when it is importable; set the
environment variable ``AFFINE_SV_PURE_PYTHON=1`` to force the pure-Python
fallback ``_dopri_py``. ``BACKEND`` names the active implementation.
"""
import os

from . import _dopri_py
from ._dopri_py import BLEWUP, CAPPED, COMPLETED, LEFT_DOMAIN, solve_generic

_compiled = None
if not os.environ.get("AFFINE_SV_PURE_PYTHON"):
    try:
        from . import _dopri as _compiled
    except ImportError:
        _compiled = None

if _compiled is not None:
    BACKEND = "cython"
    quad_solve_real = _compiled.quad_solve_real
    quad_solve_complex = _compiled.quad_solve_complex
else:
    BACKEND = "python"
    quad_solve_real = _dopri_py.quad_solve_real
    quad_solve_complex = _dopri_py.quad_solve_complex


def backends():
    """Mapping of available backend names to their kernel modules."""
    out = {"python": _dopri_py}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


__all__ = [
    "BACKEND", "COMPLETED", "BLEWUP", "CAPPED", "LEFT_DOMAIN",
    "quad_solve_real", "quad_solve_complex", "solve_generic", "backends",
]
