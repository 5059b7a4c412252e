"""Kernel backend selection.

The hot numerical paths exist twice: numba-compiled kernels and a
pure-numpy fallback with identical semantics.  The default is numba
when importable; set ``UGSB_BACKEND=numpy`` (or ``numba``) to force a
choice.  ``set_backend`` flips at runtime, mainly for tests and the
benchmark script.
"""

import os

_BACKEND_NAME = None
_KERNELS = None


def _resolve(name):
    if name == "numpy":
        from . import kernels_numpy

        return "numpy", kernels_numpy
    if name == "numba":
        from . import kernels_numba

        return "numba", kernels_numba
    raise ValueError(f"unknown backend {name!r}; use 'numba' or 'numpy'")


def set_backend(name: str) -> str:
    """Force a kernel backend; returns the previous backend name."""
    global _BACKEND_NAME, _KERNELS
    previous = _BACKEND_NAME
    _BACKEND_NAME, _KERNELS = _resolve(name)
    return previous


def get_kernels():
    """The active kernel module (lazily initialized)."""
    global _BACKEND_NAME, _KERNELS
    if _KERNELS is None:
        wanted = os.environ.get("UGSB_BACKEND", "").strip().lower()
        if wanted:
            _BACKEND_NAME, _KERNELS = _resolve(wanted)
        else:
            try:
                _BACKEND_NAME, _KERNELS = _resolve("numba")
            except ImportError:
                _BACKEND_NAME, _KERNELS = _resolve("numpy")
    return _KERNELS


def backend_name() -> str:
    get_kernels()
    return _BACKEND_NAME
