"""Compute-backend selection for the hot kernels.

Two interchangeable implementations of the 3x3 convolution stack exist in
kernels.py: a numba-compiled loop and a pure-numpy one. The active backend is
chosen at import time from the COSAMPLE_BACKEND environment variable
("numba" or "numpy"); numba is the default when importable. set_backend()
switches at runtime, which the benchmark and the parity tests use.
"""

import os

try:
    import numba  # noqa: F401
    _HAVE_NUMBA = True
except ImportError:
    _HAVE_NUMBA = False

_ENV_VAR = "COSAMPLE_BACKEND"
_VALID = ("numba", "numpy")


def _initial() -> str:
    req = os.environ.get(_ENV_VAR, "").strip().lower()
    if req in _VALID:
        if req == "numba" and not _HAVE_NUMBA:
            raise ImportError(f"{_ENV_VAR}=numba but numba is not importable")
        return req
    if req:
        raise ValueError(f"{_ENV_VAR} must be one of {_VALID}, got {req!r}")
    return "numba" if _HAVE_NUMBA else "numpy"


_state = {"backend": _initial()}


def current() -> str:
    return _state["backend"]


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previous one."""
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba" and not _HAVE_NUMBA:
        raise ImportError("numba backend requested but numba is not importable")
    prev = _state["backend"]
    _state["backend"] = name
    return prev


def have_numba() -> bool:
    return _HAVE_NUMBA
