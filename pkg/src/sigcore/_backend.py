"""Kernel backend selection.

Hot loops ship in two flavours: a numba ``@njit`` version and a vectorised
numpy version. The numba path is used when numba imports cleanly and the
environment does not ask otherwise::

    SIGCORE_BACKEND=numpy   # force the pure-numpy fallback
    SIGCORE_BACKEND=numba   # default

``set_backend`` switches at runtime (the benchmark and the test-suite use it
to run both paths in one process).
"""

from __future__ import annotations

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_VALID = ("numba", "numpy")


def _initial_backend() -> str:
    requested = os.environ.get("SIGCORE_BACKEND", "numba").strip().lower()
    if requested not in _VALID:
        raise ValueError(f"SIGCORE_BACKEND must be one of {_VALID}, got {requested!r}")
    if requested == "numba" and not HAVE_NUMBA:
        return "numpy"
    return requested


_backend = _initial_backend()


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previous one."""
    global _backend
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _backend = _backend, name
    return previous


def use_numba() -> bool:
    return _backend == "numba"


def njit(*args, **kwargs):
    """``numba.njit`` with caching and GIL release, or identity without numba."""
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    return numba.njit(*args, **kwargs)


def thread_count() -> int:
    """Worker cap from ``SIGCORE_THREADS`` (default 1)."""
    raw = os.environ.get("SIGCORE_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"SIGCORE_THREADS must be an integer, got {raw!r}") from None
    return max(1, value)
