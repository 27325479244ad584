"""Backend selection for the compiled kernels.

Set ``CODEMIX_DISABLE_NUMBA=1`` to force the pure-numpy path.  The flag is
read once at import time; callers may still pick a backend explicitly.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

_FLAG = os.environ.get("CODEMIX_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in ("1", "true", "yes", "on")
USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED

BACKENDS = ("numba", "numpy")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if HAVE_NUMBA:
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)

    def wrap(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return wrap


def resolve_backend(backend=None) -> str:
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
