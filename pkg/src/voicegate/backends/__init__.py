"""Kernel backend selection.

Two interchangeable implementations of the DSP inner loops exist:

* ``numba`` — scalar loops compiled with ``@njit`` (default when numba
  imports cleanly),
* ``numpy`` — vectorized pure-numpy fallback.

The active backend is chosen once at import from the ``VOICEGATE_BACKEND``
environment variable (``numba`` or ``numpy``); ``set_backend`` overrides it
at runtime for tests and benchmarks.
"""

import os

from ..errors import ConfigError
from . import numpy_backend

ENV_VAR = "VOICEGATE_BACKEND"

_backends = {"numpy": numpy_backend}
try:  # numba is optional at runtime; the numpy path is always available
    from . import numba_backend

    _backends["numba"] = numba_backend
except ImportError:
    numba_backend = None

_active = None


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_backends))


def set_backend(name: str):
    """Select the kernel implementation by name; returns the module."""
    global _active
    if name not in _backends:
        raise ConfigError(
            f"unknown backend {name!r}; available: {', '.join(available_backends())}"
        )
    _active = _backends[name]
    return _active


def reset_backend() -> None:
    """Drop any override; the next active_backend() re-reads env/defaults."""
    global _active
    _active = None


def active_backend():
    """The currently selected backend module (resolving env/defaults lazily)."""
    global _active
    if _active is None:
        requested = os.environ.get(ENV_VAR)
        if requested:
            set_backend(requested.strip().lower())
        else:
            _active = _backends.get("numba", numpy_backend)
    return _active


def backend_name() -> str:
    return active_backend().NAME
