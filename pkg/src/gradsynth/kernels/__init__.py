"""Kernel backend selection.

The compiled Cython backend is preferred when its extension module built;
otherwise the pure-numpy backend is used.  Set GRADSYNTH_BACKEND=python or
GRADSYNTH_BACKEND=c to force one explicitly.
"""

from __future__ import annotations

import os
import warnings

from . import np_backend

_BACKENDS = {"python": np_backend}

try:
    from . import c_backend

    _BACKENDS["c"] = c_backend
except ImportError:
    c_backend = None


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str | None = None):
    """Return a kernel backend module by name, or the selected default."""
    if name is not None:
        try:
            return _BACKENDS[name]
        except KeyError:
            raise ValueError(
                f"unknown or unbuilt kernel backend {name!r}; "
                f"available: {available_backends()}"
            ) from None
    env = os.environ.get("GRADSYNTH_BACKEND")
    if env is not None:
        backend = _BACKENDS.get(env)
        if backend is None:
            warnings.warn(
                f"GRADSYNTH_BACKEND={env!r} is unavailable; using the python backend"
            )
            return np_backend
        return backend
    return _BACKENDS.get("c", np_backend)
