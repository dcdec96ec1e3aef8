"""Kernel backend selection.

Two interchangeable implementations of the hot loops exist:

* ``numba_kernels``: JIT-compiled, parallel across rows.
* ``numpy_kernels``: pure numpy, same arithmetic, same bits.

The env var ``MCEUS_BACKEND`` picks one: ``auto`` (default; numba when
importable, else numpy), ``numba``, or ``numpy``. ``MCEUS_THREADS`` caps
the numba thread pool (0 or unset = automatic).
"""
from __future__ import annotations

import os

from . import numpy_kernels

_ENV = "MCEUS_BACKEND"
_numba_mod = None
_numba_error = None


def _load_numba():
    global _numba_mod, _numba_error
    if _numba_mod is None and _numba_error is None:
        try:
            from . import numba_kernels
            _numba_mod = numba_kernels
        except ImportError as exc:  # pragma: no cover - depends on host install
            _numba_error = exc
    return _numba_mod


def active_kernels(name: str | None = None):
    """Resolve the kernel module for a backend name (or the env default)."""
    choice = (name or os.environ.get(_ENV, "auto")).lower()
    if choice == "numpy":
        return numpy_kernels
    if choice == "numba":
        mod = _load_numba()
        if mod is None:
            raise RuntimeError(f"MCEUS_BACKEND=numba but numba is unavailable: {_numba_error}")
        return mod
    if choice == "auto":
        return _load_numba() or numpy_kernels
    raise ValueError(f"unknown kernel backend {choice!r} (expected auto, numba, or numpy)")


def backend_name() -> str:
    return active_kernels().BACKEND_NAME


def window_stats(stack, w, backend: str | None = None):
    return active_kernels(backend).window_stats(stack, w)


def window_min(stack, w, backend: str | None = None):
    return active_kernels(backend).window_min(stack, w)


def window_low_mean(stack, w, count, backend: str | None = None):
    return active_kernels(backend).window_low_mean(stack, w, count)


def grey_dilate(frame, offsets, backend: str | None = None):
    return active_kernels(backend).grey_dilate(frame, offsets)


def grey_erode(frame, offsets, backend: str | None = None):
    return active_kernels(backend).grey_erode(frame, offsets)
