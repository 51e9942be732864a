"""Eigensolver backend selection.

The compiled cyclic-Jacobi kernel is preferred; if the extension is missing
(no compiler at install time) we fall back to numpy's LAPACK bindings behind
the same contract: ascending eigenvalues, unitary eigenvector columns.

Set ``FGSOS_BACKEND=python`` to force the fallback, ``FGSOS_BACKEND=cython``
to require the compiled kernel (raises if unavailable).
"""
from __future__ import annotations

import os

import numpy as np


def _eigh_numpy(a):
    return np.linalg.eigh(a)


_requested = os.environ.get("FGSOS_BACKEND", "").strip().lower()

if _requested in ("", "cython"):
    try:
        from ._jacobi import eigh as eigh_core

        BACKEND = "cython-jacobi"
    except ImportError:
        if _requested == "cython":
            raise
        eigh_core = _eigh_numpy
        BACKEND = "numpy-lapack"
elif _requested == "python":
    eigh_core = _eigh_numpy
    BACKEND = "numpy-lapack"
else:
    raise RuntimeError(f"unknown FGSOS_BACKEND value {_requested!r}")


def backend_name() -> str:
    """Which eigensolver implementation was selected at import."""
    return BACKEND
