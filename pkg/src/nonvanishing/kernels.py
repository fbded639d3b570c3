"""Backend selection for the hot loops.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` takes over. Setting the environment
variable ``NONVANISHING_BACKEND=python`` forces the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("NONVANISHING_BACKEND", "").lower() == "python":
        raise ImportError("python backend requested")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"


def kronecker_table(D: int, q: int) -> np.ndarray:
    return _impl.kronecker_table(int(D), int(q))


def divisor_power_table(n_max: int, s: complex) -> np.ndarray:
    return _impl.divisor_power_table(int(n_max), complex(s))


def divisor_sum(values: np.ndarray, n_max: int) -> np.ndarray:
    return _impl.divisor_sum(np.ascontiguousarray(values, dtype=np.float64), int(n_max))


def hurwitz_character_sum(chi: np.ndarray, s: complex, N: int, coeffs: np.ndarray) -> complex:
    return _impl.hurwitz_character_sum(
        np.ascontiguousarray(chi, dtype=np.int8),
        complex(s),
        int(N),
        np.ascontiguousarray(coeffs, dtype=np.complex128),
    )


def backends() -> dict:
    """Both implementations keyed by name, for cross-checks and benchmarks."""
    out = {"python": _kernels_py}
    if BACKEND == "cython":
        out["cython"] = _impl
    return out
