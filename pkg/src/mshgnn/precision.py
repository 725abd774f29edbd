"""Floating-point precision policy.

Everything defaults to float64; the `MSHGNN_PRECISION` environment variable
(``double`` | ``single``) switches the working dtype. Tolerances used by the
equivariance checkers must be relaxed in single precision, so both are
resolved here in one place.
"""

from __future__ import annotations

import os

import numpy as np

_VALID = {"double": np.float64, "single": np.float32}


def working_dtype() -> np.dtype:
    name = os.environ.get("MSHGNN_PRECISION", "double").strip().lower()
    if name not in _VALID:
        raise ValueError(
            f"MSHGNN_PRECISION must be one of {sorted(_VALID)}, got {name!r}"
        )
    return np.dtype(_VALID[name])


def default_equivariance_tol() -> float:
    """Default max-abs tolerance for the model equivariance checker."""
    return 1e-10 if working_dtype() == np.float64 else 1e-4
