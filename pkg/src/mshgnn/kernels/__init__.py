"""Gather / segment-sum kernels behind the message-passing core.

Two interchangeable backends:

* ``_core`` — a compiled Cython extension (built by setup.py when possible);
* ``numpy_backend`` — pure numpy, always available.

Selection happens once at import. ``MSHGNN_KERNELS`` forces a choice:
``auto`` (default; compiled if present), ``c``, or ``py``. Backends use the
same per-segment summation order, so results agree bit-for-bit; see
benchmarks/bench_kernels.py for the speed comparison.
"""

from __future__ import annotations

import os

import numpy as np

from mshgnn.kernels import numpy_backend

try:
    from mshgnn.kernels import _core
except ImportError:
    _core = None


def _select_backend(choice: str):
    if choice == "py":
        return numpy_backend, "numpy"
    if choice == "c":
        if _core is None:
            raise ImportError(
                "MSHGNN_KERNELS=c but the compiled extension is unavailable; "
                "reinstall the package with a working C toolchain")
        return _core, "compiled"
    if choice == "auto":
        if _core is not None:
            return _core, "compiled"
        return numpy_backend, "numpy"
    raise ValueError(f"MSHGNN_KERNELS must be auto|c|py, got {choice!r}")


_backend, _backend_name = _select_backend(os.environ.get("MSHGNN_KERNELS", "auto"))


def backend_name() -> str:
    """Name of the active backend: 'compiled' or 'numpy'."""
    return _backend_name


def available_backends() -> tuple[str, ...]:
    return ("numpy", "compiled") if _core is not None else ("numpy",)


def _rows(x: np.ndarray) -> np.ndarray:
    # kernels operate on contiguous 2-D row blocks; fold trailing axes
    if x.ndim == 2:
        return np.ascontiguousarray(x)
    return np.ascontiguousarray(x).reshape(x.shape[0], -1)


def gather_rows(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """out[k] = x[idx[k]]; trailing axes of x are preserved."""
    idx = np.asarray(idx, dtype=np.intp)
    out = _backend.gather_rows(_rows(x), idx)
    return out.reshape((len(idx),) + x.shape[1:])


def segment_sum_rows(x: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Sum contiguous row segments [starts[s], starts[s+1]); empty -> zeros."""
    starts = np.asarray(starts, dtype=np.intp)
    out = _backend.segment_sum_rows(_rows(x), starts)
    return out.reshape((len(starts) - 1,) + x.shape[1:])


def gather_segment_sum_rows(x: np.ndarray, order: np.ndarray,
                            starts: np.ndarray) -> np.ndarray:
    """Fused segment_sum_rows(gather_rows(x, order), starts)."""
    order = np.asarray(order, dtype=np.intp)
    starts = np.asarray(starts, dtype=np.intp)
    out = _backend.gather_segment_sum_rows(_rows(x), order, starts)
    return out.reshape((len(starts) - 1,) + x.shape[1:])
