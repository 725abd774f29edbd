"""Pure-numpy fallback for the message-passing kernels."""

from __future__ import annotations

import numpy as np


def gather_rows(x: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return np.take(x, idx, axis=0)


def segment_sum_rows(x: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """Sum contiguous row segments [starts[s], starts[s+1]); empty -> zero row.

    add.reduceat cannot express empty segments directly, so reduce only over
    the nonempty ones: their start offsets are already consecutive because
    empty segments contribute no rows.
    """
    n_seg = len(starts) - 1
    out = np.zeros((n_seg, x.shape[1]), dtype=x.dtype)
    widths = np.diff(starts)
    nonempty = np.flatnonzero(widths > 0)
    if nonempty.size:
        out[nonempty] = np.add.reduceat(x, starts[nonempty], axis=0)
    return out


def gather_segment_sum_rows(x: np.ndarray, order: np.ndarray,
                            starts: np.ndarray) -> np.ndarray:
    return segment_sum_rows(np.take(x, order, axis=0), starts)
