"""Pure-numpy fallback for the fused detrend + RMS-normalization kernel.

Same contract as the compiled pulse_tn._kernels module: traces are (n, T)
float64 rows, output is a new (n, T) array.
"""

from __future__ import annotations

import numpy as np


def tn_traces(traces: np.ndarray, eps: float) -> np.ndarray:
    """Detrend each row against its index, then divide by sqrt(mean square + eps)."""
    n, t_len = traces.shape
    if t_len < 3:
        raise ValueError("traces must have at least 3 samples")
    tc = np.arange(t_len, dtype=np.float64) - (t_len - 1) / 2.0
    denom = t_len * (float(t_len) * t_len - 1.0) / 12.0
    ybar = traces.mean(axis=1, keepdims=True)
    centered = traces - ybar
    slope = centered @ tc / denom
    resid = centered - slope[:, None] * tc
    ms = np.mean(resid * resid, axis=1)
    return resid / np.sqrt(ms + eps)[:, None]
