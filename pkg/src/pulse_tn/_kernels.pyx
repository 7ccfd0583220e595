# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Fused per-trace detrend + RMS-normalization kernel.

Row layout: traces (n, T) C-contiguous float64, one time series per row.
Matches pulse_tn._kernels_np.tn_traces sample for sample (same centered-sum
formulas, serial accumulation per row).
"""

import numpy as np

from libc.math cimport sqrt


def tn_traces(double[:, ::1] traces, double eps):
    """Detrend each row against its index, then divide by sqrt(mean square + eps)."""
    cdef Py_ssize_t n = traces.shape[0]
    cdef Py_ssize_t T = traces.shape[1]
    if T < 3:
        raise ValueError("traces must have at least 3 samples")
    out_arr = np.empty((n, T), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double tbar = (T - 1) / 2.0
    cdef double denom = T * ((<double> T) * T - 1.0) / 12.0  # sum over (t - tbar)^2
    cdef double inv_t = 1.0 / T
    cdef Py_ssize_t i, t
    cdef double ysum, ybar, cov, slope, r, ms, scale
    for i in range(n):
        ysum = 0.0
        for t in range(T):
            ysum += traces[i, t]
        ybar = ysum * inv_t
        cov = 0.0
        for t in range(T):
            cov += (t - tbar) * (traces[i, t] - ybar)
        slope = cov / denom
        ms = 0.0
        for t in range(T):
            r = (traces[i, t] - ybar) - slope * (t - tbar)
            out[i, t] = r
            ms += r * r
        scale = 1.0 / sqrt(ms * inv_t + eps)
        for t in range(T):
            out[i, t] *= scale
    return out_arr
