#!/usr/bin/env python3
"""Benchmark the temporal-normalization kernel: compiled vs numpy fallback.

The transform is the hot loop of the whole pipeline (one detrend + normalize
per pixel trace), so this is the number that matters when processing real
video tensors.

    python benchmarks/bench_tn.py --frames 600 --height 64 --width 64 --reps 5
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pulse_tn import FrameClip, available_backends, tn


def time_backend(clip: FrameClip, backend: str, reps: int) -> float:
    tn(clip, backend=backend)  # warm up
    best = float("inf")
    for _ in range(reps):
        start = time.perf_counter()
        tn(clip, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--frames", type=int, default=600)
    parser.add_argument("--height", type=int, default=64)
    parser.add_argument("--width", type=int, default=64)
    parser.add_argument("--reps", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    data = rng.random((args.frames, args.height, args.width, 3))
    clip = FrameClip(data, 30.0)
    samples = data.size
    print(
        f"clip {args.frames}x{args.height}x{args.width}x3 "
        f"({samples / 1e6:.1f} M samples, {data.size // args.frames} traces)"
    )

    backends = available_backends()
    timings: dict[str, float] = {}
    for backend in backends:
        best = time_backend(clip, backend, args.reps)
        timings[backend] = best
        print(f"{backend:>7}: {best * 1e3:8.1f} ms  ({samples / best / 1e6:7.1f} M samples/s)")

    if "cython" in timings and "numpy" in timings:
        print(f"speedup: {timings['numpy'] / timings['cython']:.2f}x (cython over numpy)")
        a = tn(clip, backend="cython").data
        b = tn(clip, backend="numpy").data
        print(f"max |difference|: {np.max(np.abs(a - b)):.2e}")
    else:
        print("compiled kernel not available; benchmarked the numpy fallback only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
