#!/usr/bin/env python3
"""Benchmark the compiled convolution kernels against the numpy fallback.

Times forward and backward passes on the shapes this project actually runs
(action encoder, vision encoder, video decoder) across batch sizes, prints a
table, and optionally writes a CSV. This is the measurement behind the
batch-size crossover used by the auto backend.

Usage: python benchmarks/bench_backends.py [--repeats 30] [--csv out.csv]
"""

import argparse
import csv
import sys
import time

import numpy as np

from a2aflow import _kernels_np as np_k

try:
    from a2aflow import _ckernels as cy_k
except ImportError:
    cy_k = None

CASES = [
    # name, kind, (C, spatial...), (Co, K), stride, pad
    ("action-enc", "1d", (3, 8), (32, 5), 1, 2),
    ("vision-enc", "2d", (8, 32, 32), (16, 3), 2, 1),
    ("vision-mid", "2d", (16, 16, 16), (32, 3), 2, 1),
    ("video-dec", "2d", (16, 32, 32), (16, 3), 1, 1),
]

BATCHES = (1, 4, 8, 32)


def time_fn(fn, *args, repeats):
    for _ in range(3):
        fn(*args)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats * 1e3


def bench_case(name, kind, chan_shape, kernel, stride, pad, batch, repeats):
    rng = np.random.default_rng(0)
    co, k = kernel
    x = rng.normal(size=(batch, *chan_shape)).astype(np.float32)
    if kind == "1d":
        w = rng.normal(size=(co, chan_shape[0], k)).astype(np.float32)
        fwd_np, bwd_np = np_k.conv1d_forward, np_k.conv1d_backward
        fwd_cy = cy_k.conv1d_forward if cy_k else None
        bwd_cy = cy_k.conv1d_backward if cy_k else None
    else:
        w = rng.normal(size=(co, chan_shape[0], k, k)).astype(np.float32)
        fwd_np, bwd_np = np_k.conv2d_forward, np_k.conv2d_backward
        fwd_cy = cy_k.conv2d_forward if cy_k else None
        bwd_cy = cy_k.conv2d_backward if cy_k else None
    bias = np.zeros(co, dtype=np.float32)
    gy = np.ascontiguousarray(fwd_np(x, w, bias, stride, pad))

    row = {"case": name, "batch": batch}
    row["numpy_fwd_ms"] = time_fn(fwd_np, x, w, bias, stride, pad, repeats=repeats)
    row["numpy_bwd_ms"] = time_fn(bwd_np, x, w, gy, stride, pad, repeats=repeats)
    if cy_k:
        row["compiled_fwd_ms"] = time_fn(fwd_cy, x, w, bias, stride, pad, repeats=repeats)
        row["compiled_bwd_ms"] = time_fn(bwd_cy, x, w, gy, stride, pad, repeats=repeats)
        ref = fwd_cy(x, w, bias, stride, pad)
        assert np.allclose(ref, gy, rtol=1e-4, atol=1e-4), f"backend mismatch in {name}"
    return row


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=30)
    parser.add_argument("--csv", default=None)
    args = parser.parse_args(argv)

    if cy_k is None:
        print("compiled extension not available; timing numpy kernels only")

    rows = []
    for name, kind, chan_shape, kernel, stride, pad in CASES:
        for batch in BATCHES:
            rows.append(bench_case(name, kind, chan_shape, kernel, stride, pad,
                                   batch, args.repeats))

    cols = list(rows[0].keys())
    widths = [max(len(c), 12) for c in cols]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for row in rows:
        cells = [f"{row[c]:.3f}" if isinstance(row[c], float) else str(row[c]) for c in cols]
        print("  ".join(c.ljust(w) for c, w in zip(cells, widths)))

    if cy_k:
        wins = sum(1 for r in rows if r["compiled_fwd_ms"] + r["compiled_bwd_ms"]
                   < r["numpy_fwd_ms"] + r["numpy_bwd_ms"])
        print(f"\ncompiled faster in {wins}/{len(rows)} case/batch combinations "
              f"(typically small batches); numpy/BLAS wins the rest.")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=cols)
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
