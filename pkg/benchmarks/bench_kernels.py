"""Time the compiled and pure-Python float kernels on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from flatwalk import kernels
from flatwalk.geodesics import axis_endpoints, enumerate_closed_geodesics, sum_diag, trace_length, veech_group


def _excursion_inputs(R):
    G = veech_group("torus")
    out = []
    for r in enumerate_closed_geodesics(G, R):
        u, v = axis_endpoints(r.matrix)
        out.append((u, v, trace_length(sum_diag(r.matrix)), 1.0, 25.0))
    return out


def _pair_inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    return (rng.random((n, 4)), rng.integers(0, 8, n), rng.random((n, 4)), rng.integers(0, 8, n), 1e-12)


def bench(fn, args_list, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--R", type=float, default=9.0)
    ap.add_argument("--pairs", type=int, default=400)
    args = ap.parse_args()
    backends = kernels.backends()
    exc = _excursion_inputs(args.R)
    pairs = [_pair_inputs(args.pairs, s) for s in range(20)]
    print(f"selected backend: {kernels.BACKEND}")
    print(f"{'kernel':<16}{'backend':<10}{'seconds':>10}{'speedup':>10}")
    for name, inputs in (("excursion_walk", exc), ("classify_pairs", pairs)):
        times = {b: bench(getattr(mod, name), inputs, args.repeat) for b, mod in backends.items()}
        base = times["python"]
        for b, t in times.items():
            print(f"{name:<16}{b:<10}{t:>10.4f}{base / t:>9.1f}x")


if __name__ == "__main__":
    main()
