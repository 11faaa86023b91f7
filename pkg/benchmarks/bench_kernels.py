"""Benchmark: compiled kernel vs. pure-numpy fallback.

The candidate-evaluation kernel dominates the region optimizer's runtime,
so this is the speedup that matters end to end.

Usage: python3 benchmarks/bench_kernels.py [--reps 20000]
"""

import argparse
import time

import numpy as np

from mtrd import _pykernels

try:
    from mtrd import _ckernels
except ImportError:
    _ckernels = None


def workload(rng, nu, nv, nx1, nx2):
    p_uv = rng.dirichlet(np.ones(nu * nv)).reshape(nu, nv)
    ch = rng.dirichlet(np.ones(nx1 * nx2), size=nu * nv).reshape(nu, nv, nx1, nx2)
    d1 = 1.0 - np.eye(nu)
    d2 = 1.0 - np.eye(nv)
    return p_uv, ch, d1, d2


def bench(fn, instances, reps):
    # warm up
    for inst in instances[:10]:
        fn(*inst)
    t0 = time.perf_counter()
    k = 0
    while k < reps:
        for inst in instances:
            fn(*inst)
            k += 1
            if k >= reps:
                break
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=20000)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"{'shape':>14} {'python':>12} {'compiled':>12} {'speedup':>9}")
    for shape in ((2, 2, 2, 2), (2, 2, 3, 3), (3, 3, 3, 3), (4, 4, 4, 4)):
        instances = [workload(rng, *shape) for _ in range(64)]
        t_py = bench(_pykernels.evaluate_candidate, instances, args.reps)
        row = f"{str(shape):>14} {args.reps / t_py:>10.0f}/s"
        if _ckernels is not None:
            t_c = bench(_ckernels.evaluate_candidate, instances, args.reps)
            row += f" {args.reps / t_c:>10.0f}/s {t_py / t_c:>8.1f}x"
        else:
            row += f" {'(not built)':>12} {'-':>9}"
        print(row)


if __name__ == "__main__":
    main()
