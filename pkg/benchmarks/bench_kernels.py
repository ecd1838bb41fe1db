"""Compare the compiled and numpy kernels on the optimizer's hot paths.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``.  Reports the
best-of-N wall time for one default-size grid fill, a batch of single-point
evaluations, the local-maximum scan, and a full ``pmax_numeric`` call.
"""
import argparse
import math
import timeit

import numpy as np

from ctq import _kernels_py
from ctq.numeric import OptimizerConfig
from ctq.state import random_state

try:
    from ctq import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<22s} {best * 1e3:10.3f} ms")
    return best


def run_backend(name, impl, s, repeat):
    cfg = OptimizerConfig()
    thetas = np.linspace(0.0, math.pi, cfg.grid_theta)
    phis = np.linspace(0.0, 2 * math.pi, cfg.grid_phi)
    f = np.empty((thetas.size, phis.size))
    p = np.empty_like(f)
    ev = impl.Evaluator(*s.a, s.mu)
    pts = np.random.default_rng(0).uniform(0, math.pi, (2000, 2))

    print(f"{name}:")
    out = {
        "grid": bench(f"grid {cfg.grid_theta}x{cfg.grid_phi}", lambda: ev.fill_grid(thetas, phis, f, p, 0, thetas.size), repeat),
        "points": bench("2000 point evals", lambda: [ev.success(a, b) for a, b in pts], repeat),
        "maxima": bench("local maxima scan", lambda: impl.local_maxima(p), repeat),
    }
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    s = random_state(7)
    py = run_backend("python", _kernels_py, s, args.repeat)
    if _kernels_cy is None:
        print("compiled kernel not built; nothing to compare")
        return
    cy = run_backend("cython", _kernels_cy, s, args.repeat)
    print("speedup (python / cython):")
    for k in py:
        print(f"  {k:<22s} {py[k] / cy[k]:10.1f}x")

    from ctq.numeric import pmax_numeric

    print("end to end (selected backend):")
    bench("pmax_numeric", lambda: pmax_numeric(s), args.repeat)


if __name__ == "__main__":
    main()
