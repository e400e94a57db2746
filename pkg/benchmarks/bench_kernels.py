"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are imported directly, so the VISO_DISABLE_NUMBA flag does
not matter here. Compilation is triggered once before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from viso._kernels import numba_impl, numpy_impl


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    g = np.sqrt(rng.lognormal(-20, 2, size=(10, 6)))
    p = np.full(10, 0.2)
    sigma2 = 1e-13
    eta = numpy_impl.channel_proportional(g, p)
    tiny_g = rng.lognormal(0, 1, size=(1, 4))
    tiny_p = np.ones(1)

    cases = {
        "sinr 10x6": lambda m: (lambda: m.sinr(g, eta, sigma2)),
        "fast_loop 10x6": lambda m: (lambda: m.fast_loop(g, p, sigma2, 20, 0.1)),
        "feasibility_inner 10x6": lambda m: (
            lambda: m.feasibility_inner(g, p, sigma2, 1e3, 200, 1e-4, 1e-30)
        ),
        "grid_search 1x4 @64": lambda m: (lambda: m.grid_search(tiny_g, tiny_p, 1.0, 64)),
        "grid_search 1x4 @256": lambda m: (lambda: m.grid_search(tiny_g, tiny_p, 1.0, 256)),
    }
    print(f"{'kernel':26s} {'numpy [s]':>12s} {'numba [s]':>12s} {'speedup':>9s}  max|diff|")
    for name, make in cases.items():
        make(numba_impl)()  # compile
        t_np, out_np = best_of(make(numpy_impl), args.repeat)
        t_nb, out_nb = best_of(make(numba_impl), args.repeat)
        a = out_np[0] if isinstance(out_np, tuple) else out_np
        b = out_nb[0] if isinstance(out_nb, tuple) else out_nb
        diff = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
        print(f"{name:26s} {t_np:12.6f} {t_nb:12.6f} {t_np / t_nb:8.1f}x  {diff:.2e}")


if __name__ == "__main__":
    main()
