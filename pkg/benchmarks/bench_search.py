#!/usr/bin/env python3
"""Benchmark the compiled search kernel against its pure-Python twin.

Times the squared-system residual evaluation and full multi-start batches on
a fixed, reproducible workload, then prints a small comparison table.
"""
import math
import time

from kokonet.search import SearchConfig, build_consts, sample_seeds
from kokonet.search._backend import HAS_COMPILED, kernel, python_kernel
from kokonet.search.pipeline import build_consts_signed


def timeit(fn, *args, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    cfg = SearchConfig.from_degrees((120, 80, 85, 75), (130, 140, 125, 135),
                                    seed_count=600, rng_seed=0)
    consts = build_consts(cfg)
    consts_signed = build_consts_signed(cfg)
    seeds, _ = sample_seeds(cfg)
    seed_lists = [list(map(float, s)) for s in seeds]

    backends = [("python", python_kernel)]
    if HAS_COMPILED:
        backends.insert(0, ("cython", kernel))
    else:
        print("compiled kernel not built; timing the fallback only\n")

    p0 = seed_lists[0]
    n_res = 20_000
    rows = []
    for name, be in backends:
        t_res = timeit(lambda b=be: [b.residuals(p0, consts) for _ in range(n_res)])
        t_sq = timeit(lambda b=be: b.solve_batch(seed_lists, consts, 40, 1e-11),
                      repeat=1)
        t_sg = timeit(lambda b=be: b.solve_batch_signed(seed_lists, consts_signed,
                                                        40, 1e-11), repeat=1)
        rows.append((name, t_res / n_res * 1e6, t_sq, t_sg))

    print(f"workload: {len(seed_lists)} seeds, 40 max iterations")
    print(f"{'backend':<10} {'residual (us)':>14} {'squared batch (s)':>18} "
          f"{'signed batch (s)':>17}")
    for name, r, sq, sg in rows:
        print(f"{name:<10} {r:>14.2f} {sq:>18.2f} {sg:>17.2f}")
    if len(rows) == 2:
        print(f"\nspeedup: residual x{rows[1][1] / rows[0][1]:.1f}, "
              f"squared batch x{rows[1][2] / rows[0][2]:.1f}, "
              f"signed batch x{rows[1][3] / rows[0][3]:.1f}")


if __name__ == "__main__":
    main()
