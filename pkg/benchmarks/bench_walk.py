"""Benchmark the compiled walk kernel against the numpy fallback.

Both backends consume the same pregenerated uniform matrix, so the counts
must be bit-identical; the script asserts that before printing timings.

Usage: python benchmarks/bench_walk.py [--samples N] [--steps N] [--cycle N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pathlap import Digraph
from pathlap.walk import oriented_neighbor_arrays, signed_neighbors

try:
    from pathlap._walk_kernel import simulate_counts as simulate_compiled
except ImportError:
    simulate_compiled = None
from pathlap._walk_kernel_py import simulate_counts as simulate_python


def directed_cycle(n: int) -> Digraph:
    return Digraph(n, tuple((i, (i + 1) % n) for i in range(n)))


def time_backend(fn, indptr, targets, p_lazy, start, uniforms, n_states, repeats=3):
    best = float("inf")
    counts = None
    for _ in range(repeats):
        counts = np.zeros((uniforms.shape[1] + 1, n_states), dtype=np.int64)
        begin = time.perf_counter()
        fn(indptr, targets, p_lazy, start, uniforms, counts)
        best = min(best, time.perf_counter() - begin)
    return best, counts


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--steps", type=int, default=50)
    parser.add_argument("--cycle", type=int, default=50, help="length of the directed cycle")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    g = directed_cycle(args.cycle)
    table = signed_neighbors(g, 1)
    indptr, targets = oriented_neighbor_arrays(table)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    uniforms = rng.random((args.samples, args.steps))
    p_lazy = 0.5

    transitions = args.samples * args.steps
    print(f"cycle={args.cycle} states={table.n_states} "
          f"samples={args.samples} steps={args.steps} ({transitions:.2e} transitions)")

    t_py, counts_py = time_backend(
        simulate_python, indptr, targets, p_lazy, 0, uniforms, table.n_states
    )
    print(f"python  backend: {t_py:8.4f} s  ({transitions / t_py / 1e6:7.1f} M transitions/s)")

    if simulate_compiled is None:
        print("compiled backend: not built (install with Cython to compare)")
        return 0

    t_c, counts_c = time_backend(
        simulate_compiled, indptr, targets, p_lazy, 0, uniforms, table.n_states
    )
    print(f"compiled backend: {t_c:8.4f} s  ({transitions / t_c / 1e6:7.1f} M transitions/s)")
    assert np.array_equal(counts_py, counts_c), "backends must produce identical counts"
    print(f"counts bit-identical across backends; speedup x{t_py / t_c:.1f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
