"""Numpy fallback for the walk stepping kernel.

Same contract as the compiled kernel in ``_walk_kernel.pyx``; the per-step
arithmetic uses the identical expression order so the two backends produce
bit-identical counts from the same uniform matrix.
"""

from __future__ import annotations

import numpy as np


def simulate_counts(indptr: np.ndarray, targets: np.ndarray, p_lazy: float,
                    start: int, uniforms: np.ndarray, counts: np.ndarray) -> None:
    n_samples, n_steps = uniforms.shape
    n_states = counts.shape[1]
    counts[0, start] += n_samples
    state = np.full(n_samples, start, dtype=np.int64)
    deg = indptr[1:] - indptr[:-1]
    for n in range(n_steps):
        u = uniforms[:, n]
        move = u >= p_lazy
        if move.any():
            ms = deg[state[move]]
            j = ((u[move] - p_lazy) / (1.0 - p_lazy) * ms).astype(np.int64)
            np.minimum(j, ms - 1, out=j)
            state[move] = targets[indptr[state[move]] + j]
        counts[n + 1] += np.bincount(state, minlength=n_states)
