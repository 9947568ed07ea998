"""Independent brute-force references shared by the tests."""

import itertools

import numpy as np

from schervish.calibration import pool_equal_scores


def exhaustive_isotonic(d):
    """Best monotone fit over pooled-score blocks by enumerating every split
    of the blocks into contiguous runs (2^(k-1) candidates).  A run's level is
    its weighted mean; only nondecreasing candidates are admissible."""
    values, w, mean = pool_equal_scores(d)
    k = values.size
    best, best_sse = None, np.inf
    for cuts in itertools.product([False, True], repeat=k - 1):
        edges = [0] + [i + 1 for i, c in enumerate(cuts) if c] + [k]
        levels = np.empty(k)
        for lo, hi in zip(edges[:-1], edges[1:]):
            levels[lo:hi] = np.dot(w[lo:hi], mean[lo:hi]) / w[lo:hi].sum()
        if np.any(np.diff(levels) < -1e-15):
            continue
        sse = float(np.dot(w, (mean - levels) ** 2))
        if sse < best_sse - 1e-15:
            best, best_sse = levels, sse
    return values, best
