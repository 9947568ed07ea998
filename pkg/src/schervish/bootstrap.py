"""Percentile bootstrap over per-row contributions.

Each replicate draws its own generator from ``SeedSequence([seed, r])``, so a
replicate's value depends only on ``(seed, r)`` and never on how replicates
are split across worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["BootstrapSpec", "replicate_counts", "bootstrap_replicates", "bootstrap_ci", "percentile_interval"]


@dataclass(frozen=True)
class BootstrapSpec:
    replicates: int = 2000
    level: float = 0.95
    seed: int = 0

    def __post_init__(self):
        if int(self.replicates) != self.replicates or self.replicates < 100:
            raise ValueError("replicates must be an integer >= 100")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


def replicate_counts(sizes: Sequence[int], seed: int, r: int) -> list[np.ndarray]:
    """Row multiplicities of replicate ``r``: each group of ``sizes[g]`` rows
    is resampled with replacement independently of the others."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, r]))
    return [np.bincount(rng.integers(0, n, size=n), minlength=n) for n in sizes]


def bootstrap_replicates(
    sizes: Sequence[int],
    statistic: Callable[[list[np.ndarray]], float],
    spec: BootstrapSpec,
    jobs: int = 1,
) -> np.ndarray:
    """Evaluate ``statistic(counts)`` on every replicate.

    ``counts`` holds one multiplicity array per group.  The statistic may
    return a scalar or a fixed-length vector.  Results are stored by replicate
    index, so the array is identical for any ``jobs``.
    """
    if any(n < 1 for n in sizes):
        raise ValueError("every group needs at least one row")
    out = [None] * spec.replicates

    def run(block):
        for r in block:
            out[r] = statistic(replicate_counts(sizes, spec.seed, r))

    blocks = np.array_split(np.arange(spec.replicates), max(1, int(jobs)))
    if jobs <= 1:
        run(blocks[0])
    else:
        with ThreadPoolExecutor(max_workers=int(jobs)) as pool:
            list(pool.map(run, blocks))
    return np.asarray(out, dtype=float)


def percentile_interval(reps: np.ndarray, level: float) -> tuple[float, float]:
    """Equal-tailed percentile interval of a 1-d replicate array; replicates
    that failed (NaN) are dropped."""
    reps = np.asarray(reps, dtype=float)
    reps = reps[np.isfinite(reps)]
    if reps.size == 0:
        return float("nan"), float("nan")
    alpha = 1.0 - level
    lo, hi = np.quantile(reps, [alpha / 2, 1 - alpha / 2])
    return float(lo), float(hi)


def bootstrap_ci(losses, weights=None, scale: float = 1.0, spec: BootstrapSpec = BootstrapSpec(),
                 jobs: int = 1) -> tuple[float, float, float]:
    """``(lo, hi, point)`` for ``scale * sum(w * loss) / sum(w)``.

    Rows are resampled with replacement and carry their weights along.
    """
    losses = np.asarray(losses, dtype=float)
    weights = np.ones_like(losses) if weights is None else np.asarray(weights, dtype=float)
    if losses.ndim != 1 or losses.size == 0 or losses.shape != weights.shape:
        raise ValueError("losses and weights must be nonempty 1-d arrays of equal length")
    wl = weights * losses
    point = scale * float(wl.sum() / weights.sum())

    def stat(counts):
        k = counts[0]
        den = float(np.dot(k, weights))
        return scale * float(np.dot(k, wl)) / den if den > 0 else float("nan")

    reps = bootstrap_replicates([losses.size], stat, spec, jobs)
    lo, hi = percentile_interval(reps, spec.level)
    return lo, hi, point
