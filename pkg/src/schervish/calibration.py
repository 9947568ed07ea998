"""Isotonic recalibration by the pool-adjacent-violators algorithm."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset

__all__ = ["CalibrationMap", "pava_fit", "recalibrate", "pool_equal_scores"]


@dataclass(frozen=True, eq=False)
class CalibrationMap:
    """Monotone step map from raw score to calibrated probability.

    Training scores map exactly to their fitted level.  Other scores are
    interpolated linearly between neighbouring breakpoints and clamp to the
    end levels outside the fitted range.
    """

    breakpoints: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        x = np.array(self.breakpoints, dtype=float)
        v = np.array(self.levels, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size == 0:
            raise ValueError("breakpoints and levels must be nonempty 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(v) < 0) or np.any((v < 0) | (v > 1)):
            raise ValueError("levels must be nondecreasing within [0, 1]")
        for name, arr in (("breakpoints", x), ("levels", v)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __call__(self, scores):
        out = np.interp(np.asarray(scores, dtype=float), self.breakpoints, self.levels)
        return float(out) if np.ndim(out) == 0 else out

    def __len__(self) -> int:
        return self.breakpoints.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["breakpoint", "level"])
        for x, v in zip(self.breakpoints, self.levels):
            w.writerow([repr(float(x)), repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CalibrationMap":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [h.strip() for h in rows[0]] != ["breakpoint", "level"]:
            raise ValueError("expected header 'breakpoint,level'")
        body = [r for r in rows[1:] if r]
        return cls([float(r[0]) for r in body], [float(r[1]) for r in body])


def pool_equal_scores(d: Dataset) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct scores with the total weight and weighted positive fraction
    of the rows sharing each one.  Zero-weight rows are ignored."""
    keep = d.weights > 0
    values, inverse = np.unique(d.scores[keep], return_inverse=True)
    w = np.bincount(inverse, weights=d.weights[keep], minlength=values.size)
    pos = np.bincount(inverse, weights=d.weights[keep] * d.labels[keep], minlength=values.size)
    return values, w, pos / w


def pava_fit(d: Dataset) -> CalibrationMap:
    """Weighted isotonic regression of labels on scores.

    Rows with equal scores are pooled first so the fit is a function of the
    score; adjacent blocks that violate monotonicity are then merged into
    their weighted mean until the levels are nondecreasing.
    """
    values, w, mean = pool_equal_scores(d)
    # stack of merged blocks: (weight, mean, number of distinct scores)
    bw, bm, bn = [], [], []
    for wi, mi in zip(w.tolist(), mean.tolist()):
        cw, cm, cn = wi, mi, 1
        while bm and bm[-1] >= cm:
            pw, pm, pn = bw.pop(), bm.pop(), bn.pop()
            tot = pw + cw
            cm = (pw * pm + cw * cm) / tot
            cw, cn = tot, pn + cn
        bw.append(cw)
        bm.append(cm)
        bn.append(cn)
    levels = np.repeat(np.clip(bm, 0.0, 1.0), bn)
    return CalibrationMap(values, levels)


def recalibrate(d: Dataset, m: CalibrationMap) -> Dataset:
    """Same rows with scores replaced by ``m(score)``; ``pi0`` is kept."""
    return d.with_scores(np.asarray(m(d.scores), dtype=float))
