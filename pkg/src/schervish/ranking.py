"""AUC-ROC with half credit for ties, and its reading as prior-adjusted
accuracy averaged over a score-induced distribution of label shifts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics
from .dataset import Dataset

__all__ = ["RocResult", "auc_roc", "auc_roc_pairs", "auc_shift_average", "is_calibrated"]


@dataclass(frozen=True)
class RocResult:
    auc: float
    n_pos: int
    n_neg: int
    tie_mass: float  # weight fraction of (neg, pos) pairs with equal scores

    def __float__(self) -> float:
        return self.auc


def _class_weights(d: Dataset) -> tuple[np.ndarray, np.ndarray]:
    pos = np.where(d.labels == 1, d.weights, 0.0)
    neg = np.where(d.labels == 0, d.weights, 0.0)
    if pos.sum() <= 0 or neg.sum() <= 0:
        raise ValueError("AUC-ROC needs both classes")
    return pos, neg


def auc_roc(d: Dataset) -> RocResult:
    """Weighted Mann-Whitney statistic in O(n log n).

    Rows are grouped into blocks of exactly equal score; each positive earns
    the negative weight strictly below its block plus half the negative weight
    inside it.
    """
    pos, neg = _class_weights(d)
    values, inverse = np.unique(d.scores, return_inverse=True)
    p_block = np.bincount(inverse, weights=pos, minlength=values.size)
    n_block = np.bincount(inverse, weights=neg, minlength=values.size)
    n_below = np.concatenate(([0.0], np.cumsum(n_block)[:-1]))
    p_tot, n_tot = p_block.sum(), n_block.sum()
    wins = float(np.dot(p_block, n_below + 0.5 * n_block))
    ties = float(np.dot(p_block, n_block))
    return RocResult(
        auc=float(wins / (p_tot * n_tot)),
        n_pos=int(np.count_nonzero(d.labels == 1)),
        n_neg=int(np.count_nonzero(d.labels == 0)),
        tie_mass=float(ties / (p_tot * n_tot)),
    )


def auc_roc_pairs(d: Dataset) -> float:
    """Reference O(n^2) enumeration over all (negative, positive) pairs."""
    pos, neg = _class_weights(d)
    ip, ineg = d.labels == 1, d.labels == 0
    sp, sn = d.scores[ip][:, None], d.scores[ineg][None, :]
    credit = (sp > sn) + 0.5 * (sp == sn)
    pair_w = pos[ip][:, None] * neg[ineg][None, :]
    return float(np.sum(pair_w * credit) / pair_w.sum())


def auc_shift_average(d: Dataset) -> float:
    """Average of ``pama(d, 1 - t, 1/2)`` with ``t`` drawn from the
    distribution of balanced scores ``s_half`` on the balanced reweighting
    of ``d``.

    The distribution is enumerated exactly over distinct scores.  For a score
    that is calibrated on ``d`` this equals :func:`auc_roc`; otherwise it is
    still defined but the two differ.  The complement ``1 - (1 - t)`` is
    passed to the decision rule as ``t`` itself so that rows scoring exactly
    ``t`` tie at the threshold and count as positive predictions.
    """
    pos, neg = _class_weights(d)
    values, first, inverse = np.unique(d.scores, return_index=True, return_inverse=True)
    t = d.half_scores[first]
    balanced = pos / (2.0 * d.pi0) + neg / (2.0 * (1.0 - d.pi0))
    mass = np.bincount(inverse, weights=balanced, minlength=values.size) / d.norm
    pi = 1.0 - t
    terms = metrics.pama(d, pi, 0.5, pi_c=t)
    return float(np.dot(mass, terms))


def is_calibrated(d: Dataset, tol: float = 1e-12) -> bool:
    """True when every distinct score equals its weighted positive fraction."""
    values, inverse = np.unique(d.scores, return_inverse=True)
    pos = np.bincount(inverse, weights=d.weights * d.labels, minlength=values.size)
    tot = np.bincount(inverse, weights=d.weights, minlength=values.size)
    return bool(np.all(np.abs(pos / tot - values) <= tol))
