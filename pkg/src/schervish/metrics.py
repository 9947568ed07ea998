"""Thresholded, cost-weighted and prior-adjusted set metrics.

The taxonomy crosses three ways of valuing correct decisions (plain accuracy,
weighted accuracy, net benefit) with three ways of treating the class balance
(empirical, balanced, prior-adjusted to a deployment prevalence ``pi``):

================  ==========  ====================  ==============
                  empirical   balanced (pi = 1/2)   prior-adjusted
================  ==========  ====================  ==============
accuracy          accuracy    balanced_accuracy     pama
weighted acc.     weighted_   balanced_weighted_    pamwa
                  accuracy    accuracy
net benefit       net_benefit balanced_net_benefit  pamnb
================  ==========  ====================  ==============

All metrics divide by ``d.norm``, the total weight of the stored evaluation
set, not by the post-shift weight.  Net-benefit metrics are in units of true
positives per evaluation row; the others are fractions.

The prior-adjusted metrics accept an array of prevalences and return an array,
which is how curves and the quadrature oracle evaluate them on a grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import odds
from .dataset import Dataset

__all__ = [
    "MetricKind",
    "ValueMatrix",
    "MetricRequest",
    "accuracy",
    "net_benefit",
    "weighted_accuracy",
    "balanced_accuracy",
    "balanced_net_benefit",
    "balanced_weighted_accuracy",
    "pama",
    "pamnb",
    "pamwa",
    "perfect_value",
    "evaluate",
    "pointwise",
]

class MetricKind(str, enum.Enum):
    ACCURACY = "accuracy"
    BALANCED_ACCURACY = "balanced-accuracy"
    NET_BENEFIT = "net-benefit"
    WEIGHTED_ACCURACY = "weighted-accuracy"
    BALANCED_NET_BENEFIT = "bnb"
    BALANCED_WEIGHTED_ACCURACY = "bwa"
    PAMA = "pama"
    PAMNB = "pamnb"
    PAMWA = "pamwa"


@dataclass(frozen=True)
class ValueMatrix:
    """Reward for a true positive (``v11``) and a true negative (``v00``);
    errors are worth zero."""

    v11: float
    v00: float

    def __post_init__(self):
        if self.v11 < 0 or self.v00 < 0 or not (self.v11 > 0 or self.v00 > 0):
            raise ValueError("rewards must be nonnegative and not both zero")

    def rewards(self, labels) -> np.ndarray:
        return np.where(np.asarray(labels) == 1, self.v11, self.v00)

    @classmethod
    def for_metric(cls, kind: MetricKind, pi0: float, c: float = 0.5, pi: float = 0.5) -> "ValueMatrix":
        """Per-row reward table of each metric, expressed on the evaluation set."""
        kind = MetricKind(kind)
        if kind is MetricKind.ACCURACY:
            return cls(1.0, 1.0)
        if kind is MetricKind.NET_BENEFIT:
            return cls(1.0, c / (1 - c))
        if kind is MetricKind.WEIGHTED_ACCURACY:
            z = (1 - c) * pi0 + c * (1 - pi0)
            return cls((1 - c) / z, c / z)
        if kind is MetricKind.BALANCED_ACCURACY:
            pi = 0.5
            kind = MetricKind.PAMA
        elif kind is MetricKind.BALANCED_NET_BENEFIT:
            pi = 0.5
            kind = MetricKind.PAMNB
        elif kind is MetricKind.BALANCED_WEIGHTED_ACCURACY:
            pi = 0.5
            kind = MetricKind.PAMWA
        if kind is MetricKind.PAMA:
            return cls(pi / pi0, (1 - pi) / (1 - pi0))
        if kind is MetricKind.PAMNB:
            return cls(pi / pi0, c / (1 - c) * (1 - pi) / (1 - pi0))
        z = (1 - c) * pi + c * (1 - pi)
        return cls((1 - c) * pi / (pi0 * z), c * (1 - pi) / ((1 - pi0) * z))


@dataclass(frozen=True)
class MetricRequest:
    kind: MetricKind
    tau: float = 0.5
    c: float = 0.5
    pi: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", MetricKind(self.kind))
        odds._check_prob(self.tau, "tau", open_interval=True)
        odds._check_prob(self.c, "c", open_interval=True)
        odds._check_prob(self.pi, "pi")


def _check_dataset(d: Dataset) -> None:
    if not 0.0 < d.pi0 < 1.0:
        raise ValueError(f"metric requires pi0 in (0, 1), got {d.pi0}")


def _correct(d: Dataset, tau: float) -> np.ndarray:
    return (d.scores >= tau).astype(np.int8) == d.labels


def _wsum(d: Dataset, values) -> float:
    return float(np.dot(d.weights, values))


def accuracy(d: Dataset, tau: float = 0.5) -> float:
    """Weighted fraction of rows where ``1{s >= tau}`` equals the label."""
    return _wsum(d, _correct(d, tau)) / d.norm


def net_benefit(d: Dataset, tau: float, c: float) -> float:
    """True positives count 1, true negatives count ``c / (1 - c)``."""
    odds._check_prob(c, "c", open_interval=True)
    reward = np.where(d.labels == 1, 1.0, c / (1.0 - c))
    return _wsum(d, reward * _correct(d, tau)) / d.norm


def weighted_accuracy(d: Dataset, tau: float, c: float) -> float:
    """Cost-weighted accuracy normalised so a perfect classifier scores 1."""
    odds._check_prob(c, "c", open_interval=True)
    cost = np.where(d.labels == 1, 1.0 - c, c)
    return _wsum(d, cost * _correct(d, tau)) / _wsum(d, cost)


def _first_positive(u, dpi, dpi_c, threshold):
    """Index of the first sorted value in ``u`` predicted positive, per
    prevalence.  ``decide`` is monotone in the score even after rounding, so
    a vectorised bisection with the exact predicate reproduces it row by row."""
    lo = np.zeros(dpi.shape, dtype=np.int64)
    hi = np.full(dpi.shape, u.size, dtype=np.int64)
    while True:
        active = lo < hi
        if not active.any():
            return lo
        mid = (lo + hi) // 2
        probe = u[np.minimum(mid, u.size - 1)]
        pos = np.asarray(odds.decide(probe, dpi, threshold, pi_c=dpi_c), dtype=bool)
        hi = np.where(active & pos, mid, hi)
        lo = np.where(active & ~pos, mid + 1, lo)


def _prior_adjusted(d, pi, threshold, tn_scale, decision_pi=None, pi_c=None, decision_pi_c=None):
    """Shared engine of the prior-adjusted metrics.

    Rows are weighted by ``importance_weight(pi0, pi, y)`` (true negatives
    additionally by ``tn_scale``) and classified by
    ``decide(s_half, decision_pi, threshold)``.  ``pi`` may be an array.
    """
    _check_dataset(d)
    scalar = np.ndim(pi) == 0
    pi = np.atleast_1d(odds._check_prob(pi, "pi")).astype(float)
    if decision_pi is None:
        dpi, dpi_c = pi, (None if pi_c is None else np.atleast_1d(np.asarray(pi_c, float)))
    else:
        dpi = np.broadcast_to(np.atleast_1d(odds._check_prob(decision_pi, "decision_pi")), pi.shape)
        dpi_c = None if decision_pi_c is None else np.broadcast_to(np.atleast_1d(decision_pi_c), pi.shape)
    if dpi_c is None:
        dpi_c = 1.0 - dpi
    u, inverse = np.unique(d.half_scores, return_inverse=True)
    w_pos = np.bincount(inverse, weights=np.where(d.labels == 1, d.weights, 0.0), minlength=u.size)
    w_neg = np.bincount(inverse, weights=np.where(d.labels == 0, d.weights, 0.0), minlength=u.size)
    # tp[k]: positive weight at or above the cut; tn[k]: negative weight below
    pos_above = np.concatenate((np.cumsum(w_pos[::-1])[::-1], [0.0]))
    neg_below = np.concatenate(([0.0], np.cumsum(w_neg)))
    cut = _first_positive(u, dpi, dpi_c, threshold)
    tp, tn = pos_above[cut], neg_below[cut]
    value = (pi / d.pi0 * tp + tn_scale * (1.0 - pi) / (1.0 - d.pi0) * tn) / d.norm
    return float(value[0]) if scalar else value


def pama(d: Dataset, pi, tau: float = 0.5, *, decision_pi=None, pi_c=None):
    """Prior-adjusted maximum accuracy at deployment prevalence ``pi``.

    Rows are importance-weighted from ``d.pi0`` to ``pi`` and classified by
    ``1{pi (x) (1 - pi0) (x) s >= tau}``.  ``tau = 1/2`` is the accuracy-optimal
    threshold for a calibrated score; other values allow suboptimal-threshold
    studies.  ``decision_pi`` adjusts the decision rule for a different
    (e.g. misestimated) prevalence than the one being evaluated at.  ``pi_c``
    supplies ``1 - pi`` exactly when the caller has it.
    """
    odds._check_prob(tau, "tau", open_interval=True)
    return _prior_adjusted(d, pi, tau, 1.0, decision_pi, pi_c, None)


def pamnb(d: Dataset, pi, c: float, *, decision_pi=None):
    """Prior-adjusted maximum net benefit: true positives count ``pi/pi0``,
    true negatives ``c/(1-c) * (1-pi)/(1-pi0)``, decisions thresholded at
    ``c`` after prior adjustment."""
    odds._check_prob(c, "c", open_interval=True)
    return _prior_adjusted(d, pi, c, c / (1.0 - c), decision_pi)


def pamwa(d: Dataset, pi, tau: float = 0.5, c: float = 0.5, *, decision_pi=None):
    """Prior-adjusted maximum weighted accuracy, evaluated as PAMA at the
    cost-shifted prevalence ``(1 - c) (x) pi``."""
    odds._check_prob(c, "c", open_interval=True)
    shifted = odds.odds_mul(1.0 - c, pi)
    dshift = None if decision_pi is None else odds.odds_mul(1.0 - c, decision_pi)
    return pama(d, shifted, tau, decision_pi=dshift)


def balanced_accuracy(d: Dataset, tau: float = 0.5) -> float:
    """Accuracy on the class-balanced reweighting of ``d`` with the score
    adjusted to balance; equals ``pama(d, 0.5, tau)``."""
    _check_dataset(d)
    odds._check_prob(tau, "tau", open_interval=True)
    w = np.asarray(odds.importance_weight(d.pi0, 0.5, d.labels))
    pred = np.asarray(odds.decide(d.half_scores, 0.5, tau))
    return _wsum(d, w * (pred == d.labels)) / d.norm


def balanced_net_benefit(d: Dataset, c: float) -> float:
    return pamnb(d, 0.5, c)


def balanced_weighted_accuracy(d: Dataset, tau: float, c: float) -> float:
    return pamwa(d, 0.5, tau, c)


def perfect_value(d: Dataset, request: MetricRequest) -> float:
    """Value a perfect classifier attains under the same weights."""
    d_perfect = d.with_scores(d.labels.astype(float))
    if request.kind in (MetricKind.ACCURACY, MetricKind.NET_BENEFIT, MetricKind.WEIGHTED_ACCURACY):
        return evaluate(d_perfect, request)
    vm = ValueMatrix.for_metric(request.kind, d.pi0, request.c, request.pi)
    return _wsum(d, vm.rewards(d.labels)) / d.norm


def evaluate(d: Dataset, request: MetricRequest) -> float:
    """Dispatch a :class:`MetricRequest`."""
    k, tau, c, pi = request.kind, request.tau, request.c, request.pi
    if k is MetricKind.ACCURACY:
        return accuracy(d, tau)
    if k is MetricKind.NET_BENEFIT:
        return net_benefit(d, tau, c)
    if k is MetricKind.WEIGHTED_ACCURACY:
        return weighted_accuracy(d, tau, c)
    if k is MetricKind.BALANCED_ACCURACY:
        return balanced_accuracy(d, tau)
    if k is MetricKind.BALANCED_NET_BENEFIT:
        return balanced_net_benefit(d, c)
    if k is MetricKind.BALANCED_WEIGHTED_ACCURACY:
        return balanced_weighted_accuracy(d, tau, c)
    if k is MetricKind.PAMA:
        return pama(d, pi, tau)
    if k is MetricKind.PAMNB:
        return pamnb(d, pi, c)
    return pamwa(d, pi, tau, c)


def pointwise(d: Dataset, request: MetricRequest) -> tuple[np.ndarray, np.ndarray]:
    """Per-row contributions ``(values, weights)`` whose weighted mean is the
    metric.  Used to bootstrap set metrics by resampling rows."""
    k, tau, c, pi = request.kind, request.tau, request.c, request.pi
    if k in (MetricKind.ACCURACY, MetricKind.NET_BENEFIT, MetricKind.WEIGHTED_ACCURACY):
        correct = _correct(d, tau)
    else:
        _check_dataset(d)
        if k in (MetricKind.BALANCED_ACCURACY, MetricKind.BALANCED_NET_BENEFIT,
                 MetricKind.BALANCED_WEIGHTED_ACCURACY):
            pi = 0.5
        if k in (MetricKind.PAMA, MetricKind.BALANCED_ACCURACY):
            dpi, thr = pi, tau
        elif k in (MetricKind.PAMNB, MetricKind.BALANCED_NET_BENEFIT):
            dpi, thr = pi, c
        else:
            dpi, thr = odds.odds_mul(1.0 - c, pi), tau
        correct = np.asarray(odds.decide(d.half_scores, dpi, thr)) == d.labels
    vm = ValueMatrix.for_metric(k, d.pi0, c, pi)
    values = vm.rewards(d.labels) * correct
    weights = np.asarray(d.weights, dtype=float)
    if k is MetricKind.WEIGHTED_ACCURACY:
        # self-normalised: the metric is sum(w*cost*correct) / sum(w*cost)
        cost = np.where(d.labels == 1, 1.0 - c, c)
        return correct.astype(float), weights * cost
    # rescale so the plain weighted mean reproduces division by d.norm
    scale = d.total_weight / d.norm
    return values * scale, weights
