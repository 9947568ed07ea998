"""Clipped proper scoring rules: prior-adjusted set metrics averaged over a
bounded range of deployment prevalences, in closed form.

Each score averages a prior-adjusted metric over prevalences ``pi`` in
``[a, b]``.  Brier averages uniformly in ``pi``; the log scores average
uniformly in ``logit(pi)``.  The closed forms reduce the average to one
clipped term per row of the evaluation set.  With ``clip`` projecting onto
``[1 - b, 1 - a]``:

* bounded Brier: ``E_half[(clip(1-y) - y)^2 - (clip(s_half) - y)^2]``
  equals ``(b - a) * E_pi[PAMA]``;
* bounded log: ``2 E_half[ln|1-y-clip(s_half)| - ln|1-y-clip(1-y)|]``
  equals ``(logit b - logit a) * E_logit[PAMA]``;
* DCA log: ``gamma * E_{1-c}[ln|1-y-clip(s_{1-c})| - ln|1-y-clip(1-y)|]``
  equals ``E_logit[PAMNB]`` with ``gamma = 1 / ((1-c)(logit b - logit a))``;
* weighted-accuracy log: the bounded log score with clip bounds
  ``[c (x) (1-b), c (x) (1-a)]``, equal to ``(logit b - logit a) * E_logit[PAMWA]``.

``E_half`` and ``E_{1-c}`` are expectations over the evaluation set
importance-reweighted to prevalence 1/2 and ``1 - c``.  Every per-row log term
is nonnegative: ``clip(1-y)`` is the point of the interval closest to ``1-y``.

:func:`quadrature_expectation` integrates the set metrics numerically and is
the independent check on all of the above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics, odds
from .dataset import Dataset, reweight
from .metrics import MetricKind

__all__ = [
    "PrevalenceInterval",
    "ScoreReport",
    "brier_terms",
    "log_terms",
    "bounded_brier",
    "bounded_log",
    "dca_log",
    "wa_log",
    "pointwise_losses",
    "score_terms",
    "decision_breakpoints",
    "quadrature_expectation",
    "score_value",
    "oracle_value",
    "SCORE_NAMES",
]


@dataclass(frozen=True)
class PrevalenceInterval:
    """Bounds ``0 < a < b < 1`` on the deployment prevalence."""

    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not 0.0 < a < b < 1.0:
            raise ValueError(f"prevalence interval needs 0 < a < b < 1, got ({a}, {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def parse(cls, text: str) -> "PrevalenceInterval":
        """Parse ``"a:b"``."""
        try:
            a, b = (float(part) for part in text.split(":"))
        except ValueError:
            raise ValueError(f"interval must be written a:b, got {text!r}") from None
        return cls(a, b)

    @property
    def logit_width(self) -> float:
        return float(odds.logit(self.b) - odds.logit(self.a))

    @property
    def width(self) -> float:
        return self.b - self.a

    def __str__(self) -> str:
        return f"{self.a!r}:{self.b!r}"


@dataclass(frozen=True, eq=False)
class ScoreReport:
    """Result of :func:`dca_log`.

    ``value = gamma * sum(weights * losses) / sum(weights)``; ``value`` is the
    expected net benefit per evaluation row (true-positive equivalents).
    """

    value: float
    losses: np.ndarray
    weights: np.ndarray
    gamma: float
    interval: PrevalenceInterval
    c: float
    units: str = "true positives per evaluation row"

    def __float__(self) -> float:
        return self.value

    @property
    def integral(self) -> float:
        """Unnormalised score ``(logit b - logit a) * value``."""
        return self.value * self.interval.logit_width


def brier_terms(s_half, y, lo: float, hi: float) -> np.ndarray:
    """Per-row ``(clip(1-y) - y)^2 - (clip(s_half) - y)^2`` on ``[lo, hi]``."""
    y = np.asarray(y, dtype=float)
    ref = odds.clip(lo, hi, 1.0 - y)
    got = odds.clip(lo, hi, s_half)
    return np.asarray((ref - y) ** 2 - (got - y) ** 2)


def log_terms(q, y, lo: float, hi: float) -> np.ndarray:
    """Per-row ``ln|1-y-clip(q)| - ln|1-y-clip(1-y)|`` on ``[lo, hi]``.

    Both distances are positive because ``1 - y`` is 0 or 1 and the clip
    interval lies strictly inside (0, 1).
    """
    y = np.asarray(y, dtype=float)
    target = 1.0 - y
    near = np.abs(target - odds.clip(lo, hi, target))
    got = np.abs(target - odds.clip(lo, hi, q))
    return np.asarray(np.log(got) - np.log(near))


def _expect(d: Dataset, pi: float, terms: np.ndarray) -> float:
    w = reweight(d, pi).weights
    return float(np.dot(w, terms) / d.norm)


def bounded_brier(d: Dataset, iv: PrevalenceInterval) -> float:
    """``(b - a) * E_{pi ~ Uniform(a, b)}[PAMA(pi)]``."""
    metrics._check_dataset(d)
    terms = brier_terms(d.half_scores, d.labels, 1.0 - iv.b, 1.0 - iv.a)
    return _expect(d, 0.5, terms)


def bounded_log(d: Dataset, iv: PrevalenceInterval) -> float:
    """``(logit b - logit a) * E_{logit pi ~ Uniform}[PAMA(pi)]``, in nats."""
    metrics._check_dataset(d)
    terms = log_terms(d.half_scores, d.labels, 1.0 - iv.b, 1.0 - iv.a)
    return 2.0 * _expect(d, 0.5, terms)


def wa_log(d: Dataset, iv: PrevalenceInterval, c: float) -> float:
    """``(logit b - logit a) * E_{logit pi ~ Uniform}[PAMWA(pi)]``."""
    metrics._check_dataset(d)
    odds._check_prob(c, "c", open_interval=True)
    lo = odds.odds_mul(c, 1.0 - iv.b)
    hi = odds.odds_mul(c, 1.0 - iv.a)
    terms = log_terms(d.half_scores, d.labels, lo, hi)
    return 2.0 * _expect(d, 0.5, terms)


def pointwise_losses(d: Dataset, iv: PrevalenceInterval, c: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-row DCA log terms and their weights on the reweighting to ``1 - c``.

    ``gamma * average(losses, weights=weights)`` is the DCA log score, so a
    bootstrap replicate is just a weighted mean over resampled rows.
    """
    metrics._check_dataset(d)
    odds._check_prob(c, "c", open_interval=True)
    shifted = reweight(d, 1.0 - c)
    s_cost = np.asarray(odds.odds_mul(1.0 - c, d.half_scores))
    losses = log_terms(s_cost, d.labels, 1.0 - iv.b, 1.0 - iv.a)
    w = np.asarray(shifted.weights, dtype=float)
    # divide by the stored set size, not the post-shift weight
    return losses * (w.sum() / d.norm), w


def dca_log(d: Dataset, iv: PrevalenceInterval, c: float) -> ScoreReport:
    """Expected prior-adjusted net benefit over ``logit pi ~ Uniform(logit a,
    logit b)``, via the clipped log closed form."""
    losses, w = pointwise_losses(d, iv, c)
    gamma = 1.0 / ((1.0 - c) * iv.logit_width)
    value = float(gamma * np.dot(w, losses) / w.sum())
    for arr in (losses, w):
        arr.setflags(write=False)
    return ScoreReport(value, losses, w, gamma, iv, float(c))


SCORE_NAMES = ("bounded-brier", "bounded-log", "dca-log", "wa-log")


def score_terms(d: Dataset, name: str, iv: PrevalenceInterval, c: float = 0.5):
    """Per-row ``(losses, weights, scale)`` of a named score, with
    ``scale * sum(weights * losses) / sum(weights)`` equal to its value.
    Bootstrapping resamples these fixed terms."""
    metrics._check_dataset(d)
    if name == "dca-log":
        losses, w = pointwise_losses(d, iv, c)
        return losses, w, 1.0 / ((1.0 - c) * iv.logit_width)
    w = np.asarray(reweight(d, 0.5).weights, dtype=float)
    if name == "bounded-brier":
        return brier_terms(d.half_scores, d.labels, 1.0 - iv.b, 1.0 - iv.a), w, w.sum() / d.norm
    if name == "bounded-log":
        lo, hi = 1.0 - iv.b, 1.0 - iv.a
    elif name == "wa-log":
        odds._check_prob(c, "c", open_interval=True)
        lo, hi = odds.odds_mul(c, 1.0 - iv.b), odds.odds_mul(c, 1.0 - iv.a)
    else:
        raise ValueError(f"unknown score {name!r}; expected one of {SCORE_NAMES}")
    return log_terms(d.half_scores, d.labels, lo, hi), w, 2.0 * w.sum() / d.norm


def score_value(d: Dataset, name: str, iv: PrevalenceInterval, c: float = 0.5) -> float:
    if name == "bounded-brier":
        return bounded_brier(d, iv)
    if name == "bounded-log":
        return bounded_log(d, iv)
    if name == "wa-log":
        return wa_log(d, iv, c)
    if name == "dca-log":
        return dca_log(d, iv, c).value
    raise ValueError(f"unknown score {name!r}; expected one of {SCORE_NAMES}")


def oracle_value(d: Dataset, name: str, iv: PrevalenceInterval, c: float = 0.5, nodes: int = 2049) -> float:
    """The quadrature counterpart of :func:`score_value`, on the same scale."""
    if name == "bounded-brier":
        return iv.width * quadrature_expectation(d, MetricKind.PAMA, iv, nodes=nodes, prior="uniform")
    if name == "bounded-log":
        return iv.logit_width * quadrature_expectation(d, MetricKind.PAMA, iv, nodes=nodes)
    if name == "wa-log":
        return iv.logit_width * quadrature_expectation(d, MetricKind.PAMWA, iv, c, nodes)
    if name == "dca-log":
        return quadrature_expectation(d, MetricKind.PAMNB, iv, c, nodes)
    raise ValueError(f"unknown score {name!r}; expected one of {SCORE_NAMES}")


# -- quadrature oracle -----------------------------------------------------

_ORACLE_KINDS = (MetricKind.PAMA, MetricKind.PAMNB, MetricKind.PAMWA)


def _decision_threshold(kind: MetricKind, c: float, tau: float) -> float:
    """Threshold ``t`` such that the decision at ``pi`` is ``pi (x) s_half >= t``."""
    if kind is MetricKind.PAMA:
        return tau
    if kind is MetricKind.PAMNB:
        return c
    return odds.odds_mul(c, tau)


def decision_breakpoints(d: Dataset, kind, c: float = 0.5, tau: float = 0.5) -> np.ndarray:
    """Sorted distinct ``logit(pi)`` at which some row's decision flips."""
    kind = MetricKind(kind)
    sh = d.half_scores
    sh = np.unique(sh[(sh > 0.0) & (sh < 1.0)])
    t = _decision_threshold(kind, c, tau)
    return np.unique(odds.logit(t) - np.asarray(odds.logit(sh)))


def _metric(d, kind, pi, c, tau, decision_pi=None):
    if kind is MetricKind.PAMA:
        return metrics.pama(d, pi, tau, decision_pi=decision_pi)
    if kind is MetricKind.PAMNB:
        return metrics.pamnb(d, pi, c, decision_pi=decision_pi)
    return metrics.pamwa(d, pi, tau, c, decision_pi=decision_pi)


def quadrature_expectation(
    d: Dataset,
    kind,
    iv: PrevalenceInterval,
    c: float = 0.5,
    nodes: int = 2049,
    *,
    tau: float = 0.5,
    prior: str = "logit",
    refine: bool = True,
) -> float:
    """Average of a prior-adjusted metric over the prevalence interval by the
    composite trapezoid rule.

    ``prior="logit"`` averages uniformly in ``logit(pi)`` (the log scores);
    ``prior="uniform"`` averages uniformly in ``pi`` (Brier).  The grid has
    ``nodes`` equally spaced points.  The integrand is a step function of the
    prevalence, so with ``refine=True`` the grid is augmented with every
    decision breakpoint and each panel is evaluated with the decisions of its
    interior; the rule then converges at second order.  ``refine=False`` is the
    plain rule, first order across the jumps.
    """
    kind = MetricKind(kind)
    if kind not in _ORACLE_KINDS:
        raise ValueError(f"quadrature supports {[k.value for k in _ORACLE_KINDS]}, got {kind.value}")
    if nodes < 3 or nodes % 2 == 0:
        raise ValueError("nodes must be odd and at least 3")
    if prior == "logit":
        lo, hi = odds.logit(iv.a), odds.logit(iv.b)
        to_pi = odds.sigmoid
    elif prior == "uniform":
        lo, hi = iv.a, iv.b
        to_pi = lambda x: x  # noqa: E731
    else:
        raise ValueError("prior must be 'logit' or 'uniform'")
    grid = np.linspace(lo, hi, nodes)
    if not refine:
        f = _metric(d, kind, np.asarray(to_pi(grid)), c, tau)
        return float(np.trapezoid(f, grid) / (hi - lo))
    bp = decision_breakpoints(d, kind, c, tau)
    if prior == "uniform":
        bp = np.asarray(odds.sigmoid(bp))
    grid = np.unique(np.concatenate([grid, bp[(bp > lo) & (bp < hi)]]))
    left, right = grid[:-1], grid[1:]
    mid_pi = np.asarray(to_pi(0.5 * (left + right)))
    ends = np.asarray(to_pi(np.concatenate([left, right])))
    f = _metric(d, kind, ends, c, tau, decision_pi=np.concatenate([mid_pi, mid_pi]))
    f_left, f_right = f[: left.size], f[left.size:]
    return float(np.sum(0.5 * (right - left) * (f_left + f_right)) / (hi - lo))
