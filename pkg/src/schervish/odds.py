"""Scalar algebra on probabilities: odds multiplication, logit/sigmoid,
clipping, label-shift importance weights and prior-adjusted decisions.

Every function accepts Python floats or numpy arrays and broadcasts.
Scalar inputs return Python floats (or ints for decisions).

Odds multiplication ``a (x) b = ab / (ab + (1-a)(1-b))`` is addition in
log-odds space; ``0.5`` is its identity and ``1 - a`` is the inverse of ``a``.
It is extended by continuity to ``b in {0, 1}`` so that raw scores of exactly
0 or 1 can be prior-adjusted; ``0 (x) 1`` has no limit and is rejected.
"""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = [
    "odds_mul",
    "logit",
    "sigmoid",
    "clip",
    "importance_weight",
    "half_score",
    "adjusted_score",
    "decide",
    "classify",
]


def _unwrap(x):
    if isinstance(x, np.ndarray) and x.ndim == 0:
        return x.item()
    return x


def _check_prob(x, name, *, open_interval=False):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    if open_interval:
        if np.any((arr <= 0.0) | (arr >= 1.0)):
            raise ValueError(f"{name} must lie in the open interval (0, 1)")
    elif np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError(f"{name} must lie in [0, 1]")
    return arr


def odds_mul(a, b):
    """Odds multiplication ``ab / (ab + (1-a)(1-b))``.

    Raises ValueError for the indeterminate pairs ``(0, 1)`` and ``(1, 0)``.
    """
    a = _check_prob(a, "a")
    b = _check_prob(b, "b")
    num = a * b
    rest = (1.0 - a) * (1.0 - b)
    den = num + rest
    if np.any(den == 0.0):
        raise ValueError("odds multiplication of 0 and 1 is undefined")
    # form the smaller of p and 1 - p first so a result near 1 is rounded once
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(num <= rest, num / den, 1.0 - rest / den)
    return _unwrap(out)


def logit(p):
    """Natural log-odds ``ln(p / (1 - p))`` for ``p`` in (0, 1)."""
    p = _check_prob(p, "p", open_interval=True)
    return _unwrap(special.logit(p))


def sigmoid(x):
    """Inverse of :func:`logit`."""
    return _unwrap(special.expit(np.asarray(x, dtype=float)))


def clip(lo, hi, x):
    """Project ``x`` onto ``[lo, hi]``."""
    lo_a = np.asarray(lo, dtype=float)
    hi_a = np.asarray(hi, dtype=float)
    if np.any(lo_a > hi_a):
        raise ValueError(f"clip bounds out of order: lo={lo} > hi={hi}")
    return _unwrap(np.maximum(lo_a, np.minimum(hi_a, np.asarray(x, dtype=float))))


def importance_weight(pi0, pi, y):
    """Label-shift weight ``(pi/pi0)^y ((1-pi)/(1-pi0))^(1-y)`` moving an
    evaluation set with prevalence ``pi0`` to prevalence ``pi``."""
    pi0 = _check_prob(pi0, "pi0", open_interval=True)
    pi = _check_prob(pi, "pi")
    y = np.asarray(y)
    if np.any((y != 0) & (y != 1)):
        raise ValueError("labels must be 0 or 1")
    return _unwrap(np.where(y == 1, pi / pi0, (1.0 - pi) / (1.0 - pi0)))


def half_score(s, pi0):
    """Score re-expressed for a balanced population, ``(1 - pi0) (x) s``."""
    pi0 = _check_prob(pi0, "pi0", open_interval=True)
    return odds_mul(1.0 - pi0, s)


def adjusted_score(s, pi0, pi):
    """Posterior at deployment prevalence ``pi``: ``pi (x) (1-pi0) (x) s``."""
    return odds_mul(pi, half_score(s, pi0))


def decide(s_half, pi, threshold, *, pi_c=None):
    """Prior-adjusted decision ``1{pi (x) s_half >= threshold}``.

    The comparison is done by cross-multiplication,
    ``pi * s_half * (1 - t) >= (1 - pi) * (1 - s_half) * t``, so that it never
    divides and exact ties (including the degenerate ``pi in {0, 1}`` cases)
    resolve to the positive class.  ``pi_c`` optionally supplies ``1 - pi``
    when the caller holds it exactly; prevalences built as ``1 - t`` lose the
    last bit of ``t`` otherwise, which silently breaks ties at ``t``.
    """
    s_half = np.asarray(s_half, dtype=float)
    pi = np.asarray(pi, dtype=float)
    pi_c = 1.0 - pi if pi_c is None else np.asarray(pi_c, dtype=float)
    t = np.asarray(threshold, dtype=float)
    lhs = (pi * s_half) * (1.0 - t)
    rhs = (pi_c * (1.0 - s_half)) * t
    return _unwrap((lhs >= rhs).astype(np.int8))


def classify(s, pi0, pi, c):
    """Cost-weighted, prior-adjusted classifier: 1 iff
    ``adjusted_score(s, pi0, pi) >= c``."""
    _check_prob(c, "c", open_interval=True)
    _check_prob(pi, "pi")
    out = decide(half_score(s, pi0), pi, c)
    return int(out) if np.ndim(out) == 0 else out
