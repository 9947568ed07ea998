"""Additive decompositions of a between-group gap in expected net benefit.

Both decompositions compare two groups ``A`` and ``B``, each prior-adjusted
from its own empirical prevalence.

* Sharpness and calibration: the gap in DCA log score splits into the gap
  after each group is recalibrated in-sample by isotonic regression
  (sharpness) plus what recalibration recovers (calibration).
* Mechanism and label shift: the gap in net benefit at each group's own
  prevalence splits into the gap at shared prevalences, averaged over the
  logit-uniform interval between the two prevalences (mechanism), plus the
  rest (label shift).

Every report is checked for exact additivity when it is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .bootstrap import BootstrapSpec, bootstrap_replicates, percentile_interval
from .calibration import pava_fit, recalibrate
from .dataset import Dataset
from .metrics import MetricKind, MetricRequest
from .scores import PrevalenceInterval, dca_log, score_terms

__all__ = [
    "DecompositionReport",
    "NotApplicable",
    "decompose_sharpness_calibration",
    "decompose_mechanism_labelshift",
]

ADDITIVITY_TOL = 1e-10


class NotApplicable(ValueError):
    """The decomposition is undefined for these inputs."""


@dataclass(frozen=True)
class DecompositionReport:
    delta_total: float
    parts: dict[str, float]
    interval: PrevalenceInterval
    c: float
    terms: dict[str, float] = field(default_factory=dict)
    ci: dict[str, tuple[float, float]] | None = None

    def __post_init__(self):
        _check_close(self.delta_total, sum(self.parts.values()), "additivity")

    def as_dict(self) -> dict:
        out = {
            "delta_total": self.delta_total,
            "parts": dict(self.parts),
            "interval": [self.interval.a, self.interval.b],
            "c": self.c,
            "terms": dict(self.terms),
        }
        if self.ci is not None:
            out["ci"] = {k: list(v) for k, v in self.ci.items()}
        return out


def _check_close(x: float, y: float, what: str) -> None:
    if abs(x - y) > ADDITIVITY_TOL * max(1.0, abs(x), abs(y)):
        raise ArithmeticError(f"{what} violated: {x!r} != {y!r}")


def _wmean(k, w, v):
    den = float(np.dot(k, w))
    return float(np.dot(k, w * v)) / den if den > 0 else float("nan")


def _cis(names, sizes, stat, bootstrap, jobs):
    reps = bootstrap_replicates(sizes, stat, bootstrap, jobs)
    return {n: percentile_interval(reps[:, i], bootstrap.level) for i, n in enumerate(names)}


def decompose_sharpness_calibration(
    dA: Dataset,
    dB: Dataset,
    iv: PrevalenceInterval,
    c: float,
    *,
    bootstrap: BootstrapSpec | None = None,
    jobs: int = 1,
) -> DecompositionReport:
    """``delta_total = sharpness + calibration`` for the DCA log score.

    ``calibration`` is assembled twice: as ``delta_total - sharpness`` and as
    ``[T_A - T_A*] + [T_B* - T_B]`` where ``*`` marks the recalibrated group.
    The two must agree.  Confidence intervals resample rows within each group
    over the fixed per-row terms; the isotonic maps are not refitted.
    """
    rA, rB = (recalibrate(d, pava_fit(d)) for d in (dA, dB))
    tA, tB = dca_log(dA, iv, c).value, dca_log(dB, iv, c).value
    sA, sB = dca_log(rA, iv, c).value, dca_log(rB, iv, c).value
    total = tA - tB
    sharp = sA - sB
    calib = (tA - sA) + (sB - tB)
    _check_close(calib, total - sharp, "calibration paths")
    terms = {"A": tA, "B": tB, "A_recalibrated": sA, "B_recalibrated": sB}
    ci = None
    if bootstrap is not None:
        per = [score_terms(d, "dca-log", iv, c) for d in (dA, dB, rA, rB)]

        def stat(counts):
            kA, kB = counts
            t = [g * _wmean(k, w, v) for (v, w, g), k in zip(per, (kA, kB, kA, kB))]
            tot, sh = t[0] - t[1], t[2] - t[3]
            return tot, sh, tot - sh

        ci = _cis(("delta_total", "sharpness", "calibration"), [len(dA), len(dB)], stat, bootstrap, jobs)
    return DecompositionReport(total, {"sharpness": sharp, "calibration": calib}, iv, float(c), terms, ci)


def decompose_mechanism_labelshift(
    dA: Dataset,
    dB: Dataset,
    c: float,
    *,
    bootstrap: BootstrapSpec | None = None,
    jobs: int = 1,
) -> DecompositionReport:
    """``delta_total = mechanism + label_shift`` for net benefit.

    ``delta_total`` compares each group at its own prevalence.  ``mechanism``
    compares expected net benefit over the logit-uniform interval spanned by
    the two prevalences.  ``label_shift`` is assembled twice, as the
    difference and as ``[PAMNB_A - E PAMNB_A] + [E PAMNB_B - PAMNB_B]``.
    Raises :class:`NotApplicable` when the prevalences coincide.
    """
    if dA.pi0 == dB.pi0:
        raise NotApplicable("groups have equal prevalence; the interval between them is empty")
    iv = PrevalenceInterval(min(dA.pi0, dB.pi0), max(dA.pi0, dB.pi0))
    eA, eB = dca_log(dA, iv, c).value, dca_log(dB, iv, c).value
    pA, pB = metrics.pamnb(dA, dA.pi0, c), metrics.pamnb(dB, dB.pi0, c)
    total = pA - pB
    mech = eA - eB
    shift = (pA - eA) + (eB - pB)
    _check_close(shift, total - mech, "label-shift paths")
    terms = {"A_own": pA, "B_own": pB, "A_expected": eA, "B_expected": eB, "pi0_A": dA.pi0, "pi0_B": dB.pi0}
    ci = None
    if bootstrap is not None:
        dca = [score_terms(d, "dca-log", iv, c) for d in (dA, dB)]
        own = [metrics.pointwise(d, MetricRequest(MetricKind.PAMNB, c=c, pi=d.pi0)) for d in (dA, dB)]

        def stat(counts):
            e = [g * _wmean(k, w, v) for (v, w, g), k in zip(dca, counts)]
            p = [_wmean(k, w, v) for (v, w), k in zip(own, counts)]
            tot, me = p[0] - p[1], e[0] - e[1]
            return tot, me, tot - me

        ci = _cis(("delta_total", "mechanism", "label_shift"), [len(dA), len(dB)], stat, bootstrap, jobs)
    return DecompositionReport(total, {"mechanism": mech, "label_shift": shift}, iv, float(c), terms, ci)
