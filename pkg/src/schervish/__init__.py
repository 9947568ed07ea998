"""Evaluation of probabilistic classifiers under label shift and asymmetric
costs: prior-adjusted set metrics, their clipped-log and Brier averages over a
prevalence interval, AUC-ROC as an average over label shifts, isotonic
recalibration, subgroup decompositions and bootstrap intervals."""

__version__ = "0.1.0"

from .bootstrap import BootstrapSpec, bootstrap_ci
from .calibration import CalibrationMap, pava_fit, recalibrate
from .dataset import Dataset, DatasetError, GeneratorSpec, Sample, generate, load_csv, reweight, write_csv
from .decompose import (
    DecompositionReport,
    NotApplicable,
    decompose_mechanism_labelshift,
    decompose_sharpness_calibration,
)
from .metrics import (
    MetricKind,
    MetricRequest,
    ValueMatrix,
    accuracy,
    balanced_accuracy,
    balanced_net_benefit,
    balanced_weighted_accuracy,
    net_benefit,
    pama,
    pamnb,
    pamwa,
    weighted_accuracy,
)
from .odds import adjusted_score, classify, clip, half_score, importance_weight, logit, odds_mul, sigmoid
from .ranking import RocResult, auc_roc, auc_roc_pairs, auc_shift_average
from .scores import (
    PrevalenceInterval,
    ScoreReport,
    bounded_brier,
    bounded_log,
    dca_log,
    pointwise_losses,
    quadrature_expectation,
    wa_log,
)

__all__ = [
    "accuracy",
    "adjusted_score",
    "auc_roc",
    "auc_roc_pairs",
    "auc_shift_average",
    "balanced_accuracy",
    "balanced_net_benefit",
    "balanced_weighted_accuracy",
    "bootstrap_ci",
    "BootstrapSpec",
    "bounded_brier",
    "bounded_log",
    "CalibrationMap",
    "classify",
    "clip",
    "Dataset",
    "DatasetError",
    "dca_log",
    "decompose_mechanism_labelshift",
    "decompose_sharpness_calibration",
    "DecompositionReport",
    "generate",
    "GeneratorSpec",
    "half_score",
    "importance_weight",
    "load_csv",
    "logit",
    "MetricKind",
    "MetricRequest",
    "net_benefit",
    "NotApplicable",
    "odds_mul",
    "pama",
    "pamnb",
    "pamwa",
    "pava_fit",
    "pointwise_losses",
    "PrevalenceInterval",
    "quadrature_expectation",
    "recalibrate",
    "reweight",
    "RocResult",
    "Sample",
    "ScoreReport",
    "sigmoid",
    "ValueMatrix",
    "wa_log",
    "weighted_accuracy",
    "write_csv",
]
