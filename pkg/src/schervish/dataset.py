"""Scored, labelled evaluation sets and the label-shift generator.

A :class:`Dataset` stores scores, binary labels, positive weights and optional
group tags as read-only numpy arrays together with two scalars:

``pi0``
    the prevalence the scores are assumed calibrated for (the weighted label
    mean unless overridden);
``norm``
    the denominator every metric divides by.  It is the total weight of the
    stored evaluation set and is carried unchanged through :func:`reweight`,
    so shifted datasets keep dividing by the pre-shift size.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Sequence

import numpy as np

from . import odds

__all__ = [
    "DatasetError",
    "Sample",
    "Dataset",
    "GeneratorSpec",
    "load_csv",
    "write_csv",
    "empirical_prevalence",
    "reweight",
    "generate",
    "generate_with_features",
    "concat",
]


class DatasetError(ValueError):
    """Invalid evaluation data.  ``row`` is 1-based over data rows."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


@dataclass(frozen=True)
class Sample:
    score: float
    label: int
    group: str | None = None
    weight: float = 1.0


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    scores: np.ndarray
    labels: np.ndarray
    weights: np.ndarray
    groups: tuple[str | None, ...] | None = None
    pi0: float = field(default=float("nan"))
    norm: float = field(default=float("nan"))

    def __post_init__(self):
        s = np.array(self.scores, dtype=float)
        y = np.array(self.labels)
        w = np.array(self.weights, dtype=float)
        if s.ndim != 1 or s.shape != y.shape or s.shape != w.shape:
            raise DatasetError("scores, labels and weights must be 1-d and of equal length")
        if s.size == 0:
            raise DatasetError("dataset is empty")
        if not np.all(np.isfinite(s)) or np.any((s < 0) | (s > 1)):
            raise DatasetError("scores must lie in [0, 1]")
        if np.any((y != 0) & (y != 1)):
            raise DatasetError("labels must be 0 or 1")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DatasetError("weights must be finite and nonnegative")
        total = float(w.sum())
        if total <= 0:
            raise DatasetError("total weight must be positive")
        y = y.astype(np.int8)
        groups = self.groups
        if groups is not None:
            groups = tuple(groups)
            if len(groups) != s.size:
                raise DatasetError("groups must match the number of samples")
        pi0 = self.pi0
        if math.isnan(pi0):
            pi0 = float(np.sum(w * y) / total)
        if not 0.0 <= pi0 <= 1.0:
            raise DatasetError(f"prevalence {pi0} outside [0, 1]")
        norm = total if math.isnan(self.norm) else float(self.norm)
        object.__setattr__(self, "scores", _frozen(s))
        object.__setattr__(self, "labels", _frozen(y))
        object.__setattr__(self, "weights", _frozen(w))
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "pi0", float(pi0))
        object.__setattr__(self, "norm", norm)

    @classmethod
    def from_arrays(cls, scores, labels, weights=None, groups=None, pi0=None) -> "Dataset":
        """Build a validated evaluation set: positive weights, both classes
        present, and ``pi0`` strictly inside (0, 1)."""
        scores = np.asarray(scores, dtype=float)
        if weights is None:
            weights = np.ones_like(scores)
        weights = np.asarray(weights, dtype=float)
        if np.any(weights <= 0):
            raise DatasetError("weights must be positive")
        d = cls(scores, labels, weights, groups, float("nan") if pi0 is None else float(pi0))
        d.require_both_classes()
        return d

    @classmethod
    def from_samples(cls, samples: Iterable[Sample], pi0=None) -> "Dataset":
        samples = list(samples)
        groups = [smp.group for smp in samples]
        return cls.from_arrays(
            [smp.score for smp in samples],
            [smp.label for smp in samples],
            [smp.weight for smp in samples],
            groups if any(g is not None for g in groups) else None,
            pi0,
        )

    def require_both_classes(self) -> None:
        pos = float(np.sum(self.weights[self.labels == 1]))
        neg = float(np.sum(self.weights[self.labels == 0]))
        if pos <= 0 or neg <= 0:
            raise DatasetError("degenerate prevalence: both labels must be present")
        if not 0.0 < self.pi0 < 1.0:
            raise DatasetError(f"degenerate prevalence: pi0={self.pi0} must lie in (0, 1)")

    def __len__(self) -> int:
        return self.scores.size

    def __iter__(self) -> Iterator[Sample]:
        groups = self.groups or (None,) * len(self)
        for s, y, w, g in zip(self.scores, self.labels, self.weights, groups):
            yield Sample(float(s), int(y), g, float(w))

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def half_scores(self) -> np.ndarray:
        """Scores adjusted to a balanced population, ``(1 - pi0) (x) s``."""
        return np.asarray(odds.half_score(self.scores, self.pi0))

    def with_scores(self, scores) -> "Dataset":
        """Same rows, weights and prevalence with new scores."""
        return Dataset(np.asarray(scores, dtype=float), self.labels, self.weights,
                       self.groups, self.pi0, self.norm)

    def with_pi0(self, pi0: float) -> "Dataset":
        d = Dataset(self.scores, self.labels, self.weights, self.groups, float(pi0), self.norm)
        d.require_both_classes()
        return d

    def group_names(self) -> list[str]:
        if self.groups is None:
            return []
        return sorted({g for g in self.groups if g is not None})

    def subgroup(self, tag: str) -> "Dataset":
        """Rows tagged ``tag`` as an independent dataset with its own
        empirical prevalence."""
        if self.groups is None:
            raise DatasetError("dataset has no group column")
        mask = np.array([g == tag for g in self.groups])
        if not mask.any():
            raise DatasetError(f"no rows in group {tag!r}")
        return Dataset.from_arrays(
            self.scores[mask], self.labels[mask], self.weights[mask],
            tuple(g for g, m in zip(self.groups, mask) if m),
        )

    def take(self, idx) -> "Dataset":
        """Rows at positions ``idx`` (with repetition), prevalence re-estimated."""
        idx = np.asarray(idx)
        groups = None if self.groups is None else tuple(self.groups[i] for i in idx)
        return Dataset(self.scores[idx], self.labels[idx], self.weights[idx], groups)


def empirical_prevalence(d: Dataset) -> float:
    """Weighted mean of the labels."""
    return float(np.sum(d.weights * d.labels) / d.weights.sum())


def reweight(d: Dataset, pi: float) -> Dataset:
    """Importance-reweight ``d`` to deployment prevalence ``pi``.

    Each weight is multiplied by ``importance_weight(d.pi0, pi, y)``.  The
    result carries ``pi`` as its prevalence and keeps ``d.norm``.  At
    ``pi in {0, 1}`` one class is zero-weighted.
    """
    w = d.weights * np.asarray(odds.importance_weight(d.pi0, pi, d.labels))
    return Dataset(d.scores, d.labels, w, d.groups, float(pi), d.norm)


# -- CSV ---------------------------------------------------------------------

_COLUMNS = ("score", "label", "group", "weight")


def _open_text(source) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"), newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8", newline=""), False


def _parse_float(text: str, what: str, row: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DatasetError(f"malformed {what} {text!r}", row) from None
    if not math.isfinite(v):
        raise DatasetError(f"{what} must be finite, got {text!r}", row)
    return v


def load_csv(source, pi0: float | None = None) -> Dataset:
    """Read ``score,label[,group][,weight]`` rows.

    ``source`` may be a path, raw bytes, or a binary/text stream.  Errors name
    the offending data row (1-based, header excluded).
    """
    fh, owned = _open_text(source)
    try:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError("missing header row") from None
        if header and header[0].startswith("﻿"):
            header[0] = header[0][1:]
        unknown = [h for h in header if h not in _COLUMNS]
        if unknown or "score" not in header or "label" not in header or len(set(header)) != len(header):
            raise DatasetError(f"header must name columns score,label[,group][,weight]; got {header}")
        col = {h: i for i, h in enumerate(header)}
        scores, labels, weights, groups = [], [], [], []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"expected {len(header)} fields, got {len(row)}", row_no)
            s = _parse_float(row[col["score"]].strip(), "score", row_no)
            if not 0.0 <= s <= 1.0:
                raise DatasetError(f"score out of range [0, 1]: {s!r}", row_no)
            lab_text = row[col["label"]].strip()
            lab = _parse_float(lab_text, "label", row_no)
            if lab not in (0.0, 1.0):
                raise DatasetError(f"label must be 0 or 1, got {lab_text!r}", row_no)
            w = 1.0
            if "weight" in col:
                w = _parse_float(row[col["weight"]].strip(), "weight", row_no)
                if w <= 0:
                    raise DatasetError(f"weight must be positive, got {w!r}", row_no)
            scores.append(s)
            labels.append(int(lab))
            weights.append(w)
            if "group" in col:
                groups.append(row[col["group"]])
    finally:
        if owned:
            fh.close()
    if not scores:
        raise DatasetError("no data rows")
    return Dataset.from_arrays(scores, labels, weights, groups if "group" in col else None, pi0)


def write_csv(d: Dataset, dest) -> None:
    """Write ``d`` so that :func:`load_csv` reproduces it exactly.  Floats use
    ``repr`` (shortest round-tripping form); the weight column is emitted only
    when some weight differs from 1."""
    header = ["score", "label"]
    if d.groups is not None:
        header.append("group")
    with_w = bool(np.any(d.weights != 1.0))
    if with_w:
        header.append("weight")
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    groups = d.groups or (None,) * len(d)
    for s, y, w, g in zip(d.scores.tolist(), d.labels.tolist(), d.weights.tolist(), groups):
        row = [repr(s), str(y)]
        if d.groups is not None:
            row.append("" if g is None else g)
        if with_w:
            row.append(repr(w))
        writer.writerow(row)
    data = buf.getvalue().encode("utf-8")
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "wb") as fh:
            fh.write(data)
    elif isinstance(dest, io.TextIOBase):
        dest.write(data.decode("utf-8"))
    else:
        dest.write(data)


# -- synthetic label-shift data -----------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    """Equal-variance Gaussian classes with a logit-affine score distortion.

    ``x | y ~ Normal(mu_y, sigma)``; the emitted score is
    ``sigmoid(calib_slope * logit(p) + calib_intercept)`` where ``p`` is the
    exact Bayes posterior at prevalence ``pi0``.
    """

    n: int = 1000
    pi0: float = 0.5
    mu0: float = 0.0
    mu1: float = 1.0
    sigma: float = 1.0
    calib_slope: float = 1.0
    calib_intercept: float = 0.0
    seed: int = 0
    group: str | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        if not 0.0 < self.pi0 < 1.0:
            raise ValueError("pi0 must lie in (0, 1)")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        for name in ("mu0", "mu1", "calib_slope", "calib_intercept"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def posterior_logit(self, x):
        """Exact log-odds of ``y = 1`` given ``x`` at prevalence ``pi0``."""
        x = np.asarray(x, dtype=float)
        mid = 0.5 * (self.mu0 + self.mu1)
        return (self.mu1 - self.mu0) * (x - mid) / self.sigma**2 + math.log(self.pi0 / (1 - self.pi0))


def _draw(spec: GeneratorSpec, rng: np.random.Generator):
    y = (rng.random(spec.n) < spec.pi0).astype(np.int8)
    x = rng.normal(np.where(y == 1, spec.mu1, spec.mu0), spec.sigma)
    z = spec.calib_slope * spec.posterior_logit(x) + spec.calib_intercept
    return np.asarray(odds.sigmoid(z), dtype=float), y, x


def generate_with_features(spec: GeneratorSpec) -> tuple[Dataset, np.ndarray]:
    """Like :func:`generate` but also returns the latent feature ``x``."""
    scores, labels, x = _draw(spec, np.random.default_rng(spec.seed))
    groups = None if spec.group is None else (spec.group,) * spec.n
    return Dataset.from_arrays(scores, labels, None, groups), x


def generate(spec: GeneratorSpec) -> Dataset:
    """Draw a dataset from ``spec``; identical specs give identical data."""
    scores, labels, _ = _draw(spec, np.random.default_rng(spec.seed))
    groups = None if spec.group is None else (spec.group,) * spec.n
    return Dataset.from_arrays(scores, labels, None, groups)


def concat(parts: Sequence[Dataset]) -> Dataset:
    """Stack datasets row-wise; prevalence is re-estimated."""
    groups = None
    if any(p.groups is not None for p in parts):
        groups = tuple(g for p in parts for g in (p.groups or (None,) * len(p)))
    return Dataset.from_arrays(
        np.concatenate([p.scores for p in parts]),
        np.concatenate([p.labels for p in parts]),
        np.concatenate([p.weights for p in parts]),
        groups,
    )
