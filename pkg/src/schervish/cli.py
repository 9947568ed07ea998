"""Command-line interface: ``schervish evaluate|compare|curve|generate``.

Reports are JSON with sorted keys; curves and datasets are CSV.  Every output
is a pure function of the input bytes and the flags, and is written
atomically.  Exit codes: 0 success, 1 invalid input or configuration,
2 ``--verify`` found a closed form disagreeing with its quadrature oracle.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__, metrics, odds, ranking
from .bootstrap import BootstrapSpec, bootstrap_ci, bootstrap_replicates, percentile_interval
from .calibration import pava_fit, recalibrate
from .dataset import Dataset, DatasetError, GeneratorSpec, concat, generate, load_csv, write_csv
from .decompose import NotApplicable, decompose_mechanism_labelshift, decompose_sharpness_calibration
from .metrics import MetricKind, MetricRequest
from .scores import (
    SCORE_NAMES,
    PrevalenceInterval,
    decision_breakpoints,
    oracle_value,
    score_terms,
    score_value,
)

SET_METRICS = tuple(k.value for k in MetricKind)
METRICS = SET_METRICS + ("auc",) + SCORE_NAMES
VERIFY_REL, VERIFY_ABS, AUC_TOL = 1e-6, 1e-9, 1e-10

_UNITS = {
    "accuracy": "fraction of rows",
    "balanced-accuracy": "fraction of rows",
    "weighted-accuracy": "fraction of cost-weighted rows",
    "bwa": "fraction of cost-weighted rows",
    "pama": "fraction of rows",
    "pamwa": "fraction of cost-weighted rows",
    "net-benefit": "true positives per evaluation row",
    "bnb": "true positives per evaluation row",
    "pamnb": "true positives per evaluation row",
    "auc": "probability",
    "bounded-brier": "accuracy integrated over prevalence",
    "bounded-log": "nats",
    "wa-log": "nats",
    "dca-log": "true positives per evaluation row",
}


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- configuration ------------------------------------------------------------

def _prob(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return v


def _interval(text: str) -> PrevalenceInterval:
    try:
        return PrevalenceInterval.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters shared by the report commands."""

    inputs: tuple[str, ...]
    metrics: tuple[str, ...]
    c: float
    interval: PrevalenceInterval
    pi: float
    tau: float
    pi0: float | None
    bootstrap: BootstrapSpec | None
    jobs: int
    nodes: int
    groups: tuple[str, ...] | None
    out: str | None

    def echo(self) -> dict:
        return {
            "inputs": list(self.inputs),
            "metrics": list(self.metrics),
            "c": self.c,
            "interval": [self.interval.a, self.interval.b],
            "pi": self.pi,
            "tau": self.tau,
            "pi0": self.pi0,
            "bootstrap": None if self.bootstrap is None else dataclasses.asdict(self.bootstrap),
            "jobs": self.jobs,
            "nodes": self.nodes,
            "groups": None if self.groups is None else list(self.groups),
        }


def _config(args) -> RunConfig:
    reps = getattr(args, "bootstrap", 0)
    boot = None
    if reps:
        boot = BootstrapSpec(reps, args.level, args.seed)
    jobs = getattr(args, "jobs", 1)
    if jobs == 0:
        jobs = os.cpu_count() or 1
    if jobs < 0:
        raise UsageError("--jobs must be nonnegative")
    nodes = getattr(args, "nodes", 2049)
    if nodes < 3 or nodes % 2 == 0:
        raise UsageError("--nodes must be odd and at least 3")
    groups = getattr(args, "groups", None)
    if groups is not None:
        groups = tuple(g for g in groups.split(",") if g != "")
    return RunConfig(
        inputs=(args.input,),
        metrics=tuple(getattr(args, "metric", None) or ()),
        c=args.c,
        interval=args.interval,
        pi=getattr(args, "pi", 0.5),
        tau=getattr(args, "tau", 0.5),
        pi0=getattr(args, "pi0", None),
        bootstrap=boot,
        jobs=jobs,
        nodes=nodes,
        groups=groups,
        out=args.out,
    )


# -- output ---------------------------------------------------------------------

def _clean(x):
    """Make a report JSON-safe: numpy scalars to Python, non-finite to null."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(out))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json(doc: dict) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


# -- evaluate -------------------------------------------------------------------

def _load(cfg: RunConfig) -> Dataset:
    d = load_csv(cfg.inputs[0], pi0=None if cfg.groups else cfg.pi0)
    if cfg.groups:
        if len(cfg.groups) != 1:
            raise UsageError("evaluate takes at most one --group")
        d = d.subgroup(cfg.groups[0])
        if cfg.pi0 is not None:
            d = d.with_pi0(cfg.pi0)
    return d


def _auc_entry(d: Dataset, cfg: RunConfig, verify: bool) -> tuple[dict, bool]:
    roc = ranking.auc_roc(d)
    entry = {"value": roc.auc, "tie_mass": roc.tie_mass, "n_pos": roc.n_pos, "n_neg": roc.n_neg}
    failed = False
    if cfg.bootstrap is not None:
        def stat(counts):
            w = d.weights * counts[0]
            if not (np.any(w[d.labels == 1] > 0) and np.any(w[d.labels == 0] > 0)):
                return float("nan")
            return ranking.auc_roc(Dataset(d.scores, d.labels, w)).auc
        reps = bootstrap_replicates([len(d)], stat, cfg.bootstrap, cfg.jobs)
        entry["ci"] = list(percentile_interval(reps, cfg.bootstrap.level))
    if verify:
        shift = ranking.auc_shift_average(d)
        calibrated = ranking.is_calibrated(d)
        residual = abs(roc.auc - shift)
        failed = calibrated and residual > AUC_TOL
        entry["verify"] = {
            "shift_average": shift,
            "residual": residual,
            "calibrated": calibrated,
            "tolerance": AUC_TOL,
            "passed": not failed,
        }
    return entry, failed


def _score_entry(d: Dataset, name: str, cfg: RunConfig, verify: bool) -> tuple[dict, bool]:
    iv, c = cfg.interval, cfg.c
    value = score_value(d, name, iv, c)
    entry = {"value": value, "parameters": {"interval": [iv.a, iv.b], "logit_width": iv.logit_width}}
    if name in ("dca-log", "wa-log"):
        entry["parameters"]["c"] = c
    losses, weights, scale = score_terms(d, name, iv, c)
    if name == "dca-log":
        entry["gamma"] = scale
        entry["integral"] = value * iv.logit_width
    if cfg.bootstrap is not None:
        lo, hi, _ = bootstrap_ci(losses, weights, scale, cfg.bootstrap, cfg.jobs)
        entry["ci"] = [lo, hi]
    failed = False
    if verify:
        ref = oracle_value(d, name, iv, c, cfg.nodes)
        residual = abs(value - ref)
        tol = max(VERIFY_REL * abs(ref), VERIFY_ABS)
        failed = residual > tol
        entry["verify"] = {"oracle": ref, "residual": residual, "tolerance": tol, "nodes": cfg.nodes,
                           "passed": not failed}
    return entry, failed


def _set_entry(d: Dataset, name: str, cfg: RunConfig) -> dict:
    req = MetricRequest(name, tau=cfg.tau, c=cfg.c, pi=cfg.pi)
    entry = {"value": metrics.evaluate(d, req),
             "parameters": {"tau": req.tau, "c": req.c, "pi": req.pi}}
    if cfg.bootstrap is not None:
        values, weights = metrics.pointwise(d, req)
        lo, hi, _ = bootstrap_ci(values, weights, 1.0, cfg.bootstrap, cfg.jobs)
        entry["ci"] = [lo, hi]
    return entry


def cmd_evaluate(args) -> int:
    cfg = _config(args)
    if not cfg.metrics:
        raise UsageError("at least one --metric is required")
    d = _load(cfg)
    report, failed = {}, False
    for name in cfg.metrics:
        if name == "auc":
            entry, bad = _auc_entry(d, cfg, args.verify)
        elif name in SCORE_NAMES:
            entry, bad = _score_entry(d, name, cfg, args.verify)
        else:
            entry, bad = _set_entry(d, name, cfg), False
        entry["units"] = _UNITS[name]
        report[name] = entry
        failed = failed or bad
    doc = {
        "command": "evaluate",
        "version": __version__,
        "parameters": {**cfg.echo(), "verify": bool(args.verify)},
        "dataset": {"n": len(d), "pi0": d.pi0, "total_weight": d.total_weight},
        "metrics": report,
    }
    _write(_json(doc), cfg.out)
    return 2 if failed else 0


# -- compare --------------------------------------------------------------------

def _two_groups(d: Dataset, cfg: RunConfig) -> tuple[str, str]:
    if d.groups is None:
        raise UsageError("compare needs a group column")
    names = list(cfg.groups) if cfg.groups else d.group_names()
    if len(names) != 2:
        raise UsageError(f"compare needs exactly two groups, got {names}")
    return names[0], names[1]


def _group_summary(d: Dataset, cfg: RunConfig) -> dict:
    rec = recalibrate(d, pava_fit(d))
    return {
        "n": len(d),
        "pi0": d.pi0,
        "total_weight": d.total_weight,
        "pamnb_own_prevalence": metrics.pamnb(d, d.pi0, cfg.c),
        "dca_log": score_value(d, "dca-log", cfg.interval, cfg.c),
        "dca_log_recalibrated": score_value(rec, "dca-log", cfg.interval, cfg.c),
        "auc": ranking.auc_roc(d).auc,
    }


def cmd_compare(args) -> int:
    cfg = _config(args)
    d = load_csv(cfg.inputs[0])
    ga, gb = _two_groups(d, cfg)
    dA, dB = d.subgroup(ga), d.subgroup(gb)
    sc = decompose_sharpness_calibration(dA, dB, cfg.interval, cfg.c, bootstrap=cfg.bootstrap, jobs=cfg.jobs)
    try:
        ml = decompose_mechanism_labelshift(dA, dB, cfg.c, bootstrap=cfg.bootstrap, jobs=cfg.jobs)
        mech = ml.as_dict()
    except NotApplicable as exc:
        mech = {"not_applicable": str(exc)}
    doc = {
        "command": "compare",
        "version": __version__,
        "parameters": {**cfg.echo(), "group_a": ga, "group_b": gb},
        "groups": {ga: _group_summary(dA, cfg), gb: _group_summary(dB, cfg)},
        "sharpness_calibration": sc.as_dict(),
        "mechanism_labelshift": mech,
    }
    _write(_json(doc), cfg.out)
    return 0


# -- curve ----------------------------------------------------------------------

def curve_table(series: dict[str, Dataset], iv: PrevalenceInterval, c: float, nodes: int,
                breakpoints: bool = False) -> list[dict]:
    """Rows of PAMNB against prevalence on a logit-uniform grid.

    With ``breakpoints`` every prevalence where some series jumps is added
    twice, once with the decisions just below it and once just above, so the
    trapezoid rule over the rows integrates the step function exactly.
    """
    lo, hi = odds.logit(iv.a), odds.logit(iv.b)
    grid = np.linspace(lo, hi, nodes)
    jumps = np.empty(0)
    if breakpoints:
        bp = np.concatenate([decision_breakpoints(d, MetricKind.PAMNB, c) for d in series.values()] or [jumps])
        jumps = np.unique(bp[(bp > lo) & (bp < hi)])
        grid = np.unique(np.concatenate([grid, jumps]))
    pis = np.asarray(odds.sigmoid(grid))
    if not breakpoints:
        cols = {k: metrics.pamnb(d, pis, c) for k, d in series.items()}
        return [{"pi": p, "logit_pi": x, **{k: float(v[i]) for k, v in cols.items()}}
                for i, (p, x) in enumerate(zip(pis.tolist(), grid.tolist()))]
    mids = np.asarray(odds.sigmoid(0.5 * (grid[:-1] + grid[1:])))
    is_jump = np.isin(grid, jumps)
    # (node index, decision prevalence, side) for every emitted row
    plan = []
    for i in range(grid.size):
        if i == 0:
            plan.append((i, mids[0], "right"))
        elif i == grid.size - 1:
            plan.append((i, mids[-1], "left"))
        elif is_jump[i]:
            plan.append((i, mids[i - 1], "left"))
            plan.append((i, mids[i], "right"))
        else:
            plan.append((i, pis[i], "both"))
    idx = np.array([p[0] for p in plan])
    dec = np.array([p[1] for p in plan])
    cols = {k: metrics.pamnb(d, pis[idx], c, decision_pi=dec) for k, d in series.items()}
    return [{"pi": float(pis[i]), "logit_pi": float(grid[i]), "side": side,
             **{k: float(v[j]) for k, v in cols.items()}}
            for j, (i, _, side) in enumerate(plan)]


def cmd_curve(args) -> int:
    cfg = _config(args)
    d = load_csv(cfg.inputs[0])
    if d.groups is None:
        base = {"all": d if cfg.pi0 is None else d.with_pi0(cfg.pi0)}
    else:
        names = list(cfg.groups) if cfg.groups else d.group_names()
        base = {g: d.subgroup(g) for g in names}
        if cfg.pi0 is not None:
            base = {g: x.with_pi0(cfg.pi0) for g, x in base.items()}
    series = {f"pamnb_{g}": x for g, x in base.items()}
    if args.recalibrated:
        series.update({f"pamnb_{g}_recalibrated": recalibrate(x, pava_fit(x)) for g, x in base.items()})
    rows = curve_table(series, cfg.interval, cfg.c, cfg.nodes, args.breakpoints)
    header = ["pi", "logit_pi"] + (["side"] if args.breakpoints else []) + list(series)
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(row[h] if isinstance(row[h], str) else repr(float(row[h])) for h in header) + "\n")
    _write(buf.getvalue(), cfg.out)
    return 0


# -- generate -------------------------------------------------------------------

_GEN_KEYS = {
    "n": int, "pi0": float, "mu0": float, "mu1": float, "sigma": float,
    "calib_slope": float, "calib_intercept": float, "seed": int,
}


def _parse_group(text: str, defaults: dict, index: int, seed: int) -> GeneratorSpec:
    tag, _, rest = text.partition(":")
    if not tag:
        raise UsageError(f"--group needs TAG[:key=value,...], got {text!r}")
    params = dict(defaults)
    params["seed"] = int(np.random.SeedSequence([seed, index]).generate_state(1)[0])
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        key = key.strip().replace("-", "_")
        if not eq or key not in _GEN_KEYS:
            raise UsageError(f"bad group parameter {item!r}; keys are {sorted(_GEN_KEYS)}")
        try:
            params[key] = _GEN_KEYS[key](val)
        except ValueError:
            raise UsageError(f"bad value in {item!r}") from None
    return GeneratorSpec(group=tag, **params)


def cmd_generate(args) -> int:
    defaults = {"n": args.n, "pi0": args.pi0, "mu0": args.mu0, "mu1": args.mu1, "sigma": args.sigma,
                "calib_slope": args.calib_slope, "calib_intercept": args.calib_intercept}
    if args.group:
        specs = [_parse_group(g, defaults, i, args.seed) for i, g in enumerate(args.group)]
        tags = [s.group for s in specs]
        if len(set(tags)) != len(tags):
            raise UsageError("group tags must be distinct")
    else:
        specs = [GeneratorSpec(seed=args.seed, **defaults)]
    d = concat([generate(s) for s in specs])
    buf = io.StringIO(newline="")
    write_csv(d, buf)
    meta = {
        "command": "generate",
        "version": __version__,
        "seed": args.seed,
        "groups": [dataclasses.asdict(s) for s in specs],
        "rows": len(d),
        "output": os.path.basename(args.out),
    }
    _write(buf.getvalue(), args.out)
    _write(_json(meta), args.out + ".meta.json")
    return 0


# -- argument parsing -------------------------------------------------------------

def _common(p, *, interval_default="0.05:0.95"):
    p.add_argument("input", help="CSV with columns score,label[,group][,weight]")
    p.add_argument("--c", type=_prob, default=0.5, help="cost ratio in (0, 1) (default 0.5)")
    p.add_argument("--interval", type=_interval, default=_interval(interval_default),
                   help=f"prevalence interval a:b (default {interval_default})")
    p.add_argument("--out", "-o", help="output path (default stdout); written atomically")


def _boot(p, default=2000):
    p.add_argument("--bootstrap", type=int, default=default, metavar="N",
                   help=f"bootstrap replicates, 0 to disable (default {default})")
    p.add_argument("--level", type=_prob, default=0.95, help="interval level (default 0.95)")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed (default 0)")
    p.add_argument("--jobs", type=int, default=1, help="worker threads, 0 for all cores (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="schervish", description="Evaluate scores under label shift and asymmetric costs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("evaluate", help="metrics and scores of one evaluation set")
    _common(p)
    p.add_argument("--metric", action="append", choices=METRICS, help="metric to report; repeatable")
    p.add_argument("--tau", type=_prob, default=0.5, help="decision threshold (default 0.5)")
    p.add_argument("--pi", type=_prob, default=0.5, help="deployment prevalence for pama/pamnb/pamwa")
    p.add_argument("--pi0", type=_prob, help="override the evaluation prevalence")
    p.add_argument("--group", dest="groups", help="restrict to one group")
    p.add_argument("--verify", action="store_true", help="cross-check every closed form numerically")
    p.add_argument("--nodes", type=int, default=2049, help="quadrature nodes for --verify (default 2049)")
    _boot(p, default=0)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="decompose the gap between two groups")
    _common(p)
    p.add_argument("--groups", help="comma-separated pair of groups (default: the file's two groups)")
    _boot(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("curve", help="PAMNB against prevalence, as CSV")
    _common(p)
    p.add_argument("--nodes", type=int, default=2049, help="grid nodes, odd (default 2049)")
    p.add_argument("--groups", help="comma-separated groups (default: all)")
    p.add_argument("--pi0", type=_prob, help="override the evaluation prevalence")
    p.add_argument("--breakpoints", action="store_true", help="add one-sided rows at every jump")
    p.add_argument("--recalibrated", action="store_true", help="add isotonic-recalibrated columns")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("generate", help="draw a synthetic label-shift dataset")
    p.add_argument("--out", "-o", required=True, help="CSV path; metadata goes to <out>.meta.json")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--pi0", type=_prob, default=0.5)
    p.add_argument("--mu0", type=float, default=0.0)
    p.add_argument("--mu1", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--calib-slope", type=float, default=1.0)
    p.add_argument("--calib-intercept", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--group", action="append", metavar="TAG[:key=val,...]",
                   help="add a group; keys n, pi0, mu0, mu1, sigma, calib_slope, calib_intercept, seed")
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, DatasetError, NotApplicable, ValueError, OSError) as exc:
        err = {"type": type(exc).__name__, "message": str(exc)}
        if getattr(exc, "row", None) is not None:
            err["row"] = exc.row
        sys.stderr.write(json.dumps({"error": err}, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
