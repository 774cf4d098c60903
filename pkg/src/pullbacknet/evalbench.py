"""Metrics, the multi-trial benchmark protocol, and report emission.

The seed discipline makes every number in a report a pure function of the
configuration: trial t of dataset d splits with seed hash(base_seed, d, t),
shared by every method so comparisons are paired, and each (method, trial)
fit draws from its own stream hash(base_seed, method, t). Timing covers the
fit call only.
"""

import csv
import hashlib
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .activation import ActivationKind
from .baselines import belm_fit, eielm_fit, elm_fit, ielm_fit
from .dataio import load_dataset, load_manifest, make_split, normalize_dataset, normalize_split
from .errors import InvalidInputError, ShapeError
from .numkernel import RngStream, as_matrix
from .pullback import decision_labels, fit_network

__all__ = [
    "METHOD_NAMES",
    "MethodSpec",
    "parse_method",
    "rmse",
    "accuracy",
    "stable_seed",
    "TrialResult",
    "BenchReport",
    "run_trials",
    "emit_report",
    "strip_timing",
]

METHOD_NAMES = ("proposed", "elm", "ielm", "eielm", "belm")

_METRICS = ("test_rmse", "test_accuracy", "train_rmse", "train_time_s")


def rmse(Y, T):
    """Root mean square error over all N*m entries."""
    Y = as_matrix(Y, "Y")
    T = as_matrix(T, "T")
    if Y.shape != T.shape:
        raise ShapeError("shape mismatch: %s vs %s" % (Y.shape, T.shape))
    if Y.size == 0:
        raise InvalidInputError("rmse of empty matrices is undefined")
    d = Y - T
    return float(np.sqrt(np.mean(d * d)))


def accuracy(pred, truth):
    """Fraction of exact label matches."""
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise InvalidInputError(
            "length mismatch: %d predictions vs %d truths" % (pred.size, truth.size)
        )
    if pred.size == 0:
        raise InvalidInputError("accuracy of empty label lists is undefined")
    return float(np.mean(pred == truth))


def stable_seed(*parts):
    """Platform- and run-stable 64-bit seed derived from the parts."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class MethodSpec:
    """A benchmark method: family name plus hidden-node count."""

    name: str
    nodes: int = 1

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise InvalidInputError(
                "unknown method %r (choose from %s)" % (self.name, ", ".join(METHOD_NAMES))
            )
        if self.nodes < 1:
            raise InvalidInputError("node count must be >= 1, got %r" % self.nodes)

    @property
    def label(self):
        return "%s@%d" % (self.name, self.nodes)


def parse_method(text):
    """Parse "name@nodes" (bare name means one node) into a MethodSpec."""
    if isinstance(text, MethodSpec):
        return text
    name, _, count = str(text).strip().partition("@")
    if not count:
        return MethodSpec(name=name)
    try:
        nodes = int(count)
    except ValueError:
        raise InvalidInputError("bad node count in method spec %r" % text) from None
    return MethodSpec(name=name, nodes=nodes)


@dataclass
class TrialResult:
    """Metrics of one (dataset, method, trial) fit, or its failure."""

    dataset: str
    method: str
    trial: int
    nodes: int
    train_time_s: float | None = None
    test_rmse: float | None = None
    test_accuracy: float | None = None
    train_rmse: float | None = None
    error: str | None = None

    def to_entry(self):
        entry = {"trial": self.trial, "nodes": self.nodes}
        if self.error is not None:
            entry["error"] = self.error
            return entry
        entry["train_time_s"] = self.train_time_s
        for key in ("test_rmse", "test_accuracy", "train_rmse"):
            value = getattr(self, key)
            if value is not None:
                entry[key] = value
        return entry


def _aggregate(values):
    arr = np.asarray(values, dtype=np.float64)
    std = float(np.std(arr, ddof=1)) if arr.size > 1 else 0.0  # single trial: 0 by convention
    return {
        "mean": float(np.mean(arr)),
        "std": std,
        "min": float(np.min(arr)),
        "max": float(np.max(arr)),
    }


@dataclass
class BenchReport:
    """Config echo plus the flat trial list; aggregates are derived views."""

    config: dict
    trials: list = field(default_factory=list)

    def groups(self):
        """Trials grouped by (dataset, method), sorted canonically."""
        keys = []
        by_key = {}
        for tr in self.trials:
            key = (tr.dataset, tr.method)
            if key not in by_key:
                by_key[key] = []
                keys.append(key)
            by_key[key].append(tr)
        for key in keys:
            by_key[key].sort(key=lambda tr: tr.trial)
        return {key: by_key[key] for key in sorted(keys)}

    def aggregates(self, dataset, method):
        """Per-metric {mean, std, min, max} over the group's clean trials."""
        group = self.groups().get((dataset, method), [])
        out = {}
        for metric in _METRICS:
            values = [getattr(tr, metric) for tr in group if getattr(tr, metric) is not None]
            if values:
                out[metric] = _aggregate(values)
        return out

    def to_dict(self):
        results = []
        for (dataset, method), group in self.groups().items():
            results.append(
                {
                    "dataset": dataset,
                    "method": method,
                    "aggregates": self.aggregates(dataset, method),
                    "trials": [tr.to_entry() for tr in group],
                }
            )
        return {"config": self.config, "results": results}


def strip_timing(report_dict):
    """Copy of an emitted report dict with every timing field removed."""
    out = json.loads(json.dumps(report_dict))
    for result in out.get("results", []):
        result.get("aggregates", {}).pop("train_time_s", None)
        for trial in result.get("trials", []):
            trial.pop("train_time_s", None)
    return out


def _fit_one(spec, Xtr, Ttr, kind, stream, eielm_p):
    if spec.name == "proposed":
        return fit_network(Xtr, Ttr, kind, max_nodes=spec.nodes)
    if spec.name == "elm":
        return elm_fit(Xtr, Ttr, spec.nodes, kind, stream)
    if spec.name == "ielm":
        return ielm_fit(Xtr, Ttr, spec.nodes, kind, stream)
    if spec.name == "eielm":
        return eielm_fit(Xtr, Ttr, spec.nodes, eielm_p, kind, stream)
    return belm_fit(Xtr, Ttr, spec.nodes, kind, stream)


def _run_one(entry, ds, spec, trial, base_seed, kind, eielm_p, split_first):
    name = entry["name"]
    result = TrialResult(dataset=name, method=spec.label, trial=trial, nodes=spec.nodes)
    try:
        n_train = entry["n_train"]
        n_test = entry.get("n_test")
        split = make_split(ds, n_train, stable_seed(base_seed, name, trial), n_test)
        if split_first:
            Xtr, Ttr, Xte, Tte = normalize_split(ds, split)
        else:
            Xtr, Ttr = ds.X[split.train_rows], ds.T[split.train_rows]
            Xte, Tte = ds.X[split.test_rows], ds.T[split.test_rows]
        stream = RngStream(stable_seed(base_seed, spec.label, trial))
        start = time.perf_counter()
        model = _fit_one(spec, Xtr, Ttr, kind, stream, eielm_p)
        result.train_time_s = time.perf_counter() - start
        if entry["task"] == "classification":
            result.test_accuracy = accuracy(model.classify(Xte), decision_labels(Tte))
        else:
            result.test_rmse = rmse(model.predict(Xte), Tte)
            result.train_rmse = rmse(model.predict(Xtr), Ttr)
    except Exception as exc:  # a failing trial must not abort the sweep
        result.error = "%s: %s" % (type(exc).__name__, exc)
    return result


def run_trials(
    manifest,
    methods,
    trials,
    base_seed,
    activation=ActivationKind.SIGMOID,
    eielm_p=50,
    workers=1,
    split_first=False,
):
    """Run the full benchmark grid and return a BenchReport.

    manifest is a manifest path or an already-validated entry list; methods
    are "name@nodes" strings or MethodSpec values. Every dataset is loaded
    once (and, by default, normalized whole before splitting, matching the
    reproduced protocol; split_first normalizes per trial from the training
    rows instead). Workers parallelize over (dataset, method, trial) jobs
    without changing any result.
    """
    if trials < 1:
        raise InvalidInputError("trials must be >= 1, got %r" % trials)
    if workers < 1:
        raise InvalidInputError("workers must be >= 1, got %r" % workers)
    entries = load_manifest(manifest) if isinstance(manifest, (str, bytes)) or hasattr(manifest, "__fspath__") else list(manifest)
    specs = [parse_method(m) for m in methods]
    if not specs:
        raise InvalidInputError("no methods given")
    kind = activation if isinstance(activation, ActivationKind) else ActivationKind.parse(activation)

    datasets = []
    for entry in entries:
        ds = load_dataset(entry)
        if not split_first:
            ds = normalize_dataset(ds)
        datasets.append(ds)

    jobs = [
        (entry, ds, spec, trial)
        for entry, ds in zip(entries, datasets)
        for spec in specs
        for trial in range(int(trials))
    ]

    def run(job):
        entry, ds, spec, trial = job
        return _run_one(entry, ds, spec, trial, base_seed, kind, eielm_p, split_first)

    if workers == 1:
        results = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            results = list(pool.map(run, jobs))

    config = {
        "base_seed": int(base_seed),
        "trials": int(trials),
        "activation": kind.value,
        "eielm_p": int(eielm_p),
        "split_first": bool(split_first),
        "methods": [spec.label for spec in specs],
        "datasets": [entry["name"] for entry in entries],
    }
    return BenchReport(config=config, trials=results)


def _emit_json(report):
    return (json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n").encode("utf-8")


def _emit_csv(report):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["dataset", "method", "trials"]
    for metric in _METRICS:
        for stat in ("mean", "std", "min", "max"):
            header.append("%s_%s" % (metric, stat))
    writer.writerow(header)
    for (dataset, method), group in report.groups().items():
        aggs = report.aggregates(dataset, method)
        row = [dataset, method, len(group)]
        for metric in _METRICS:
            agg = aggs.get(metric)
            for stat in ("mean", "std", "min", "max"):
                row.append(repr(agg[stat]) if agg else "")
        writer.writerow(row)
    return buf.getvalue().encode("utf-8")


def _emit_table(report):
    rows = []
    for (dataset, method), group in report.groups().items():
        aggs = report.aggregates(dataset, method)
        metric = "test_accuracy" if "test_accuracy" in aggs else "test_rmse"
        agg = aggs.get(metric)
        time_agg = aggs.get("train_time_s")
        errors = sum(1 for tr in group if tr.error is not None)
        rows.append(
            (
                dataset,
                method,
                metric,
                "-" if agg is None else "%.4f +- %.4f" % (agg["mean"], agg["std"]),
                "-" if time_agg is None else "%.4f" % time_agg["mean"],
                str(len(group) - errors),
                str(errors),
            )
        )
    header = ("dataset", "method", "metric", "mean +- std", "time_s", "ok", "err")
    widths = [max(len(header[i]), *(len(r[i]) for r in rows)) if rows else len(header[i]) for i in range(len(header))]
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip(),
        "  ".join("-" * widths[i] for i in range(len(header))),
    ]
    for r in rows:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(len(r))).rstrip())
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit_report(report, fmt="json"):
    """Render a BenchReport to bytes as canonical JSON, CSV, or a table."""
    if fmt == "json":
        return _emit_json(report)
    if fmt == "csv":
        return _emit_csv(report)
    if fmt == "table":
        return _emit_table(report)
    raise InvalidInputError("unknown report format %r (json, csv, table)" % fmt)
