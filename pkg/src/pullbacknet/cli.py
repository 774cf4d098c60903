"""Command-line front door: fit and predict single models, run sweeps.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or malformed
input, bad values), 3 numeric failure. All randomness flows from --seed;
nothing ever reads wall-clock entropy.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .activation import ActivationKind
from .baselines import ElmModel, IncrementalModel
from .dataio import (
    gen_friedman,
    load_csv,
    load_libsvm,
    load_manifest,
    normalize_dataset,
    write_csv,
)
from .errors import InvalidInputError, NumericError, ParseError
from .evalbench import emit_report, parse_method, run_trials
from .numkernel import RngStream
from .pullback import PullbackNetwork, fit_network

__all__ = ["UsageError", "RunConfig", "parse_args", "main_run", "main"]


class UsageError(Exception):
    """Bad command line; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map codes ourselves
        raise UsageError("%s: %s" % (self.prog, message))


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text) from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1, got %d" % value)
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not an integer: %r" % text) from None
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be >= 0")
    return value


def _nonneg_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("not a number: %r" % text) from None
    if not value >= 0.0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _target_column(text):
    if text == "last":
        return "last"
    if text == "none":
        return None
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            "target column must be 'last', 'none', or a 0-based index"
        ) from None


@dataclass
class RunConfig:
    """Fully validated invocation; no computation happens before this exists."""

    command: str
    data: str | None = None
    data_format: str | None = None
    target_column: object = "last"
    has_header: bool = False
    task: str = "regression"
    activation: str = "sigmoid"
    nodes: int = 1
    stop_rmse: float = 0.0
    model: str | None = None
    out: str | None = None
    denormalize: bool = False
    manifest: str | None = None
    methods: tuple = ()
    trials: int = 50
    seed: int = 42
    report_format: str = "json"
    eielm_p: int = 50
    workers: int = 1
    split_first: bool = False
    generator: str | None = None
    n: int | None = None
    noise: float = 1.0


def _build_parser():
    parser = _Parser(prog="pullbacknet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_data_flags(p, with_task):
        p.add_argument("--data", required=True, help="input data file")
        p.add_argument("--format", dest="data_format", choices=("csv", "libsvm"),
                       help="data format (default: by extension)")
        p.add_argument("--target-column", type=_target_column, default="last",
                       help="'last', 'none', or a 0-based index")
        p.add_argument("--has-header", action="store_true", help="skip the first CSV line")
        if with_task:
            p.add_argument("--task", choices=("regression", "classification"),
                           default="regression")

    fit = sub.add_parser("fit", help="fit one model and write it as JSON")
    add_data_flags(fit, with_task=True)
    fit.add_argument("--activation", choices=("sigmoid", "sine"), default="sigmoid")
    fit.add_argument("--nodes", type=_positive_int, default=1)
    fit.add_argument("--stop-rmse", type=_nonneg_float, default=0.0)
    fit.add_argument("--out", required=True, help="model file to write")

    predict = sub.add_parser("predict", help="apply a saved model to a data file")
    predict.add_argument("--model", required=True, help="model JSON written by fit")
    add_data_flags(predict, with_task=False)
    predict.add_argument("--out", help="predictions CSV (default: stdout)")
    predict.add_argument("--denormalize", action="store_true",
                         help="map outputs back to raw target units")

    bench = sub.add_parser("bench", help="run the benchmark protocol over a manifest")
    bench.add_argument("--manifest", required=True, help="dataset manifest JSON")
    bench.add_argument("--methods", required=True,
                       help="comma-separated name@nodes specs, e.g. proposed@1,elm@200")
    bench.add_argument("--trials", type=_positive_int, default=50)
    bench.add_argument("--seed", type=_seed, default=42)
    bench.add_argument("--activation", choices=("sigmoid", "sine"), default="sigmoid")
    bench.add_argument("--eielm-p", type=_positive_int, default=50,
                       help="candidate pool size for eielm methods")
    bench.add_argument("--workers", type=_positive_int, default=1)
    bench.add_argument("--split-first", action="store_true",
                       help="normalize from training rows only (leakage-free variant)")
    bench.add_argument("--format", dest="report_format",
                       choices=("json", "csv", "table"), default="json")
    bench.add_argument("--out", help="report file (default: stdout)")

    gen = sub.add_parser("gen-data", help="write a synthetic dataset as CSV")
    gen.add_argument("generator", choices=("friedman",))
    gen.add_argument("--n", type=_positive_int, required=True, help="number of rows")
    gen.add_argument("--noise", type=_nonneg_float, default=1.0)
    gen.add_argument("--seed", type=_seed, default=42)
    gen.add_argument("--out", required=True, help="CSV file to write")
    return parser


def parse_args(argv=None):
    """Map argv to a validated RunConfig; bad flags raise UsageError."""
    namespace = _build_parser().parse_args(argv)
    values = vars(namespace)
    methods = values.pop("methods", None)
    config = RunConfig(**values)
    if methods is not None:
        try:
            config.methods = tuple(parse_method(m) for m in methods.split(",") if m.strip())
        except InvalidInputError as exc:
            raise UsageError("bad --methods value: %s" % exc) from exc
        if not config.methods:
            raise UsageError("--methods is empty")
    return config


def _load_cli_dataset(config, task):
    fmt = config.data_format
    if fmt is None:
        fmt = "libsvm" if Path(config.data).suffix in (".libsvm", ".svm") else "csv"
    if fmt == "libsvm":
        if config.target_column is None:
            raise UsageError("libsvm rows always carry a label; --target-column none "
                             "applies to csv only")
        return load_libsvm(config.data, task=task)
    return load_csv(
        config.data,
        target_column=config.target_column,
        has_header=config.has_header,
        task=task,
    )


def _preprocess_block(ds):
    params = ds.norm_params
    block = {"task": params["task"],
             "x_lo": params["x_lo"].tolist(),
             "x_spread": params["x_spread"].tolist()}
    if "t_lo" in params:
        block["t_lo"] = params["t_lo"].tolist()
        block["t_spread"] = params["t_spread"].tolist()
    if params.get("class_labels"):
        block["class_labels"] = params["class_labels"]
    return block


def _cmd_fit(config):
    raw = _load_cli_dataset(config, config.task)
    ds = normalize_dataset(raw)
    kind = ActivationKind.parse(config.activation)
    start = time.perf_counter()
    net = fit_network(ds.X, ds.T, kind, max_nodes=config.nodes, stop_rmse=config.stop_rmse)
    elapsed = time.perf_counter() - start
    record = net.to_record()
    record["preprocess"] = _preprocess_block(ds)
    with open(config.out, "w", encoding="utf-8") as fh:
        json.dump(record, fh, sort_keys=True, indent=1)
        fh.write("\n")
    print(
        "fit %s: %d node(s), train_rmse=%.17g, time=%.4fs, model=%s"
        % (raw.name, len(net.nodes), net.training_rmse_trace[-1], elapsed, config.out)
    )
    return 0


_MODEL_STYLES = {
    "pullback": PullbackNetwork,
    "elm": ElmModel,
    "incremental": IncrementalModel,
}


def _load_model_record(path):
    try:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid model JSON: %s" % exc, line=exc.lineno) from exc
    style = record.get("style") if isinstance(record, dict) else None
    if style not in _MODEL_STYLES:
        raise InvalidInputError("model file %s has no recognized style tag" % path)
    return _MODEL_STYLES[style].from_record(record), record


def _cmd_predict(config):
    model, record = _load_model_record(config.model)
    ds = _load_cli_dataset(config, "regression")
    X = ds.X
    pre = record.get("preprocess")
    if pre is not None:
        lo = np.asarray(pre["x_lo"], dtype=np.float64)
        spread = np.asarray(pre["x_spread"], dtype=np.float64)
        if X.shape[1] != lo.shape[0]:
            raise InvalidInputError(
                "data has %d feature columns, model preprocessing expects %d"
                % (X.shape[1], lo.shape[0])
            )
        live = spread != 0.0
        Xn = np.zeros_like(X)
        Xn[:, live] = 2.0 * (X[:, live] - lo[live]) / spread[live] - 1.0
        X = Xn
    Y = model.predict(X)
    if config.denormalize:
        if pre is None or "t_lo" not in pre:
            raise InvalidInputError(
                "--denormalize needs a model with stored regression target scaling"
            )
        t_lo = np.asarray(pre["t_lo"], dtype=np.float64)
        t_spread = np.asarray(pre["t_spread"], dtype=np.float64)
        Y = t_lo + Y * t_spread
    lines = [",".join("%.17g" % v for v in row) for row in Y]
    text = "\n".join(lines) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bench(config):
    entries = load_manifest(config.manifest)
    for entry in entries:
        print(
            "dataset %s: task=%s n_train=%d%s"
            % (
                entry["name"],
                entry["task"],
                entry["n_train"],
                "" if "n_test" not in entry else " n_test=%d" % entry["n_test"],
            ),
            file=sys.stderr,
        )
    report = run_trials(
        entries,
        config.methods,
        config.trials,
        config.seed,
        activation=config.activation,
        eielm_p=config.eielm_p,
        workers=config.workers,
        split_first=config.split_first,
    )
    payload = emit_report(report, config.report_format)
    if config.out:
        with open(config.out, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return 0


def _cmd_gen_data(config):
    ds = gen_friedman(config.n, config.noise, RngStream(config.seed))
    write_csv(config.out, ds.X, ds.T[:, 0])
    print("wrote %d rows to %s" % (ds.n_samples, config.out))
    return 0


_COMMANDS = {
    "fit": _cmd_fit,
    "predict": _cmd_predict,
    "bench": _cmd_bench,
    "gen-data": _cmd_gen_data,
}


def main_run(config):
    """Execute a validated RunConfig; exceptions map to exit codes in main."""
    return _COMMANDS[config.command](config)


def main(argv=None):
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    try:
        return main_run(config)
    except UsageError as exc:
        print("usage error: %s" % exc, file=sys.stderr)
        return 1
    except (ParseError, OSError, InvalidInputError) as exc:
        print("data error: %s" % exc, file=sys.stderr)
        return 2
    except NumericError as exc:
        print("numeric error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
