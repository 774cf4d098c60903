"""Dataset ingestion, synthetic generation, protocol normalization, splits.

The benchmark protocol normalizes over the whole dataset before splitting
(features to [-1, 1], regression targets to [0, 1], classification targets
one-hot), matching the reproduced experimental setup; normalize_split offers
the leakage-free alternative where parameters come from the training rows
only.
"""

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, ParseError
from .numkernel import RngStream, as_matrix

__all__ = [
    "Dataset",
    "Split",
    "load_csv",
    "load_libsvm",
    "write_csv",
    "gen_friedman",
    "friedman_targets",
    "normalize_dataset",
    "normalize_split",
    "make_split",
    "load_manifest",
    "load_dataset",
]

TASKS = ("regression", "classification")


@dataclass
class Dataset:
    """Feature matrix plus targets, with bookkeeping for the protocol.

    Raw datasets keep classification targets as label indices (N x 1);
    normalize_dataset expands them one-hot. norm_params records the affine
    maps applied, so models can replay them on unseen raw data.
    """

    name: str
    X: np.ndarray
    T: np.ndarray
    task: str
    class_labels: list | None = None
    normalized: bool = False
    norm_params: dict | None = None

    def __post_init__(self):
        if self.task not in TASKS:
            raise InvalidInputError("task must be one of %s, got %r" % (TASKS, self.task))

    @property
    def n_samples(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class Split:
    """Row indices of one train/test partition and the seed that made it."""

    train_rows: np.ndarray
    test_rows: np.ndarray
    seed: int


def _dedupe_labels(labels):
    # first-seen order, then numeric sort when every label parses as a float
    uniq = list(dict.fromkeys(labels))
    try:
        uniq.sort(key=lambda s: (float(s), s))
    except ValueError:
        uniq.sort()
    return uniq


def _finish_targets(raw_targets, task):
    if task == "classification":
        labels = _dedupe_labels(raw_targets)
        index = {lab: i for i, lab in enumerate(labels)}
        T = np.array([[float(index[lab])] for lab in raw_targets])
        return T, labels
    return np.asarray(raw_targets, dtype=np.float64)[:, None], None


def load_csv(path, target_column="last", has_header=False, task="regression", name=None):
    """Load a dense comma-separated file into a raw Dataset.

    target_column selects which column holds the target: "last", a 0-based
    integer, or None to treat every column as a feature (prediction inputs).
    Classification targets may be arbitrary label strings; features must be
    numeric. Malformed content raises ParseError naming the 1-based line.
    """
    path = Path(path)
    feature_rows = []
    raw_targets = []
    width = None
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        skip_header = bool(has_header)
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if skip_header:
                skip_header = False
                continue
            if width is None:
                width = len(row)
                if target_column == "last":
                    t_idx = width - 1
                elif target_column is None:
                    t_idx = None
                else:
                    t_idx = int(target_column)
                    if not 0 <= t_idx < width:
                        raise ParseError(
                            "target column %d out of range for %d columns" % (t_idx, width),
                            line=lineno,
                        )
                if t_idx is not None and width < 2:
                    raise ParseError("need at least one feature column", line=lineno)
            elif len(row) != width:
                raise ParseError(
                    "ragged row: %d fields, expected %d" % (len(row), width), line=lineno
                )
            feats = []
            for col, cell in enumerate(row):
                if t_idx is not None and col == t_idx:
                    continue
                try:
                    feats.append(float(cell))
                except ValueError:
                    raise ParseError(
                        "non-numeric feature value %r in column %d" % (cell, col), line=lineno
                    ) from None
            feature_rows.append(feats)
            if t_idx is not None:
                cell = row[t_idx].strip()
                if task == "classification":
                    raw_targets.append(cell)
                else:
                    try:
                        raw_targets.append(float(cell))
                    except ValueError:
                        raise ParseError(
                            "non-numeric regression target %r" % cell, line=lineno
                        ) from None
    if not feature_rows:
        raise ParseError("no data rows in %s" % path)
    X = np.asarray(feature_rows, dtype=np.float64)
    if t_idx is None:
        T = np.zeros((X.shape[0], 0))
        labels = None
    else:
        T, labels = _finish_targets(raw_targets, task)
    return Dataset(name=name or path.stem, X=X, T=T, task=task, class_labels=labels)


def load_libsvm(path, task="classification", name=None):
    """Load a sparse "label idx:val ..." file into a dense raw Dataset.

    Indices are 1-based and must ascend within a line; absent indices are
    zero; the feature count is the largest index seen anywhere.
    """
    path = Path(path)
    rows = []
    raw_targets = []
    n_cols = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            raw_targets.append(parts[0])
            feats = []
            prev = 0
            for tok in parts[1:]:
                idx_text, sep, val_text = tok.partition(":")
                if not sep:
                    raise ParseError("malformed feature pair %r" % tok, line=lineno)
                try:
                    idx = int(idx_text)
                except ValueError:
                    raise ParseError("non-integer feature index %r" % idx_text, line=lineno) from None
                if idx < 1:
                    raise ParseError("feature indices are 1-based, got %d" % idx, line=lineno)
                if idx <= prev:
                    raise ParseError(
                        "non-ascending feature index %d after %d" % (idx, prev), line=lineno
                    )
                try:
                    val = float(val_text)
                except ValueError:
                    raise ParseError("non-numeric feature value %r" % val_text, line=lineno) from None
                feats.append((idx, val))
                prev = idx
            rows.append(feats)
            n_cols = max(n_cols, prev)
    if not rows:
        raise ParseError("no data rows in %s" % path)
    X = np.zeros((len(rows), n_cols))
    for i, feats in enumerate(rows):
        for idx, val in feats:
            X[i, idx - 1] = val
    if task == "regression":
        try:
            targets = [float(text) for text in raw_targets]
        except ValueError as exc:
            raise ParseError("non-numeric regression label: %s" % exc) from None
        T, labels = np.asarray(targets)[:, None], None
    else:
        T, labels = _finish_targets(raw_targets, task)
    return Dataset(name=name or path.stem, X=X, T=T, task=task, class_labels=labels)


def write_csv(path, X, target=None):
    """Write features (and an optional final target column) as CSV.

    Floats are written with repr, which round-trips float64 exactly;
    target may be a float vector or a list of label strings.
    """
    X = as_matrix(X, "X")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for i in range(X.shape[0]):
            cells = [repr(float(v)) for v in X[i]]
            if target is not None:
                t = target[i]
                cells.append(t if isinstance(t, str) else repr(float(t)))
            fh.write(",".join(cells))
            fh.write("\n")


def friedman_targets(X):
    """Noise-free synthetic regression surface on [0, 1]^10.

    y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5; the remaining
    five features are pure distractors.
    """
    X = as_matrix(X, "X")
    if X.shape[1] < 5:
        raise InvalidInputError("needs at least 5 feature columns")
    return (
        10.0 * np.sin(np.pi * X[:, 0] * X[:, 1])
        + 20.0 * (X[:, 2] - 0.5) ** 2
        + 10.0 * X[:, 3]
        + 5.0 * X[:, 4]
    )


def gen_friedman(n_samples, noise_sd, stream, name="friedman"):
    """Draw a raw Friedman regression dataset from the given stream."""
    if n_samples < 1:
        raise InvalidInputError("n_samples must be >= 1, got %r" % n_samples)
    if noise_sd < 0:
        raise InvalidInputError("noise_sd must be >= 0, got %r" % noise_sd)
    gen = stream.generator()
    X = gen.uniform(0.0, 1.0, (int(n_samples), 10))
    y = friedman_targets(X)
    if noise_sd > 0:
        y = y + gen.normal(0.0, noise_sd, int(n_samples))
    return Dataset(name=name, X=X, T=y[:, None], task="regression")


def _feature_params(X):
    lo = X.min(axis=0)
    spread = X.max(axis=0) - lo
    return lo, spread


def _apply_feature_norm(X, lo, spread):
    out = np.zeros_like(X)
    live = spread != 0.0
    out[:, live] = 2.0 * (X[:, live] - lo[live]) / spread[live] - 1.0
    return out


def _apply_target_norm(T, lo, spread):
    out = np.zeros_like(T)
    live = spread != 0.0
    out[:, live] = (T[:, live] - lo[live]) / spread[live]
    return out


def _one_hot(label_indices, m):
    T = np.zeros((label_indices.shape[0], m))
    T[np.arange(label_indices.shape[0]), label_indices.astype(np.int64)] = 1.0
    return T


def normalize_dataset(ds):
    """Whole-dataset protocol normalization; returns a new Dataset.

    Features go to [-1, 1] per column by min-max (constant columns to 0);
    regression targets to [0, 1]; classification label indices expand to
    {0, 1} one-hot. Already-normalized datasets pass through rescaling as a
    near-identity, and their one-hot targets are left untouched.
    """
    x_lo, x_spread = _feature_params(ds.X)
    X = _apply_feature_norm(ds.X, x_lo, x_spread)
    params = {"x_lo": x_lo, "x_spread": x_spread, "task": ds.task}
    if ds.task == "classification":
        if ds.normalized:
            T = ds.T.copy()
        else:
            if ds.class_labels is None:
                raise InvalidInputError("classification dataset has no label table")
            T = _one_hot(ds.T[:, 0], len(ds.class_labels))
        params["class_labels"] = list(ds.class_labels or [])
    else:
        t_lo, t_spread = _feature_params(ds.T) if ds.T.size else (np.zeros(0), np.zeros(0))
        T = _apply_target_norm(ds.T, t_lo, t_spread)
        params["t_lo"] = t_lo
        params["t_spread"] = t_spread
    return replace(ds, X=X, T=T, normalized=True, norm_params=params)


def normalize_split(ds, split):
    """Leakage-free alternative: fit normalization on the training rows only.

    Takes a RAW dataset plus a split and returns (Xtr, Ttr, Xte, Tte) with
    feature/target maps fitted on the training rows and applied to both
    sides. Classification targets one-hot encode with the global label table
    (the table is metadata, not a statistic).
    """
    if ds.normalized:
        raise InvalidInputError("normalize_split expects a raw dataset")
    Xtr_raw, Xte_raw = ds.X[split.train_rows], ds.X[split.test_rows]
    lo, spread = _feature_params(Xtr_raw)
    Xtr = _apply_feature_norm(Xtr_raw, lo, spread)
    Xte = _apply_feature_norm(Xte_raw, lo, spread)
    if ds.task == "classification":
        if ds.class_labels is None:
            raise InvalidInputError("classification dataset has no label table")
        m = len(ds.class_labels)
        Ttr = _one_hot(ds.T[split.train_rows, 0], m)
        Tte = _one_hot(ds.T[split.test_rows, 0], m)
    else:
        t_lo, t_spread = _feature_params(ds.T[split.train_rows])
        Ttr = _apply_target_norm(ds.T[split.train_rows], t_lo, t_spread)
        Tte = _apply_target_norm(ds.T[split.test_rows], t_lo, t_spread)
    return Xtr, Ttr, Xte, Tte


def make_split(ds, n_train, seed, n_test=None):
    """Seeded permutation split: first n_train rows train, then the test rows.

    Membership depends only on (row count, seed, n_train, n_test). The
    default test side is everything after the training prefix.
    """
    N = ds.n_samples
    if not 1 <= n_train < N:
        raise InvalidInputError("n_train must be in [1, %d), got %r" % (N, n_train))
    if n_test is None:
        n_test = N - n_train
    if n_test < 1 or n_train + n_test > N:
        raise InvalidInputError(
            "test size %r impossible with %d rows and %d training rows" % (n_test, N, n_train)
        )
    perm = RngStream(seed).generator().permutation(N)
    return Split(
        train_rows=perm[:n_train],
        test_rows=perm[n_train : n_train + n_test],
        seed=int(seed),
    )


_MANIFEST_KEYS = {
    "name", "task", "path", "format", "generator", "target_column",
    "has_header", "n_train", "n_test", "n_samples", "noise_sd", "gen_seed",
}


def _validate_entry(entry, base_dir, pos):
    where = "manifest entry %d" % pos
    if not isinstance(entry, dict):
        raise ParseError("%s is not an object" % where)
    unknown = set(entry) - _MANIFEST_KEYS
    if unknown:
        raise ParseError("%s has unknown keys %s" % (where, sorted(unknown)))
    out = dict(entry)
    for key in ("name", "task"):
        if key not in out:
            raise ParseError("%s is missing %r" % (where, key))
    if out["task"] not in TASKS:
        raise ParseError("%s task must be one of %s" % (where, TASKS))
    if not isinstance(out.get("n_train"), int) or out["n_train"] < 1:
        raise ParseError("%s needs a positive integer n_train" % where)
    if "n_test" in out and (not isinstance(out["n_test"], int) or out["n_test"] < 1):
        raise ParseError("%s n_test must be a positive integer" % where)
    has_path, has_gen = "path" in out, "generator" in out
    if has_path == has_gen:
        raise ParseError("%s needs exactly one of 'path' or 'generator'" % where)
    if has_gen:
        if out["generator"] != "friedman":
            raise ParseError("%s unknown generator %r" % (where, out["generator"]))
        if "n_samples" not in out and "n_test" not in out:
            raise ParseError("%s needs n_samples or n_test to size the generator" % where)
        out.setdefault("noise_sd", 1.0)
        out.setdefault("gen_seed", 1)
    else:
        path = Path(base_dir, out["path"])
        if "format" not in out:
            out["format"] = "libsvm" if path.suffix in (".libsvm", ".svm") else "csv"
        if out["format"] not in ("csv", "libsvm"):
            raise ParseError("%s format must be csv or libsvm" % where)
        out["path"] = str(path)
        out.setdefault("target_column", "last")
        out.setdefault("has_header", False)
    return out


def load_manifest(path):
    """Parse and validate a JSON dataset manifest.

    The manifest is a JSON list of entries, each naming either a data file
    (path relative to the manifest) or a generator. Returns the validated
    entries with paths resolved and defaults filled in.
    """
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid manifest JSON: %s" % exc, line=exc.lineno) from exc
    if not isinstance(entries, list) or not entries:
        raise ParseError("manifest must be a non-empty JSON list")
    return [_validate_entry(e, path.parent, i) for i, e in enumerate(entries)]


def load_dataset(entry):
    """Load the raw dataset a validated manifest entry describes."""
    if "generator" in entry:
        n = entry.get("n_samples", entry["n_train"] + entry.get("n_test", 0))
        return gen_friedman(
            n, entry["noise_sd"], RngStream(entry["gen_seed"]), name=entry["name"]
        )
    loader_kwargs = {"task": entry["task"], "name": entry["name"]}
    if entry["format"] == "libsvm":
        return load_libsvm(entry["path"], **loader_kwargs)
    return load_csv(
        entry["path"],
        target_column=entry["target_column"],
        has_header=entry["has_header"],
        **loader_kwargs,
    )
