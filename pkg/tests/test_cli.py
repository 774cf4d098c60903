"""End-to-end command-line behavior and exit codes."""

import json
import re

import numpy as np
import pytest

from pullbacknet import NumericError, strip_timing
from pullbacknet.cli import UsageError, main, parse_args


def write_regression_csv(path, n_rows=50, seed=3):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_rows, 3))
    t = X @ [1.0, -0.5, 0.2] + rng.normal(scale=0.1, size=n_rows)
    lines = [",".join(repr(float(v)) for v in np.append(X[i], t[i]))
             for i in range(n_rows)]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return X, t


def test_parse_bench_flags():
    config = parse_args(["bench", "--manifest", "m.json",
                         "--methods", "proposed@1,elm@200",
                         "--trials", "5", "--seed", "7"])
    assert config.command == "bench"
    assert [m.label for m in config.methods] == ["proposed@1", "elm@200"]
    assert config.trials == 5 and config.seed == 7
    assert config.report_format == "json"


def test_parse_fit_defaults():
    config = parse_args(["fit", "--data", "abalone.csv",
                         "--activation", "sine", "--out", "model.json"])
    assert config.command == "fit"
    assert config.activation == "sine"
    assert config.nodes == 1 and config.stop_rmse == 0.0
    assert config.target_column == "last" and config.has_header is False


def test_parse_defaults_without_flags():
    config = parse_args(["bench", "--manifest", "m.json", "--methods", "elm"])
    assert config.trials == 50 and config.seed == 42
    assert config.activation == "sigmoid"
    assert config.eielm_p == 50 and config.workers == 1


def test_usage_errors_exit_1(capsys):
    assert main(["fit", "--data", "x.csv", "--nodes", "0", "--out", "m.json"]) == 1
    assert main(["fit", "--data", "x.csv", "--out", "m.json", "--bogus"]) == 1
    assert main(["fit", "--data", "x.csv"]) == 1  # missing --out
    assert main(["bench", "--manifest", "m.json", "--methods", "svm@1"]) == 1
    assert main([]) == 1
    assert "usage error" in capsys.readouterr().err


def test_parse_rejects_bad_values():
    with pytest.raises(UsageError):
        parse_args(["bench", "--manifest", "m.json", "--methods", "elm",
                    "--trials", "-3"])
    with pytest.raises(UsageError):
        parse_args(["fit", "--data", "x.csv", "--out", "m.json",
                    "--activation", "tanh"])


def test_gen_data_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["gen-data", "friedman", "--n", "100", "--noise", "0",
                 "--seed", "1", "--out", str(a)]) == 0
    assert main(["gen-data", "friedman", "--n", "100", "--noise", "0",
                 "--seed", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "wrote 100 rows" in capsys.readouterr().out
    assert len(a.read_text().strip().split("\n")) == 100


def fit_and_report(tmp_path, capsys, extra=()):
    data = tmp_path / "train.csv"
    write_regression_csv(data)
    model = tmp_path / "model.json"
    code = main(["fit", "--data", str(data), "--out", str(model), *extra])
    assert code == 0
    out = capsys.readouterr().out
    reported = float(re.search(r"train_rmse=([^,]+),", out).group(1))
    return data, model, reported


def test_fit_writes_model_with_preprocess(tmp_path, capsys):
    _, model, reported = fit_and_report(tmp_path, capsys)
    record = json.loads(model.read_text())
    assert record["style"] == "pullback"
    assert record["kind"] == "sigmoid"
    assert len(record["nodes"]) == 1
    assert "x_lo" in record["preprocess"] and "t_lo" in record["preprocess"]
    assert reported == record["training_rmse_trace"][-1]


def test_fit_predict_reproduces_training_rmse(tmp_path, capsys):
    data, model, reported = fit_and_report(tmp_path, capsys)
    preds_path = tmp_path / "preds.csv"
    assert main(["predict", "--model", str(model), "--data", str(data),
                 "--out", str(preds_path)]) == 0
    preds = np.loadtxt(preds_path, delimiter=",").reshape(-1, 1)
    pre = json.loads(model.read_text())["preprocess"]
    t_raw = np.loadtxt(data, delimiter=",")[:, -1]
    t_norm = (t_raw - pre["t_lo"][0]) / pre["t_spread"][0]
    got = float(np.sqrt(((preds.ravel() - t_norm) ** 2).mean()))
    assert abs(got - reported) <= 1e-12


def test_predict_denormalize_rescales(tmp_path, capsys):
    data, model, _ = fit_and_report(tmp_path, capsys)
    norm_path, raw_path = tmp_path / "n.csv", tmp_path / "r.csv"
    main(["predict", "--model", str(model), "--data", str(data),
          "--out", str(norm_path)])
    main(["predict", "--model", str(model), "--data", str(data),
          "--out", str(raw_path), "--denormalize"])
    pre = json.loads(model.read_text())["preprocess"]
    normed = np.loadtxt(norm_path, delimiter=",")
    raw = np.loadtxt(raw_path, delimiter=",")
    want = pre["t_lo"][0] + normed * pre["t_spread"][0]
    assert np.abs(raw - want).max() <= 1e-12


def test_predict_stdout_when_no_out(tmp_path, capsys):
    data, model, _ = fit_and_report(tmp_path, capsys)
    assert main(["predict", "--model", str(model), "--data", str(data)]) == 0
    rows = capsys.readouterr().out.strip().split("\n")
    assert len(rows) == 50


def test_bench_round_trip(tmp_path, capsys):
    data = tmp_path / "toy.csv"
    write_regression_csv(data, n_rows=40)
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps([
        {"name": "toy", "task": "regression", "path": "toy.csv", "n_train": 30},
    ]), encoding="utf-8")
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    args = ["bench", "--manifest", str(manifest), "--methods", "proposed@1,elm@2",
            "--trials", "1", "--seed", "3"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    capsys.readouterr()
    a = strip_timing(json.loads(out1.read_text()))
    b = strip_timing(json.loads(out2.read_text()))
    assert a == b
    assert a["config"]["trials"] == 1
    assert {r["method"] for r in a["results"]} == {"proposed@1", "elm@2"}


def test_bench_table_and_csv_to_stdout(tmp_path, capsys):
    data = tmp_path / "toy.csv"
    write_regression_csv(data, n_rows=30)
    manifest = tmp_path / "m.json"
    manifest.write_text(json.dumps([
        {"name": "toy", "task": "regression", "path": "toy.csv", "n_train": 20},
    ]), encoding="utf-8")
    base = ["bench", "--manifest", str(manifest), "--methods", "ielm@3",
            "--trials", "1", "--seed", "2"]
    assert main(base + ["--format", "table"]) == 0
    table = capsys.readouterr().out
    assert "ielm@3" in table
    assert main(base + ["--format", "csv"]) == 0
    csv_text = capsys.readouterr().out
    assert csv_text.startswith("dataset,method,trials")


def test_missing_data_file_exits_2(tmp_path, capsys):
    assert main(["fit", "--data", str(tmp_path / "nope.csv"),
                 "--out", str(tmp_path / "m.json")]) == 2
    assert "data error" in capsys.readouterr().err


def test_malformed_data_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n", encoding="utf-8")
    assert main(["fit", "--data", str(bad), "--out", str(tmp_path / "m.json")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_corrupt_model_exits_2(tmp_path, capsys):
    data = tmp_path / "d.csv"
    write_regression_csv(data, n_rows=10)
    model = tmp_path / "m.json"
    model.write_text("{not json", encoding="utf-8")
    assert main(["predict", "--model", str(model), "--data", str(data)]) == 2
    model.write_text(json.dumps({"style": "mystery"}), encoding="utf-8")
    assert main(["predict", "--model", str(model), "--data", str(data)]) == 2


def test_numeric_error_exits_3(tmp_path, capsys, monkeypatch):
    data = tmp_path / "d.csv"
    write_regression_csv(data, n_rows=10)

    def explode(*args, **kwargs):
        raise NumericError("synthetic blow-up")

    monkeypatch.setattr("pullbacknet.cli.fit_network", explode)
    assert main(["fit", "--data", str(data), "--out", str(tmp_path / "m.json")]) == 3
    assert "numeric error" in capsys.readouterr().err


def test_libsvm_predict_requires_label_column(tmp_path, capsys):
    path = tmp_path / "d.libsvm"
    path.write_text("1 1:0.5\n", encoding="utf-8")
    model = tmp_path / "m.json"
    data = tmp_path / "train.csv"
    write_regression_csv(data, n_rows=10)
    assert main(["fit", "--data", str(data), "--out", str(model)]) == 0
    capsys.readouterr()
    code = main(["predict", "--model", str(model), "--data", str(path),
                 "--target-column", "none"])
    assert code == 1
    assert "usage error" in capsys.readouterr().err
