import json

import pytest

from pairrank.cli import run
from pairrank.synthetic import token_dataset_lines, toy_embedding_lines


@pytest.fixture
def data_file(tmp_path):
    path = tmp_path / "data.jsonl"
    path.write_text("\n".join(token_dataset_lines(60, seed=1, splits=["cz", "de"])) + "\n")
    return str(path)


@pytest.fixture
def emb_file(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("\n".join(toy_embedding_lines(30, dim=4, seed=2)) + "\n")
    return str(path)


def train_args(data_file, out, report=None, **extra):
    args = ["train", "--data", data_file, "--out", out, "--epochs", "3", "--seed", "5",
            "--shuffle-seed", "9"]
    if report:
        args += ["--report", report]
    for k, v in extra.items():
        args += [f"--{k}", str(v)]
    return args


def test_schema_flag(capsys, data_file):
    assert run(["extract", "--data", data_file, "--schema"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 16
    assert out[0] == "precision_1"


def test_extract_writes_features(tmp_path, data_file, emb_file):
    out = tmp_path / "feats.jsonl"
    assert run(["extract", "--data", data_file, "--embeddings", emb_file, "--out", str(out)]) == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(lines) == 60
    assert len(lines[0]["phi_t1r"]) == 16
    assert len(lines[0]["psi_r"]) == 4


def test_train_and_evaluate(tmp_path, capsys, data_file, emb_file):
    model = str(tmp_path / "m.json")
    report = str(tmp_path / "r.jsonl")
    assert run(train_args(data_file, model, report, embeddings=emb_file)) == 0
    lines = (tmp_path / "r.jsonl").read_text().splitlines()
    assert len(lines) == 3
    eval_report = str(tmp_path / "eval.json")
    assert run(["evaluate", "--data", data_file, "--embeddings", emb_file,
                "--model", model, "--report", eval_report]) == 0
    out = capsys.readouterr().out
    assert "cz" in out and "de" in out and "AVG" in out
    doc = json.loads(open(eval_report).read())
    assert set(doc["per_split"]) == {"cz", "de"}
    assert -1.0 <= doc["tau"] <= 1.0


def test_cli_determinism(tmp_path, data_file, emb_file):
    outs = []
    for run_dir in ("a", "b"):
        d = tmp_path / run_dir
        d.mkdir()
        model, report = str(d / "m.json"), str(d / "r.jsonl")
        assert run(train_args(data_file, model, report, embeddings=emb_file)) == 0
        outs.append((open(model, "rb").read(), open(report, "rb").read()))
    assert outs[0] == outs[1]


def test_config_file_with_flag_override(tmp_path, data_file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epochs": 2, "lr": 0.5, "arch": "single-layer"}))
    model = str(tmp_path / "m.json")
    report = str(tmp_path / "r.jsonl")
    # --epochs on the command line must beat the config file's value.
    assert run(["train", "--data", data_file, "--out", model, "--report", report,
                "--config", str(cfg), "--epochs", "4"]) == 0
    assert len((tmp_path / "r.jsonl").read_text().splitlines()) == 4
    doc = json.loads(open(model).read())
    assert doc["config"]["architecture"] == "single-layer"


def test_predict(tmp_path, data_file):
    model = str(tmp_path / "m.json")
    assert run(train_args(data_file, model)) == 0
    out = tmp_path / "pred.jsonl"
    assert run(["predict", "--data", data_file, "--model", model, "--out", str(out)]) == 0
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert len(lines) == 60
    for l in lines:
        assert l["decision"] in ("t1-better", "t2-better", "tie")
        assert l["delta"] == pytest.approx(l["sigma"] - l["sigma_rev"])


def test_evaluate_matches_library(tmp_path, data_file):
    from pairrank import data_ingest, evaluation, load_model

    model_path = str(tmp_path / "m.json")
    assert run(train_args(data_file, model_path)) == 0
    report_path = str(tmp_path / "eval.json")
    assert run(["evaluate", "--data", data_file, "--model", model_path,
                "--report", report_path]) == 0
    with open(model_path) as f:
        model = load_model(f)
    with open(data_file) as f:
        ds = data_ingest.load_dataset(f)
    lib = evaluation.evaluate(model, data_ingest.vectorize(ds), splits=data_ingest.splits_of(ds))
    doc = json.loads(open(report_path).read())
    assert doc["tau"] == lib.tau


def test_gradcheck_cli(capsys):
    for cost in ("logistic", "kendall", "logistic-then-kendall"):
        assert run(["gradcheck", "--seed", "3", "--cost", cost]) == 0
    assert "max relative error" in capsys.readouterr().out


def test_missing_file_error(capsys, tmp_path):
    assert run(["evaluate", "--data", str(tmp_path / "nope.jsonl"), "--model", "x"]) == 1
    err = capsys.readouterr().err
    assert err.startswith("error: ")
    assert "\n" not in err.strip()
