import csv
import json
import subprocess
import sys

import pytest

from artcode_mr.cli import main


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:  # argparse usage errors
        return exc.code


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert run(["gen", "--artcodes", "6", "--non-artcodes", "12", "--seed", "3", "--out", str(root / "data")]) == 0
    return root


def test_gen_writes_images_and_manifest(small):
    manifest = json.loads((small / "data" / "manifest.json").read_text())
    assert len(manifest) == 18
    assert len(list((small / "data" / "images").glob("*.pgm"))) == 18


def test_extract_train_chain(small):
    assert run(["extract", "--manifest", str(small / "data"), "--out", str(small / "f.csv")]) == 0
    with open(small / "f.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["id", "label", "f0", "f1", "f2", "f3", "f4", "f5"]
    assert run(["train", "--features", str(small / "f.csv"), "--out", str(small / "m.json"), "--algo", "svm"]) == 0
    assert json.loads((small / "m.json").read_text())["algo"] == "svm"


def test_eval_report_and_verify(small, capsys):
    data = str(small / "data")
    assert run(["eval", "--manifest", data, "--out", str(small / "e.json"), "--records", str(small / "r.csv"),
                "--folds", "3", "--repeats", "1", "--ntrees", "5"]) == 0
    metrics = json.loads((small / "e.json").read_text())
    assert {"original", "augmented", "gains", "rectification"} <= set(metrics)
    assert run(["report", "--records", str(small / "r.csv"), "--manifest", data, "--out", str(small / "s.json"),
                "--scatter", str(small / "s.csv")]) == 0
    assert (small / "s.csv").read_text().splitlines()[0] == "id,rho,class,rectified"
    assert run(["verify", "--manifest", data, "--out", str(small / "v.json"), "--k-groups", "20",
                "--alpha", "0.05", "--mc-samples", "2000", "--folds", "3", "--ntrees", "5"]) == 0
    report = json.loads((small / "v.json").read_text())
    assert len(report["rows"]) == 20 and all(len(r) == 4 for r in report["rows"])
    assert "verdict" in capsys.readouterr().out


def test_verify_with_saved_model_and_coin(small):
    data = str(small / "data")
    assert run(["extract", "--manifest", data, "--out", str(small / "f2.csv")]) == 0
    assert run(["train", "--features", str(small / "f2.csv"), "--out", str(small / "m2.json")]) == 0
    for extra in (["--model", str(small / "m2.json")], ["--labeler", "coin"]):
        assert run(["verify", "--manifest", data, "--out", str(small / "v2.json"), "--k-groups", "3",
                    "--mc-samples", "1000", *extra]) == 0


def test_config_file_and_override(small, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"manifest": str(small / "data"), "out": str(tmp_path / "a.json"),
                               "folds": 3, "repeats": 1, "ntrees": 4}))
    assert run(["eval", "--config", str(cfg)]) == 0
    assert json.loads((tmp_path / "a.json").read_text())["ntrees"] == 4
    assert run(["eval", "--config", str(cfg), "--ntrees", "6", "--out", str(tmp_path / "b.json")]) == 0
    assert json.loads((tmp_path / "b.json").read_text())["ntrees"] == 6


@pytest.mark.parametrize("argv", [
    [],
    ["gen"],
    ["gen", "--out", "x", "--artcodes", "many"],
    ["eval", "--manifest", "m", "--out", "o", "--t1", "0.5", "--t2", "0.2"],
    ["frobnicate"],
])
def test_usage_errors_exit_2(argv, small, capsys):
    if "--manifest" in argv:
        argv = [str(small / "data") if a == "m" else a for a in argv]
    assert run(argv) == 2


def test_unknown_config_key_is_a_usage_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert run(["gen", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_runtime_errors_exit_1(tmp_path):
    assert run(["extract", "--manifest", str(tmp_path / "none.json"), "--out", str(tmp_path / "f.csv")]) == 1
    (tmp_path / "bad.json").write_text("{")
    assert run(["verify", "--manifest", str(tmp_path), "--model", str(tmp_path / "bad.json"),
                "--out", str(tmp_path / "v.json")]) == 1


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "artcode_mr", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for name in ("gen", "extract", "train", "eval", "verify", "report"):
        assert name in out.stdout
