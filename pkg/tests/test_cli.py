import json
import os

import pytest

from cyclonids.cli import main, parse_synth_spec
from cyclonids.errors import ConfigError


def test_parse_synth_spec():
    cfg = parse_synth_spec("n=500,inf=3,noise=7,classes=2,sep=5,seed=1")
    assert (cfg.n_samples, cfg.n_informative, cfg.n_noise) == (500, 3, 7)
    assert cfg.class_separation == 5.0
    assert cfg.seed == 1


def test_parse_synth_spec_errors():
    with pytest.raises(ConfigError):
        parse_synth_spec("n=500,warp=9")
    with pytest.raises(ConfigError):
        parse_synth_spec("n500")
    with pytest.raises(ConfigError):
        parse_synth_spec("n=500")  # incomplete: missing required fields


def test_gen_then_run_roundtrip(tmp_path, capsys):
    data = str(tmp_path / "synth.csv")
    assert main(["gen", "--synth", "n=200,inf=2,noise=2,classes=2,sep=8,seed=2",
                 "--out", data]) == 0
    assert os.path.exists(data)

    out = str(tmp_path / "results")
    code = main(["run", "--schema", "synthetic", "--data", data, "--selector", "none",
                 "--classifier", "rf", "--seed", "42", "--out", out])
    assert code == 0
    report = json.load(open(os.path.join(out, "report.json")))
    assert report["accuracy"] >= 0.9
    assert report["seed"] == 42


def test_run_inline_synth(capsys):
    code = main(["run", "--schema", "synthetic",
                 "--synth", "n=200,inf=1,noise=1,classes=2,sep=10,seed=4"])
    assert code == 0
    assert "test accuracy" in capsys.readouterr().out


def test_run_missing_file_exits_3(capsys):
    code = main(["run", "--schema", "ugransome", "--data", "/nonexistent.csv"])
    assert code == 3


def test_run_without_data_exits_2(capsys):
    code = main(["run", "--schema", "kdd99"])
    assert code == 2


def test_bad_schema_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["run", "--schema", "marsnet"])
    assert err.value.code == 2


def test_compare_command(tmp_path, capsys):
    config = tmp_path / "experiments.txt"
    config.write_text(
        "# two synthetic runs\n"
        "--schema synthetic --synth n=200,inf=2,noise=1,classes=2,sep=10,seed=5 "
        "--classifier rf --name easy\n"
        "--schema synthetic --synth n=200,inf=2,noise=1,classes=2,sep=0,seed=5 "
        "--classifier rf --name hard\n")
    out = str(tmp_path / "cmp")
    assert main(["compare", "--config", str(config), "--out", out]) == 0
    stdout = capsys.readouterr().out
    assert "easy" in stdout and "hard" in stdout
    table = open(os.path.join(out, "comparison.csv")).read().splitlines()
    assert table[0].startswith("dataset,selector,classifier,accuracy")
    assert table[1].split(",")[0] == "easy"  # sorted by accuracy


def test_kfold_flag(tmp_path, capsys):
    out = str(tmp_path / "kf")
    code = main(["run", "--schema", "synthetic",
                 "--synth", "n=200,inf=2,noise=1,classes=2,sep=10,seed=6",
                 "--folds", "3", "--out", out])
    assert code == 0
    summary = json.load(open(os.path.join(out, "kfold.json")))
    assert summary["folds"] == 3
