import json

import numpy as np
import pytest

from funcsvm import (
    DatasetDescriptor,
    load_dataset,
    load_model,
)
from funcsvm.cli import main
from funcsvm.solver import decision_values


def write_config(tmp_path, data_path, name="config.json", **extra):
    doc = {
        "dataset": {"path": str(data_path)},
        "grid": {
            "dimensions": [3, 5],
            "kernels": [{"kind": "gaussian", "sigma": [0.5, 2.0]}],
            "C": [1.0, 10.0],
        },
        "split": {"policy": "first_l", "l": 20},
        "seed": 0,
    }
    doc.update(extra)
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def synth_csv(tmp_path):
    path = tmp_path / "data.csv"
    rc = main(["synth", "--out", str(path), "--n", "40",
               "--noise", "0.3", "--seed", "7"])
    assert rc == 0
    return path


class TestSynth:
    def test_output_loads_back(self, synth_csv):
        data = load_dataset(DatasetDescriptor(str(synth_csv)))
        assert len(data) == 40
        assert set(np.unique(data.labels)) <= {-1, 1}

    def test_seeded_repeatability(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert main(["synth", "--out", str(p), "--n", "10", "--seed", "3"]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestSelectPredictPipeline:
    def test_end_to_end_matches_the_api(self, tmp_path, synth_csv, capsys):
        cfg = write_config(tmp_path, synth_csv)
        out = tmp_path / "run"
        assert main(["select", "--config", cfg, "--out", str(out)]) == 0
        assert capsys.readouterr().out.startswith("selected: d=")

        model_path = out / "model.fsvm"
        report = json.loads((out / "selection_report.json").read_text())
        assert report["split"] == {"train": 20, "validation": 20, "warnings": []}
        assert len(report["table"]) == 8  # 2 dims x 2 sigmas x 2 Cs

        pred_out = tmp_path / "pred.csv"
        assert main(["predict", "--model", str(model_path),
                     "--data", str(synth_csv), "--out", str(pred_out)]) == 0
        lines = pred_out.read_text().strip().splitlines()
        assert lines[0] == "label,decision"
        assert len(lines) == 41

        # Independent route: load the model through the API and compare.
        model = load_model(str(model_path))
        data = load_dataset(DatasetDescriptor(str(synth_csv)))
        values = decision_values(model, data.functions)
        for line, v in zip(lines[1:], values):
            label, decision = line.split(",")
            assert float(decision) == v
            assert int(label) == (1 if v >= 0 else -1)

    def test_predict_to_stdout(self, tmp_path, synth_csv, capsys):
        cfg = write_config(tmp_path, synth_csv)
        out = tmp_path / "run"
        assert main(["select", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        assert main(["predict", "--model", str(out / "model.fsvm"),
                     "--data", str(synth_csv)]) == 0
        assert capsys.readouterr().out.startswith("label,decision\n")

    def test_grid_mismatch_exits_2(self, tmp_path, synth_csv, capsys):
        cfg = write_config(tmp_path, synth_csv)
        out = tmp_path / "run"
        assert main(["select", "--config", cfg, "--out", str(out)]) == 0
        bad = tmp_path / "bad.csv"
        bad.write_text("1.0,2.0,3.0\n")
        rc = main(["predict", "--model", str(out / "model.fsvm"),
                   "--data", str(bad)])
        assert rc == 2
        err = capsys.readouterr().err
        assert err.startswith("FSVM-ERROR code=data msg=")


class TestTrain:
    def test_single_candidate_goes_direct(self, tmp_path, synth_csv):
        cfg = write_config(
            tmp_path, synth_csv,
            grid={"dimensions": [5],
                  "kernels": [{"kind": "gaussian", "sigma": 1.0}],
                  "C": [10.0]},
        )
        out = tmp_path / "run"
        assert main(["train", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "train_report.json").read_text())
        assert report["mode"] == "direct"
        assert report["n_support"] > 0
        load_model(str(out / "model.fsvm"))

    def test_multi_candidate_selects(self, tmp_path, synth_csv):
        cfg = write_config(tmp_path, synth_csv)
        out = tmp_path / "run"
        assert main(["train", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "train_report.json").read_text())
        assert report["mode"] == "select"

    def test_empty_grid_exits_1(self, tmp_path, synth_csv, capsys):
        cfg = write_config(tmp_path, synth_csv, grid={})
        rc = main(["train", "--config", cfg, "--out", str(tmp_path / "run")])
        assert rc == 1
        assert capsys.readouterr().err.startswith("FSVM-ERROR code=usage msg=")


class TestEvaluate:
    def test_repeated_splits_and_determinism(self, tmp_path, synth_csv, capsys):
        cfg = write_config(
            tmp_path, synth_csv,
            protocol={"kind": "repeated_splits", "count": 2,
                      "train_size": 24, "inner_l": 12},
        )
        out1, out2 = tmp_path / "e1", tmp_path / "e2"
        assert main(["evaluate", "--config", cfg, "--out", str(out1)]) == 0
        assert capsys.readouterr().out.startswith("mean error:")
        assert main(["evaluate", "--config", cfg, "--out", str(out2)]) == 0
        r1 = (out1 / "evaluation_report.json").read_bytes()
        r2 = (out2 / "evaluation_report.json").read_bytes()
        assert r1 == r2

    def test_unknown_protocol_exits_1(self, tmp_path, synth_csv):
        cfg = write_config(tmp_path, synth_csv, protocol={"kind": "bootstrap"})
        rc = main(["evaluate", "--config", cfg, "--out", str(tmp_path / "e")])
        assert rc == 1


class TestOverridesAndInspect:
    def test_cli_overrides_reshape_the_grid(self, tmp_path, synth_csv):
        cfg = write_config(tmp_path, synth_csv)
        out = tmp_path / "run"
        assert main(["select", "--config", cfg, "--out", str(out),
                     "--c-grid", "5.0", "--sigma-grid", "1.0",
                     "--d-range", "4:6"]) == 0
        report = json.loads((out / "selection_report.json").read_text())
        assert len(report["table"]) == 3  # d in {4,5,6} x 1 sigma x 1 C
        assert {row["dimension"] for row in report["table"]} == {4, 5, 6}
        assert {row["C"] for row in report["table"]} == {5.0}

    def test_inspect_model_and_report(self, tmp_path, synth_csv, capsys):
        cfg = write_config(tmp_path, synth_csv)
        out = tmp_path / "run"
        assert main(["select", "--config", cfg, "--out", str(out)]) == 0
        capsys.readouterr()
        assert main(["inspect", str(out / "model.fsvm")]) == 0
        text = capsys.readouterr().out
        assert "model file version 1" in text
        assert "support vectors:" in text
        assert main(["inspect", str(out / "selection_report.json")]) == 0
        json.loads(capsys.readouterr().out)

    def test_missing_config_exits_1(self, tmp_path, capsys):
        rc = main(["select", "--config", str(tmp_path / "none.json"),
                   "--out", str(tmp_path / "run")])
        assert rc == 1
        assert capsys.readouterr().err.startswith("FSVM-ERROR code=usage")

    def test_bad_usage_exits_1(self, capsys):
        assert main(["select"]) == 1  # missing required flags
        capsys.readouterr()
