import json

import numpy as np
import pytest

from hankeldoa.array_model import read_snapshot_csv
from hankeldoa.cli import main

SCENE = {"wavelength_ratio": 0.5,
         "sources": [{"tau": -0.3, "amp_re": 1.0, "amp_im": 0.0},
                     {"tau": 0.2, "amp_re": 0.5, "amp_im": -1.0}]}


@pytest.fixture
def work(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "scene.json").write_text(json.dumps(SCENE))
    return tmp_path


def test_pipeline_commands(work, capsys):
    assert main(["synth", "--scene", "scene.json", "--n", "31", "--out", "y1.csv"]) == 0
    assert main(["synth", "--scene", "scene.json", "--n", "31", "--out", "y2.csv"]) == 0
    assert main(["sample", "--snapshot", "y1.csv", "--uniform", "14", "--seed", "4",
                 "--out", "p1.csv"]) == 0
    assert main(["sample", "--snapshot", "y2.csv", "--scores-from", "p1.csv", "--n", "31",
                 "--m", "14", "--scores-out", "s.csv", "--plan-out", "plan.csv",
                 "--out", "p2.csv"]) == 0
    plan = (work / "plan.csv").read_text().splitlines()
    assert plan[0] == "index,selected,forced" and len(plan) == 32
    assert sum(int(l.split(",")[1]) for l in plan[1:]) == 14
    assert (work / "s.csv").read_text().startswith("index,mu\n")
    p2 = read_snapshot_csv("p2.csv", 31)
    assert p2.mask.m == 14

    capsys.readouterr()
    assert main(["complete", "--snapshot", "p2.csv", "--n", "31", "--truth", "y2.csv",
                 "--trace", "trace.csv", "--out", "yhat.csv"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["nmse_vs_truth"] <= 1e-6
    assert (work / "trace.csv").read_text().startswith("iter,primal_residual,objective\n")

    assert main(["doa", "--snapshot", "yhat.csv", "--scene", "scene.json",
                 "--report", "rep.json", "--out", "est.csv"]) == 0
    est = np.loadtxt("est.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(est[:, 0], [-0.3, 0.2], atol=1e-6)
    assert json.loads((work / "rep.json").read_text())["all_detected"]


def test_sample_explicit_indices(work):
    main(["synth", "--scene", "scene.json", "--n", "9", "--out", "y.csv"])
    assert main(["sample", "--snapshot", "y.csv", "--indices", "1,3-5,9", "--out", "p.csv"]) == 0
    rows = (work / "p.csv").read_text().splitlines()
    assert [r.split(",")[0] for r in rows[1:]] == ["1", "3", "4", "5", "9"]


def test_exit_codes(work):
    assert main(["synth", "--scene", "missing.json", "--n", "9", "--out", "y.csv"]) == 3
    assert main(["synth", "--scene", "scene.json", "--n", "2", "--out", "y.csv"]) == 2
    assert main(["synth", "--scene", "scene.json", "--n", "9", "--out", "no/dir/y.csv"]) == 3
    assert main(["nonsense"]) == 2
    assert main(["synth", "--scene", "scene.json", "--n", "9", "--out", "y.csv"]) == 0
    assert main(["sample", "--snapshot", "y.csv", "--out", "p.csv"]) == 2
    assert main(["sample", "--snapshot", "y.csv", "--indices", "0,4", "--out", "p.csv"]) == 2
    (work / "bad.json").write_text("{not json")
    assert main(["bench", "--config", "bad.json", "--out", "o"]) == 2
    (work / "bad.json").write_text(json.dumps({"scene": SCENE, "n": 9, "m_values": []}))
    assert main(["bench", "--config", "bad.json", "--out", "o"]) == 2
    dup = {**SCENE, "sources": SCENE["sources"] * 2}
    (work / "dup.json").write_text(json.dumps(dup))
    assert main(["synth", "--scene", "dup.json", "--n", "9", "--out", "y.csv"]) == 2


def test_bench_seed_override(work):
    cfg = {"scene": SCENE, "n": 21, "m_values": [12], "trials": 2, "modes": ["uniform-random"],
           "base_seed": 0}
    (work / "cfg.json").write_text(json.dumps(cfg))
    assert main(["bench", "--config", "cfg.json", "--out", "a", "--seed", "0"]) == 0
    assert main(["bench", "--config", "cfg.json", "--out", "b", "--seed", "77"]) == 0
    meta = json.loads((work / "b" / "run_meta.json").read_text())
    assert meta["config"]["base_seed"] == 77
    assert meta["trial_seeds"] == sorted([77 ^ 0, 77 ^ 1])
