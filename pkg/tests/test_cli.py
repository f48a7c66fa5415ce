import json

import pytest

from sagin_dro.cli import main
from sagin_dro.dro import OffloadPlan
from sagin_dro.experiment import read_results_csv
from sagin_dro.scenario import Scenario, default_scenario
from sagin_dro.traces import bundled_scenario_path, ingest_trace


def test_scenario_round_trip(tmp_path):
    sc = default_scenario()
    f = tmp_path / "s.json"
    sc.save(f)
    assert Scenario.load(f) == sc
    assert Scenario.load(bundled_scenario_path()) == sc


def test_validate_ok(capsys):
    assert main(["validate"]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_validate_reports_issues(tmp_path, capsys):
    d = default_scenario().to_dict()
    d["workload"]["return_ratio"] = 1.5
    d["e_max_j"] = -1.0
    f = tmp_path / "bad.json"
    f.write_text(json.dumps(d))
    assert main(["validate", "--scenario", str(f), "--format", "json"]) == 1
    report = json.loads(capsys.readouterr().out)
    assert not report["ok"] and len(report["issues"]) == 2


def test_validate_unreadable(tmp_path, capsys):
    f = tmp_path / "x.json"
    f.write_text("{not json")
    assert main(["validate", "--scenario", str(f)]) == 1
    assert "cannot load" in capsys.readouterr().err


def test_plan_writes_json(tmp_path):
    out = tmp_path / "plan.json"
    rc = main(["plan", "--metric", "l1", "--beta", "0.9", "--history", "100", "--seed", "2",
               "--out", str(out)])
    assert rc == 0
    plan = OffloadPlan.from_dict(json.loads(out.read_text()))
    assert plan.x_bs.shape[1] == 2
    assert (plan.x_bs.sum(axis=0) + plan.x_sat.sum(axis=0) == 1).all()


def test_plan_history_too_long(capsys):
    assert main(["plan", "--history", "99999"]) == 2
    assert "fewer than" in capsys.readouterr().err


def test_gen_trace(tmp_path):
    out = tmp_path / "t.csv"
    assert main(["gen-trace", "--seed", "4", "--minutes", "30", "--level", "1e9",
                 "--burstiness", "0", "--out", str(out)]) == 0
    assert ingest_trace(out, 1.0) == [1e9] * 30


def test_sweep_csv_and_json(tmp_path):
    trace = tmp_path / "t.csv"
    main(["gen-trace", "--seed", "1", "--minutes", "60", "--level", "1e9", "--out", str(trace)])
    spec = {"axis": "confidence", "values": [0.6, 0.9], "metrics": ["linf"], "seeds": [0],
            "policies": ["dro", "deterministic"], "history_size": 30, "K": 3, "max_windows": 3}
    sf = tmp_path / "spec.json"
    sf.write_text(json.dumps(spec))
    csv_out = tmp_path / "r.csv"
    assert main(["sweep", "--spec", str(sf), "--trace", str(trace), "--out", str(csv_out)]) == 0
    rows = read_results_csv(csv_out)
    assert len(rows) == 4 and {r["axis"] for r in rows} == {"confidence"}
    json_out = tmp_path / "r.json"
    assert main(["sweep", "--spec", str(sf), "--trace", str(trace), "--out", str(json_out),
                 "--format", "json"]) == 0
    assert len(json.loads(json_out.read_text())["rows"]) == 4


def test_sweep_needs_axis(capsys):
    assert main(["sweep"]) == 2


def test_bad_metric_rejected():
    with pytest.raises(SystemExit):
        main(["plan", "--metric", "l2"])
