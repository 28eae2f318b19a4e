import itertools
import json

import pytest

from isingfk.cli import main
from isingfk.report import validate_report


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_measure_k2(capsys):
    code, out, _ = run(capsys, "measure", "--graph", "K2", "--p", "1/2")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "isingfk.report/1"
    assert rep["partition"]["Z"] == "3/1"
    assert {r["eta"]: r["probability"] for r in rep["fk"]} == {"0": "2/3", "1": "1/3"}


def test_measure_csv(capsys):
    code, out, _ = run(capsys, "measure", "--graph", "K2", "--p", "1/3", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "measure,eta,sigma,weight,probability"


def test_malformed_json_reports_position(tmp_path, capsys):
    f = tmp_path / "g.json"
    f.write_text('{"vertices": 2,\n  "edges": [[0, 1],]}')
    code, _, err = run(capsys, "measure", "--graph", str(f), "--p", "1/2")
    assert code == 2
    assert "line 2" in err and "column" in err


@pytest.mark.parametrize("p", ["5/4", "0", "abc"])
def test_bad_p(capsys, p):
    code, _, err = run(capsys, "measure", "--graph", "K2", "--p", p)
    assert code == 2 and err


def test_capacity_exit(tmp_path, capsys):
    f = tmp_path / "k7.json"
    f.write_text(json.dumps({"vertices": 7, "edges": list(itertools.combinations(range(7), 2))}))
    code, _, err = run(capsys, "measure", "--graph", str(f), "--p", "1/2")
    assert code == 3 and "limit" in err


def test_check_site_star(capsys):
    code, out, _ = run(capsys, "check", "--graph", "P3", "--p", "1/2", "--kernel", "site-star")
    assert code == 0
    rep = json.loads(out)
    validate_report(rep)
    verdicts = {c["name"]: c["verdict"] for c in rep["checks"]}
    assert verdicts["spin_markov"] == "pass" and verdicts["edge_markov"] == "fail"


def test_check_one_change_marginals_fail(capsys):
    code, out, _ = run(capsys, "check", "--graph", "P3", "--p", "1/3", "--kernel", "one-change")
    assert code == 0
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    for name in ("spin_markov", "edge_markov"):
        assert checks[name]["verdict"] == "fail" and checks[name]["witness"]


def test_check_edge_spin_edge_lumping_unenforced(capsys):
    code, out, _ = run(capsys, "check", "--graph", "P3", "--p", "1/2", "--kernel", "edge-spin",
                       "--check", "lumpability:edge")
    assert code == 0
    (check,) = json.loads(out)["checks"]
    assert check["expected"] is None
    assert check["verdict"] == "fail"


def test_check_exit_one_on_failed_expectation(capsys):
    code, out, _ = run(capsys, "check", "--graph", "K2", "--p", "1/2", "--kernel", "glauber:heatbath-printed")
    assert code == 1
    validate_report(json.loads(out))


def test_check_jobs_same_output(capsys):
    argv = ["check", "--graph", "P3", "--p", "1/2", "--kernel", "cluster-flip",
            "--check", "dream", "--check", "theo1", "--check", "compatibility"]
    _, serial, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--jobs", "2")
    assert serial == parallel


def test_check_unknown_name(capsys):
    code, _, err = run(capsys, "check", "--graph", "K2", "--p", "1/2", "--kernel", "fk", "--check", "bogus")
    assert code == 2 and "bogus" in err


def test_simulate_byte_identical(tmp_path, capsys):
    argv = ["simulate", "--graph", "P3", "--p", "1/2", "--kernel", "cluster-flip", "--t-max", "100", "--seed", "7"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *argv, "--out", str(a))[0] == 0
    assert run(capsys, *argv, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    meta = json.loads((tmp_path / "a.meta.json").read_text())
    assert meta["seed"] == 7 and meta["generator"] == "numpy.random.PCG64"
    assert a.read_text().startswith("time,eta,sigma\n")


def test_simulate_multiple_samples(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code, _, _ = run(capsys, "simulate", "--graph", "K2", "--p", "1/2", "--kernel", "one-change",
                     "--samples", "3", "--out", str(out))
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("run_*.csv")) == ["run_0000.csv", "run_0001.csv", "run_0002.csv"]


def test_simulate_zero_samples(tmp_path, capsys):
    code, _, err = run(capsys, "simulate", "--graph", "K2", "--p", "1/2", "--kernel", "fk",
                       "--samples", "0", "--out", str(tmp_path / "x.csv"))
    assert code == 2 and "samples" in err


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--graph", "K2", "--p", "1/2", "--kernel", "one-change",
                       "--sigma", "++", "--site", "0", "--samples", "4000", "--seed", "3")
    assert code == 0
    rep = json.loads(out)
    assert rep["exact"] == "1/2" and rep["within_tolerance"]


def test_usage_error_for_unrepresentable_variant(capsys):
    code, _, err = run(capsys, "check", "--graph", "P3", "--p", "1/2", "--kernel", "glauber:unnamed")
    assert code == 2 and "odd-degree" in err


def test_verify_quick_custom_family(tmp_path, capsys):
    f = tmp_path / "fam.json"
    f.write_text(json.dumps({"K2": {"vertices": 2, "edges": [[0, 1]]},
                             "K14": {"vertices": 5, "edges": [[0, 1], [0, 2], [0, 3], [0, 4]]}}))
    code, out, _ = run(capsys, "verify", "--quick", "--graphs", str(f))
    assert code == 0
    assert "criteria passed" in out.splitlines()[-1]
