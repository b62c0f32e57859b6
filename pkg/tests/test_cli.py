import json
import subprocess
import sys

import numpy as np
import pytest

from classim import OpenSystemModel, evaluate_model
from classim import serialization as ser
from classim.cli import EXIT_FAIL, EXIT_INCONSISTENT, EXIT_INPUT, EXIT_OK, EXIT_QUASI, main, parse_random_spec
from classim.errors import UsageError
from classim.tensors import ImmMatrix

from oracles import random_model


@pytest.fixture
def classical_stats(tmp_path):
    path = tmp_path / "classical.json"
    ser.save_statistics(path, evaluate_model(random_model(np.random.default_rng(0), 3)))
    return path


@pytest.fixture
def fixture_stats(tmp_path):
    path = tmp_path / "sic.json"
    assert main(["simulate", "--fixture", "sic-qubit", "--out", str(path)]) == EXIT_OK
    return path


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_check_classical(classical_stats, capsys):
    assert main(["check", str(classical_stats)]) == EXIT_OK
    out = capsys.readouterr().out
    for c in ("p_l1", "p_l2_l1", "causality", "kcc_a1", "unmeasured_a2", "reprepare_same"):
        assert c in out
    assert "worst negative entry" in out


def test_check_fixture_is_quasi(fixture_stats, capsys):
    assert main(["check", str(fixture_stats)]) == EXIT_QUASI
    assert main(["check", "--quasi", str(fixture_stats)]) == EXIT_OK
    capsys.readouterr()
    assert main(["--json", "check", str(fixture_stats)]) == EXIT_QUASI
    d = _json_out(capsys)
    assert d["classification"] == "quasi_classical" and d["worst_negative"] < -0.1


def test_check_inconsistent(tmp_path, classical_stats):
    d = json.loads(classical_stats.read_text())
    d["p_a2"][0] += 0.01
    d["p_a2"][1] -= 0.01
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(d))
    assert main(["check", str(bad)]) == EXIT_INCONSISTENT


def test_check_input_errors(tmp_path, classical_stats, capsys):
    d = json.loads(classical_stats.read_text())
    d["p_a2_a1_given_r1"] = d["p_a2_a1_given_r1"][0]
    bad = tmp_path / "shape.json"
    bad.write_text(json.dumps(d))
    assert main(["check", str(bad)]) == EXIT_INPUT
    assert "p_a2_a1_given_r1" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "missing.json")]) == EXIT_INPUT
    assert main(["check"]) == EXIT_INPUT


def test_tol_flag_and_env(monkeypatch, tmp_path, classical_stats):
    d = json.loads(classical_stats.read_text())
    d["p_a2"][0] += 1e-8
    d["p_a2"][1] -= 1e-8
    bad = tmp_path / "near.json"
    bad.write_text(json.dumps(d))
    assert main(["check", str(bad)]) == EXIT_INCONSISTENT
    assert main(["check", str(bad), "--tol", "1e-7"]) == EXIT_OK
    assert main(["--tol", "1e-7", "check", str(bad)]) == EXIT_OK
    monkeypatch.setenv("CLASSIM_TOL", "1e-7")
    assert main(["check", str(bad)]) == EXIT_OK
    assert main(["check", str(bad), "--tol", "1e-9"]) == EXIT_INCONSISTENT
    monkeypatch.setenv("CLASSIM_TOL", "abc")
    assert main(["check", str(bad)]) == EXIT_INPUT


def test_construct_and_sample(tmp_path, classical_stats, capsys):
    out = tmp_path / "model.json"
    assert main(["construct", str(classical_stats), "--out", str(out)]) == EXIT_OK
    model = ser.load_model(out)
    s = ser.load_statistics(classical_stats)
    assert evaluate_model(model).max_abs_diff(s) < 1e-10
    capsys.readouterr()
    argv = ["--json", "sample", str(out), "--shots", "20000", "--seed", "3"]
    assert main(argv) == EXIT_OK
    first = _json_out(capsys)
    assert main(argv) == EXIT_OK
    assert _json_out(capsys) == first
    assert set(first["frequencies"]) == {"p_a1", "p_a2_a1"}
    assert all(v["max_sigma"] < 5 for v in first["deviation"].values())
    assert main(["sample", str(out), "--context", "measure+reprepare", "--r1", "1", "--shots", "1000"]) == EXIT_OK


def test_construct_refuses_fixture(tmp_path, fixture_stats, capsys):
    out = tmp_path / "m.json"
    assert main(["construct", str(fixture_stats), "--out", str(out)]) == EXIT_INCONSISTENT
    assert "p_l2_l1" in capsys.readouterr().out
    assert not out.exists()
    assert main(["construct", str(fixture_stats), "--out", str(out), "--quasi"]) == EXIT_OK
    assert main(["sample", str(out), "--shots", "10"]) == EXIT_INCONSISTENT
    assert "negative" in capsys.readouterr().out


def test_sample_deterministic_model(tmp_path, capsys):
    n = 2
    t1 = np.zeros((1, n, n))
    t1[0, [0, 1], [0, 1]] = 1.0
    t2 = np.zeros((n, 1, n))
    t2[[1, 0], 0, [0, 1]] = 1.0
    path = tmp_path / "det.json"
    ser.save_model(path, OpenSystemModel(np.array([1.0, 0.0]), t1, t2, ImmMatrix.identity(n)))
    assert main(["--json", "sample", str(path), "--context", "bare", "--shots", "500"]) == EXIT_OK
    d = _json_out(capsys)
    assert d["frequencies"]["p_a2"] == [0.0, 1.0]
    assert d["deviation"]["p_a2"]["max_sigma"] == 0.0


def test_simulate_modes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    sc = tmp_path / "sc.json"
    assert main(["simulate", "--random", "d=2", "seed=5", "--out", str(a), "--scenario-out", str(sc)]) == EXIT_OK
    assert main(["simulate", str(sc), "--out", str(b)]) == EXIT_OK
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    assert da == db
    assert da["metadata"]["imm_condition"] >= 1
    assert main(["--seed", "5", "simulate", "--random", "d=2", "--out", str(b)]) == EXIT_OK
    assert json.loads(b.read_text()) == da
    assert main(["simulate", "--out", str(b)]) == EXIT_INPUT
    assert main(["simulate", "--random", "q=1", "--out", str(b)]) == EXIT_INPUT


def test_simulate_rejects_non_unitary(tmp_path, capsys):
    sc = tmp_path / "sc.json"
    assert main(["simulate", "--fixture", "sic-qubit", "--out", str(tmp_path / "x.json"),
                 "--scenario-out", str(sc)]) == EXIT_OK
    d = json.loads(sc.read_text())
    d["v0"] = ser.encode_complex(np.diag([1, 1, 1, 2]))
    sc.write_text(json.dumps(d))
    assert main(["simulate", str(sc), "--out", str(tmp_path / "y.json")]) == EXIT_INPUT
    assert "v0" in capsys.readouterr().err


def test_identity_scenario_keeps_marginal(tmp_path):
    sc = tmp_path / "sc.json"
    out = tmp_path / "s.json"
    main(["simulate", "--fixture", "sic-qubit", "--out", str(out), "--scenario-out", str(sc)])
    d = json.loads(sc.read_text())
    d["v1"] = ser.encode_complex(np.eye(4))
    sc.write_text(json.dumps(d))
    assert main(["simulate", str(sc), "--out", str(out)]) == EXIT_OK
    s = json.loads(out.read_text())
    np.testing.assert_allclose(s["p_a1"], s["p_a2"], atol=1e-14)


@pytest.mark.parametrize("target", ["m-matrix", "fdc-table", "bloch"])
def test_repro_exact_targets(target, capsys):
    assert main(["repro", target]) == EXIT_OK
    assert "PASS" in capsys.readouterr().out


def test_repro_prob_table_reports_mismatch(capsys):
    code = main(["--json", "repro", "prob-table"])
    d = _json_out(capsys)
    assert code == (EXIT_OK if d["passed"] else EXIT_FAIL)
    assert "15/16" in d["results"][0]["details"][0]


def test_repro_unknown_target():
    assert main(["repro", "nope"]) == EXIT_INPUT


def test_parse_random_spec():
    assert parse_random_spec(["d=3"], 7) == {"d": 3, "d_e": 3, "seed": 7}
    assert parse_random_spec(["d_e=1", "seed=2"], None) == {"d": 2, "d_e": 1, "seed": 2}
    with pytest.raises(UsageError):
        parse_random_spec(["d=x"], None)


def test_console_entry_point(fixture_stats):
    r = subprocess.run([sys.executable, "-m", "classim", "check", str(fixture_stats)],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_QUASI
    assert "quasi_classical" in r.stdout
