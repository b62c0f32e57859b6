import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classim import construct_model, evaluate_model
from classim import serialization as ser
from classim.errors import MalformedInputError
from classim.quantum import QuantumScenario, born_statistics, random_density, random_povm, random_unitary
from classim.repro import sic_qubit_fixture

from oracles import random_model

seeds = st.integers(0, 2**32 - 1)


def _through_json(d):
    return json.loads(ser.dumps(d))


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(1, 3))
def test_statistics_round_trip_bit_exact(seed, n, n_env):
    s = evaluate_model(random_model(np.random.default_rng(seed), n, n_env))
    d = ser.statistics_to_dict(s)
    back = ser.statistics_from_dict(_through_json(d))
    assert back.max_abs_diff(s) == 0.0
    assert np.array_equal(back.imm.m, s.imm.m)
    assert ser.statistics_to_dict(back) == d


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(1, 3))
def test_model_round_trip_bit_exact(seed, n, n_env):
    m = random_model(np.random.default_rng(seed), n, n_env)
    d = ser.model_to_dict(m)
    back = ser.model_from_dict(_through_json(d))
    for name in ("p0", "t1", "t2"):
        assert np.array_equal(getattr(back, name), getattr(m, name))
    assert ser.model_to_dict(back) == d


def test_quasi_model_round_trip():
    m = construct_model(born_statistics(sic_qubit_fixture().scenario()), quasi=True)
    back = ser.model_from_dict(_through_json(ser.model_to_dict(m)))
    assert back.quasi and np.array_equal(back.t2, m.t2)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_scenario_round_trip_bit_exact(seed):
    rng = np.random.default_rng(seed)
    sc = QuantumScenario(2, 2, random_density(4, rng), random_unitary(4, rng), random_unitary(4, rng),
                         random_povm(2, rng))
    d = ser.scenario_to_dict(sc)
    back = ser.scenario_from_dict(_through_json(d))
    for name in ("rho0", "v0", "v1"):
        assert np.array_equal(getattr(back, name), getattr(sc, name))
    assert np.array_equal(back.povm.frame.vectors, sc.povm.frame.vectors)
    assert ser.scenario_to_dict(back) == d


def test_scenario_product_form():
    fx = sic_qubit_fixture()
    d = ser.scenario_to_dict(fx.scenario())
    del d["rho0"]
    d["rho_s"] = ser.encode_complex(fx.rho_s)
    d["tau"] = ser.encode_complex(fx.tau)
    del d["weights"]
    sc = ser.scenario_from_dict(d)
    np.testing.assert_allclose(sc.rho0, np.kron(fx.rho_s, fx.tau), atol=0)
    np.testing.assert_allclose(sc.povm.weights, 0.5, atol=1e-14)


def test_complex_encoding():
    z = np.array([[1 + 2j, -0.5], [0, 1j]])
    enc = ser.encode_complex(z)
    assert enc[0][0] == [1.0, 2.0]
    assert np.array_equal(ser.decode_complex(enc, "z"), z)
    with pytest.raises(MalformedInputError, match="pairs"):
        ser.decode_complex([[1, 2, 3]], "z")


def test_missing_field_named():
    d = ser.statistics_to_dict(evaluate_model(random_model(np.random.default_rng(0), 2)))
    del d["p_a2_given_r1"]
    with pytest.raises(MalformedInputError, match="p_a2_given_r1"):
        ser.statistics_from_dict(d)


def test_shape_mismatch_named():
    d = ser.statistics_to_dict(evaluate_model(random_model(np.random.default_rng(0), 3)))
    d["p_a2_a1"] = d["p_a2_a1"][:2]
    with pytest.raises(MalformedInputError, match="p_a2_a1"):
        ser.statistics_from_dict(d)


def test_ragged_and_non_numeric_rejected():
    d = ser.statistics_to_dict(evaluate_model(random_model(np.random.default_rng(0), 2)))
    d["p_a1"] = ["x", 0.5]
    with pytest.raises(MalformedInputError, match="p_a1"):
        ser.statistics_from_dict(d)
    d["p_a1"] = None
    with pytest.raises(MalformedInputError):
        ser.statistics_from_dict(d)


def test_alphabet_size_mismatch():
    d = ser.statistics_to_dict(evaluate_model(random_model(np.random.default_rng(0), 2)))
    d["alphabet_size"] = 3
    with pytest.raises(MalformedInputError, match="alphabet_size"):
        ser.statistics_from_dict(d)


def test_non_unitary_scenario_rejected():
    d = ser.scenario_to_dict(sic_qubit_fixture().scenario())
    d["v1"] = ser.encode_complex(1.1 * np.eye(4))
    with pytest.raises(MalformedInputError, match="v1"):
        ser.scenario_from_dict(d)


def test_non_stochastic_model_rejected():
    d = ser.model_to_dict(random_model(np.random.default_rng(0), 2))
    d["t1"][0][0][0] += 0.1
    with pytest.raises(MalformedInputError, match="t1"):
        ser.model_from_dict(d)


def test_files_on_disk(tmp_path):
    s = evaluate_model(random_model(np.random.default_rng(0), 3))
    ser.save_statistics(tmp_path / "s.json", s, metadata={"note": "x"})
    assert json.loads((tmp_path / "s.json").read_text())["metadata"] == {"note": "x"}
    assert ser.load_statistics(tmp_path / "s.json").max_abs_diff(s) == 0.0
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(MalformedInputError, match="invalid JSON"):
        ser.load_statistics(tmp_path / "bad.json")
