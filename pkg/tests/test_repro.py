import numpy as np
import pytest

from classim.quantum import fdc, imm_from_povm, reduced_map
from classim.repro import (
    COS_XY,
    COS_Z,
    NEGATIVE_CELLS,
    REFERENCE_PROB_TABLE,
    REPRO_TARGETS,
    coupling_unitary,
    fdc_table_closed_form,
    prob_table,
    run_repro,
    sic_qubit_fixture,
)

from oracles import bloch_vector


def test_coupling_unitary_closed_form():
    # (XX + YY + 2ZZ)/2 is 1 on |00>, |11> and -1 + X on the {|01>, |10>} block
    v = coupling_unitary()
    expected = np.zeros((4, 4), dtype=complex)
    expected[0, 0] = expected[3, 3] = np.exp(-1j)
    c, s = np.cos(1.0), np.sin(1.0)
    expected[1, 1] = expected[2, 2] = np.exp(1j) * c
    expected[1, 2] = expected[2, 1] = -1j * np.exp(1j) * s
    np.testing.assert_allclose(v, expected, atol=1e-14)


def test_frame_transfer_entries_sum_to_one():
    t = fdc_table_closed_form()
    np.testing.assert_allclose(t.sum(axis=0), 1.0, atol=1e-15)
    assert t.min() > 0


def test_sic_vectors_form_tetrahedron():
    fx = sic_qubit_fixture()
    n = np.array([bloch_vector(p) for p in fx.frame.projectors])
    gram = n @ n.T
    np.testing.assert_allclose(gram, (4 * np.eye(4) - 1) / 3, atol=1e-14)


def test_reduced_map_matches_bloch_contraction_by_hand():
    fx = sic_qubit_fixture()
    lam = reduced_map(fx.v, fx.tau, 2)
    for p in fx.frame.projectors:
        r = bloch_vector(p)
        out = bloch_vector(lam.apply(p))
        np.testing.assert_allclose(out, [COS_XY * r[0], COS_XY * r[1], COS_Z * r[2]], atol=1e-13)


def test_initial_state_is_frame_state_one():
    fx = sic_qubit_fixture()
    np.testing.assert_allclose(fdc(fx.frame, fx.rho_s), [0, 1, 0, 0], atol=1e-13)
    mixed = sic_qubit_fixture("mixed")
    np.testing.assert_allclose(fdc(mixed.frame, mixed.rho_s), 0.25, atol=1e-13)


def test_prob_table_columns_normalized():
    t = prob_table()
    np.testing.assert_allclose(t.sum(axis=0), 1.0, atol=1e-12)
    for cell in NEGATIVE_CELLS:
        assert t[cell] < -0.1


def test_prob_table_close_to_reference():
    t = prob_table()
    assert np.max(np.abs(t - REFERENCE_PROB_TABLE)) < 0.0065
    # 15 of the 16 reference values agree to rounding precision
    assert int((np.abs(t - REFERENCE_PROB_TABLE) <= 0.005).sum()) == 15


def test_mixed_initial_state_gives_other_table():
    t = prob_table(sic_qubit_fixture("mixed"))
    assert np.max(np.abs(t - REFERENCE_PROB_TABLE)) > 0.05


@pytest.mark.parametrize("target", ["m-matrix", "fdc-table", "bloch"])
def test_exact_targets_pass(target):
    (res,) = run_repro(target)
    assert res.passed, res.lines
    assert res.max_deviation < 1e-12


def test_run_all_and_unknown():
    results = run_repro("all")
    assert [r.target for r in results] == list(REPRO_TARGETS)
    d = results[0].to_dict()
    assert d["target"] == "m-matrix" and d["passed"]
    with pytest.raises(KeyError):
        run_repro("table-iii")


def test_imm_of_fixture():
    m = imm_from_povm(sic_qubit_fixture().povm)
    np.testing.assert_allclose(m.m_inv, 3 * np.eye(4) - 0.5, atol=1e-13)
