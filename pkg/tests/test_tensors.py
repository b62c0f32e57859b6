import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classim.errors import MalformedInputError, NotInformationallyCompleteError, UsageError
from classim.tensors import (
    CondTable,
    ImmMatrix,
    ProbVector,
    check_column_stochastic,
    invert_imm,
    marginalize,
    validate_distribution,
)

from oracles import gauss_jordan_inverse, random_imm, random_stochastic

seeds = st.integers(0, 2**32 - 1)


def test_uniform_is_proper():
    rep = validate_distribution(np.full(4, 0.25))
    assert rep.passed and rep.residual < 1e-15 and rep.min_entry == 0.25


def test_negative_entry_quasi_only():
    v = [0.6, 0.6, -0.2]
    assert not validate_distribution(v, "proper")
    rep = validate_distribution(v, "quasi")
    assert rep.passed and rep.min_entry == pytest.approx(-0.2)


def test_unnormalized_fails_both_modes():
    v = [0.5, 0.6]
    assert not validate_distribution(v, "proper")
    assert not validate_distribution(v, "quasi")


def test_pos_tol_separate_from_tol():
    v = [1 + 1e-11, -1e-11]
    assert validate_distribution(v, tol=1e-9).passed
    assert not validate_distribution(v, tol=1e-9, pos_tol=1e-12).passed


@pytest.mark.parametrize("bad", [[1.0], [np.nan, 1.0], [np.inf, 0.0], [[0.5, 0.5]]])
def test_malformed_vectors(bad):
    with pytest.raises(MalformedInputError):
        validate_distribution(bad)


def test_bad_mode_and_tol():
    with pytest.raises(UsageError):
        validate_distribution([0.5, 0.5], mode="loose")
    with pytest.raises(UsageError):
        validate_distribution([0.5, 0.5], tol=0)


def test_condtable_validation_per_slice():
    t = np.array([[0.5, 0.2], [0.5, 0.7]])
    rep = validate_distribution(CondTable(t, ("a2", "r1"), ("r1",)))
    assert not rep.passed
    assert rep.residual == pytest.approx(0.1)


def test_condtable_rejects_nontrailing_conditioning():
    with pytest.raises(MalformedInputError):
        CondTable(np.ones((2, 2)) / 2, ("r1", "a2"), ("r1",))
    with pytest.raises(MalformedInputError):
        CondTable(np.ones((2, 2)) / 2, ("a", "a"))
    with pytest.raises(MalformedInputError):
        CondTable(np.ones((2, 2)) / 2, ("a",))


def test_arrays_are_read_only():
    v = ProbVector([0.5, 0.5])
    with pytest.raises(ValueError):
        v.entries[0] = 1.0


@given(seeds)
def test_marginalize_joint_gives_vector(seed):
    rng = np.random.default_rng(seed)
    joint = rng.dirichlet(np.ones(9)).reshape(3, 3)
    t = CondTable(joint, ("a2", "a1"))
    m = marginalize(t, "a2")
    assert isinstance(m, ProbVector)
    np.testing.assert_allclose(m.entries, joint.sum(axis=0), atol=1e-15)
    assert validate_distribution(m)


def test_marginalize_keeps_conditioning():
    rng = np.random.default_rng(1)
    t = CondTable(rng.dirichlet(np.ones(4), size=3).T.reshape(2, 2, 3), ("a2", "a1", "r1"), ("r1",))
    m = marginalize(t, "a1")
    assert isinstance(m, CondTable) and m.axes == ("a2", "r1") and m.conditioning == ("r1",)
    assert validate_distribution(m)


def test_marginalize_refuses_conditioning_axis():
    t = CondTable(np.ones((2, 2)) / 2, ("a2", "r1"), ("r1",))
    with pytest.raises(UsageError):
        marginalize(t, "r1")
    with pytest.raises(UsageError):
        marginalize(t, "zz")


@settings(max_examples=60)
@given(seeds, st.integers(2, 6))
def test_inverse_matches_gauss_jordan(seed, n):
    rng = np.random.default_rng(seed)
    m = random_imm(rng, n)
    imm = invert_imm(m)
    np.testing.assert_allclose(imm.m_inv, gauss_jordan_inverse(m), atol=1e-10)
    np.testing.assert_allclose(imm.m_inv.sum(axis=0), 1.0, atol=1e-12)


def test_inverse_is_quasi_stochastic():
    m = (2 * np.eye(4) + np.ones((4, 4))) / 6
    inv = invert_imm(m).m_inv
    np.testing.assert_allclose(inv.sum(axis=0), 1.0, atol=1e-14)
    assert inv.min() < 0
    # closed form 3I - J/2
    np.testing.assert_allclose(inv, 3 * np.eye(4) - np.ones((4, 4)) / 2, atol=1e-13)


def test_identity_imm():
    imm = ImmMatrix.identity(3)
    assert np.array_equal(imm.m_inv, np.eye(3)) and imm.condition == 1.0


def test_singular_imm_rejected():
    with pytest.raises(NotInformationallyCompleteError):
        invert_imm(np.full((3, 3), 1 / 3))


def test_ill_conditioned_imm_rejected():
    eps = 1e-10
    m = np.array([[0.5 + eps, 0.5], [0.5 - eps, 0.5]])
    with pytest.raises(NotInformationallyCompleteError):
        invert_imm(m)


@pytest.mark.parametrize("bad", [np.ones((2, 3)) / 2, np.array([[0.5, 0.5], [0.6, 0.5]]),
                                 np.array([[1.5, 0.0], [-0.5, 1.0]])])
def test_non_stochastic_imm_rejected(bad):
    with pytest.raises(MalformedInputError):
        invert_imm(bad)


def test_check_column_stochastic_quasi():
    q = np.array([[1.5, 0.0], [-0.5, 1.0]])
    check_column_stochastic(q, quasi=True)
    with pytest.raises(MalformedInputError):
        check_column_stochastic(q)
    check_column_stochastic(random_stochastic(np.random.default_rng(0), 3, 5))
