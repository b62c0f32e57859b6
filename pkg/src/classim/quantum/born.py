"""Born-rule two-time statistics for system (x) environment scenarios."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..classicality import TwoTimeStatistics
from ..errors import MalformedInputError
from .frames import ICPOVM, QuantumFrame, imm_from_povm
from .linalg import (
    check_density,
    check_unitary,
    dagger,
    partial_trace_env,
    partial_trace_system,
)


@dataclass(frozen=True, eq=False)
class QuantumScenario:
    """Initial joint state, the two unitaries and the system POVM.

    ``rho0`` is on ``d_s * d_e`` with the system first.  ``v0`` produces the
    state entering the first measurement, ``v1`` acts between the two
    measurement times.
    """

    d_s: int
    d_e: int
    rho0: np.ndarray
    v0: np.ndarray
    v1: np.ndarray
    povm: ICPOVM
    env_frame: QuantumFrame | None = None

    def __post_init__(self):
        dim = self.d_s * self.d_e
        if self.povm.frame.d != self.d_s:
            raise MalformedInputError(f"POVM acts on dimension {self.povm.frame.d}, system has {self.d_s}")
        if self.env_frame is not None and self.env_frame.d != self.d_e:
            raise MalformedInputError("environment frame dimension does not match d_e")
        object.__setattr__(self, "rho0", check_density(self.rho0, dim, "rho0"))
        object.__setattr__(self, "v0", check_unitary(self.v0, dim, "v0"))
        object.__setattr__(self, "v1", check_unitary(self.v1, dim, "v1"))

    @classmethod
    def product(cls, rho_s, tau, v0, v1, povm: ICPOVM, env_frame=None) -> "QuantumScenario":
        rho_s = np.asarray(rho_s, dtype=complex)
        tau = np.asarray(tau, dtype=complex)
        return cls(rho_s.shape[0], tau.shape[0], np.kron(rho_s, tau), v0, v1, povm, env_frame)


def evolve(v: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return v @ rho @ dagger(v)


def measure_update(kraus: np.ndarray, rho: np.ndarray, d_e: int) -> np.ndarray:
    """``(K (x) 1) rho (K (x) 1)^dagger`` (unnormalized post-measurement state)."""
    k = np.kron(kraus, np.eye(d_e))
    return k @ rho @ dagger(k)


def reprepare(projector: np.ndarray, rho: np.ndarray, d_e: int) -> np.ndarray:
    """Discard the system and reset it to ``projector``; keeps the trace of ``rho``."""
    d_s = projector.shape[0]
    return np.kron(projector, partial_trace_system(rho, d_s, d_e))


def outcome_probabilities(povm: ICPOVM, rho: np.ndarray, d_e: int) -> np.ndarray:
    """``Tr{K_a(rho)}`` for every outcome ``a``."""
    rho_s = partial_trace_env(rho, povm.frame.d, d_e)
    return np.einsum("aij,ji->a", povm.effects, rho_s).real


def born_statistics(sc: QuantumScenario) -> TwoTimeStatistics:
    """All five observable families by composing measurement, re-preparation and evolution maps.

    The unnormalized compositions are traced directly, so no intermediate
    division by ``P(a1)`` occurs.
    """
    povm, d_e, n = sc.povm, sc.d_e, sc.povm.n
    kraus, proj = povm.kraus, povm.frame.projectors
    rho1 = evolve(sc.v0, sc.rho0)

    p_a1 = outcome_probabilities(povm, rho1, d_e)
    p_a2 = outcome_probabilities(povm, evolve(sc.v1, rho1), d_e)
    p_a2_a1 = np.empty((n, n))
    p_a2_r1 = np.empty((n, n))
    p_a2_a1_r1 = np.empty((n, n, n))
    measured = [measure_update(kraus[a1], rho1, d_e) for a1 in range(n)]
    for a1 in range(n):
        p_a2_a1[:, a1] = outcome_probabilities(povm, evolve(sc.v1, measured[a1]), d_e)
    for r1 in range(n):
        p_a2_r1[:, r1] = outcome_probabilities(povm, evolve(sc.v1, reprepare(proj[r1], rho1, d_e)), d_e)
        for a1 in range(n):
            state = evolve(sc.v1, reprepare(proj[r1], measured[a1], d_e))
            p_a2_a1_r1[:, a1, r1] = outcome_probabilities(povm, state, d_e)
    return TwoTimeStatistics(p_a1, p_a2, p_a2_a1, p_a2_r1, p_a2_a1_r1, imm_from_povm(povm))
