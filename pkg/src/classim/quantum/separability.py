"""F_S-separability of joint states, and a sampling probe for unitaries.

A joint state decomposes uniquely as ``rho = sum_psi P_psi (x) Q_psi`` for a
minimal system frame.  It is F_S-separable when every block ``Q_psi`` is
positive semidefinite, i.e. ``Q_psi = f_psi * eps_psi`` with ``f_psi >= 0``
and ``eps_psi`` a proper environment state.

Deciding separability of a unitary would need every separable input; the
probe samples inputs and can only certify violations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import MalformedInputError
from .frames import QuantumFrame, fdc, product_frame
from .linalg import check_unitary, dagger, hermitize, min_eigenvalue, random_density

PSD_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ConditionalEnvOperator:
    """Weights ``f_psi`` and trace-one hermitian environment operators ``eps_psi``.

    ``states[psi]`` is ``None`` when the weight is too small to normalize.
    """

    weights: np.ndarray
    blocks: np.ndarray
    states: list

    def recompose(self, frame_s: QuantumFrame) -> np.ndarray:
        return sum(np.kron(p, q) for p, q in zip(frame_s.projectors, self.blocks))


@dataclass(frozen=True, eq=False)
class SeparabilityReport:
    separable: bool
    decomposition: ConditionalEnvOperator
    min_eigenvalues: np.ndarray
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.separable


class _Decomposer:
    """Joint FDCs over the product frame, regrouped per system frame element."""

    def __init__(self, frame_s: QuantumFrame, frame_e: QuantumFrame):
        self.frame_s = frame_s
        self.frame_e = frame_e
        self.joint = product_frame(frame_s, frame_e)

    def __call__(self, rho: np.ndarray) -> ConditionalEnvOperator:
        dim = self.joint.d
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (dim, dim):
            raise MalformedInputError(f"state has shape {rho.shape}, expected {(dim, dim)}")
        f = fdc(self.joint, hermitize(rho)).reshape(self.frame_s.n, self.frame_e.n)
        blocks = np.einsum("pe,eij->pij", f, self.frame_e.projectors)
        weights = f.sum(axis=1)
        states = [blocks[i] / w if abs(w) > PSD_TOL else None for i, w in enumerate(weights)]
        return ConditionalEnvOperator(weights, blocks, states)


def _judge(dec: ConditionalEnvOperator, tol: float) -> SeparabilityReport:
    violations = []
    mins = np.empty(len(dec.weights))
    for i, (w, q, eps) in enumerate(zip(dec.weights, dec.blocks, dec.states)):
        if w < -tol:
            violations.append((i, "negative weight", float(w)))
        if eps is not None and w > tol:
            mins[i] = min_eigenvalue(eps)
        else:
            # tiny weight: the unnormalized block itself must still be PSD
            mins[i] = min_eigenvalue(q)
        if mins[i] < -tol:
            violations.append((i, "environment operator not PSD", float(mins[i])))
    return SeparabilityReport(not violations, dec, mins, violations)


def check_f_separability_state(frame_s: QuantumFrame, frame_e: QuantumFrame, rho,
                               tol: float = PSD_TOL) -> SeparabilityReport:
    return _judge(_Decomposer(frame_s, frame_e)(rho), tol)


def random_f_separable_state(frame_s: QuantumFrame, d_e: int, rng: np.random.Generator) -> np.ndarray:
    """Dirichlet-uniform weights and Hilbert-Schmidt random environment states."""
    f = rng.dirichlet(np.ones(frame_s.n))
    return sum(w * np.kron(p, random_density(d_e, rng)) for w, p in zip(f, frame_s.projectors))


@dataclass(frozen=True, eq=False)
class ProbeResult:
    found: bool
    samples_tried: int
    input_state: np.ndarray | None = None
    report: SeparabilityReport | None = None

    def __bool__(self):
        return self.found


def probe_f_separability_unitary(frame_s: QuantumFrame, frame_e: QuantumFrame, v,
                                 samples: int = 1000, seed=None, tol: float = PSD_TOL) -> ProbeResult:
    """Search for an F_S-separable input whose image under ``v`` is not F_S-separable.

    ``found=False`` only means no counterexample at this budget.
    """
    dim = frame_s.d * frame_e.d
    v = check_unitary(v, dim, "V")
    rng = np.random.default_rng(seed)
    decompose = _Decomposer(frame_s, frame_e)
    for k in range(1, samples + 1):
        rho = random_f_separable_state(frame_s, frame_e.d, rng)
        report = _judge(decompose(v @ rho @ dagger(v)), tol)
        if not report.separable:
            return ProbeResult(True, k, rho, report)
    return ProbeResult(False, samples)
