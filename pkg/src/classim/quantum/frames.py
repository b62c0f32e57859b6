"""Minimal quantum frames, frame decomposition coefficients and rank-one IC-POVMs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import MalformedInputError, NotInformationallyCompleteError, SingularFrameError
from ..tensors import ImmMatrix, invert_imm
from .linalg import from_coords, hermitian_basis, is_hermitian, to_coords

FRAME_COND_THRESHOLD = 1e8


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class QuantumFrame:
    """``d**2`` pure-state projectors forming a (non-orthogonal) basis of operator space.

    ``analysis[i, k] = Tr(P_i B_k)`` in the orthonormal hermitian basis ``B``;
    the frame operator in that basis is ``analysis.T @ analysis``.
    """

    vectors: np.ndarray
    d: int
    basis: np.ndarray
    projectors: np.ndarray
    analysis: np.ndarray
    s_matrix: np.ndarray

    @classmethod
    def from_vectors(cls, vectors, cond_threshold: float = FRAME_COND_THRESHOLD) -> "QuantumFrame":
        vecs = np.array(vectors, dtype=complex)
        if vecs.ndim != 2:
            raise MalformedInputError(f"frame vectors must be a 2-d array, got shape {vecs.shape}")
        if not np.all(np.isfinite(vecs)):
            raise MalformedInputError("frame vectors have non-finite entries")
        n, d = vecs.shape
        norms = np.linalg.norm(vecs, axis=1)
        if np.any(norms < 1e-12):
            raise MalformedInputError("frame contains a zero vector")
        # leave unit vectors untouched so serialized frames round-trip exactly
        norms = np.where(np.abs(norms - 1) <= 1e-14, 1.0, norms)
        vecs = vecs / norms[:, None]
        if n != d * d:
            raise SingularFrameError(f"{n} projectors cannot form a minimal frame in dimension {d} (need {d * d})")
        basis = hermitian_basis(d)
        projectors = np.einsum("ni,nj->nij", vecs, vecs.conj())
        analysis = np.array([to_coords(p, basis) for p in projectors])
        cond = np.linalg.cond(analysis)
        if not np.isfinite(cond) or cond > cond_threshold:
            raise SingularFrameError(f"frame projectors are linearly dependent (condition {cond:.3g})")
        s = analysis.T @ analysis
        return cls(_readonly(vecs), d, basis, _readonly(projectors), _readonly(analysis), _readonly(s))

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def duals(self) -> np.ndarray:
        """Dual operators ``D_i = S^-1(P_i)`` with ``f_i(X) = Tr(D_i X)``."""
        return np.array([frame_operator_invert(self, p) for p in self.projectors])


def _check_operator(frame: QuantumFrame, x) -> np.ndarray:
    arr = np.asarray(x, dtype=complex)
    if arr.shape != (frame.d, frame.d):
        raise MalformedInputError(f"operator has shape {arr.shape}, frame dimension is {frame.d}")
    if not is_hermitian(arr, 1e-9 * max(1.0, np.abs(arr).max())):
        raise MalformedInputError("operator is not hermitian")
    return arr


def frame_operator_apply(frame: QuantumFrame, x) -> np.ndarray:
    """``S(X) = sum_i Tr(P_i X) P_i``."""
    x = _check_operator(frame, x)
    return from_coords(frame.s_matrix @ to_coords(x, frame.basis), frame.basis)


def frame_operator_invert(frame: QuantumFrame, x) -> np.ndarray:
    """Solve ``S(Y) = X`` for ``Y``."""
    x = _check_operator(frame, x)
    return from_coords(np.linalg.solve(frame.s_matrix, to_coords(x, frame.basis)), frame.basis)


def fdc(frame: QuantumFrame, rho) -> np.ndarray:
    """Frame decomposition coefficients ``f_i = <psi_i| S^-1[rho] |psi_i>``."""
    y = frame_operator_invert(frame, rho)
    return np.einsum("ni,ij,nj->n", frame.vectors.conj(), y, frame.vectors).real


def reconstruct(frame: QuantumFrame, coeffs) -> np.ndarray:
    return np.einsum("n,nij->ij", np.asarray(coeffs, dtype=float), frame.projectors)


def product_frame(frame_s: QuantumFrame, frame_e: QuantumFrame) -> QuantumFrame:
    """Frame of all ``psi (x) epsilon``, system index major."""
    vecs = np.einsum("pi,ej->peij", frame_s.vectors, frame_e.vectors)
    return QuantumFrame.from_vectors(vecs.reshape(frame_s.n * frame_e.n, frame_s.d * frame_e.d))


@dataclass(frozen=True, eq=False)
class ICPOVM:
    """Rank-one IC-POVM with effects ``w_i |psi_i><psi_i|`` (``w_i = 1/c_i``)."""

    frame: QuantumFrame
    weights: np.ndarray

    @classmethod
    def from_frame(cls, frame: QuantumFrame, weights=None, tol: float = 1e-9) -> "ICPOVM":
        """Use the given weights, or solve ``sum_i w_i P_i = I`` (unique for a minimal frame)."""
        if weights is None:
            w = fdc(frame, np.eye(frame.d))
        else:
            w = np.array(weights, dtype=float)
            if w.shape != (frame.n,):
                raise MalformedInputError(f"need {frame.n} weights, got shape {w.shape}")
        if np.any(w <= tol):
            raise MalformedInputError(f"frame does not generate a POVM: weights {np.round(w, 6)} not all positive")
        total = np.einsum("n,nij->ij", w, frame.projectors)
        if np.max(np.abs(total - np.eye(frame.d))) > tol:
            raise MalformedInputError("effects do not sum to the identity")
        return cls(frame, _readonly(w))

    @property
    def n(self) -> int:
        return self.frame.n

    @property
    def effects(self) -> np.ndarray:
        return self.weights[:, None, None] * self.frame.projectors

    @property
    def kraus(self) -> np.ndarray:
        return np.sqrt(self.weights)[:, None, None] * self.frame.projectors


def imm_from_povm(povm: ICPOVM) -> ImmMatrix:
    """``M[a, l] = Tr(E_a |l><l|) = w_a |<a|l>|^2``."""
    overlap = np.abs(povm.frame.vectors.conj() @ povm.frame.vectors.T) ** 2
    m = povm.weights[:, None] * overlap
    return invert_imm(m)


def standard_frame(d: int) -> QuantumFrame:
    """The tomography set ``|k>``, ``(|j>+|k>)/sqrt2``, ``(|j>+i|k>)/sqrt2``.

    Always a minimal frame, but its identity weights are not all positive,
    so it serves as an environment frame rather than a POVM generator.
    """
    vecs = [np.eye(d)[k] for k in range(d)]
    for j in range(d):
        for k in range(j + 1, d):
            e = np.eye(d)
            vecs.append((e[j] + e[k]) / np.sqrt(2))
            vecs.append((e[j] + 1j * e[k]) / np.sqrt(2))
    return QuantumFrame.from_vectors(vecs)


def sic_qubit_vectors() -> np.ndarray:
    """``|0>`` and ``|0>/sqrt3 + sqrt(2/3) e^{2 pi i k/3} |1>`` for k = 1, 2, 3."""
    vecs = [[1.0, 0.0]]
    for k in (1, 2, 3):
        vecs.append([1 / np.sqrt(3), np.sqrt(2 / 3) * np.exp(2j * np.pi * k / 3)])
    return np.array(vecs, dtype=complex)


def sic_qubit_frame() -> QuantumFrame:
    return QuantumFrame.from_vectors(sic_qubit_vectors())


def random_povm(d: int, rng: np.random.Generator, max_imm_cond: float = 1e3,
                max_tries: int = 10_000) -> ICPOVM:
    """Random rank-one IC-POVM with a well-conditioned IMM.

    Gaussian vectors ``v_i`` give effects ``|v_i><v_i|``; conjugating by
    ``S^-1/2`` with ``S = sum_i |v_i><v_i|`` makes them sum to the identity
    while keeping rank one and linear independence.  Draws whose IMM
    condition exceeds ``max_imm_cond`` are rejected.
    """
    for _ in range(max_tries):
        v = rng.normal(size=(d * d, d)) + 1j * rng.normal(size=(d * d, d))
        evals, evecs = np.linalg.eigh(v.T @ v.conj())
        root_inv = (evecs / np.sqrt(evals)) @ evecs.conj().T
        u = v @ root_inv.T
        weights = np.sum(np.abs(u) ** 2, axis=1)
        try:
            frame = QuantumFrame.from_vectors(u, cond_threshold=1e6)
            povm = ICPOVM.from_frame(frame, weights)
            imm = imm_from_povm(povm)
        except (MalformedInputError, SingularFrameError, NotInformationallyCompleteError):
            continue
        if imm.condition <= max_imm_cond:
            return povm
    raise RuntimeError(f"no admissible random POVM found in {max_tries} tries")
