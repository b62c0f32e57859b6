"""Reduced open-system maps and their frame (transfer-matrix) representation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import QuantumFrame, fdc
from .linalg import check_density, check_unitary, dagger, from_coords, hermitian_basis, partial_trace_env, to_coords


@dataclass(frozen=True, eq=False)
class ReducedMap:
    """``rho -> Tr_E{V (rho (x) tau) V^dagger}`` on the system.

    ``basis_transfer[j, k] = Tr(B_j Lambda(B_k))`` in the orthonormal hermitian
    basis; ``frame_transfer[i, j]`` is the i-th FDC of ``Lambda(P_j)`` when a
    frame is supplied (columns sum to one).
    """

    v: np.ndarray
    tau: np.ndarray
    d_s: int
    basis_transfer: np.ndarray
    frame_transfer: np.ndarray | None

    def apply(self, rho) -> np.ndarray:
        d_e = self.tau.shape[0]
        joint = np.kron(np.asarray(rho, dtype=complex), self.tau)
        return partial_trace_env(self.v @ joint @ dagger(self.v), self.d_s, d_e)

    def bloch_factors(self) -> np.ndarray:
        """Diagonal of the transfer matrix without the trace component (qubit: x, y, z)."""
        return np.diag(self.basis_transfer)[1:].copy()


def reduced_map(v, tau, d_s: int, frame: QuantumFrame | None = None) -> ReducedMap:
    tau = np.asarray(tau, dtype=complex)
    d_e = tau.shape[0]
    v = check_unitary(v, d_s * d_e, "V")
    tau = check_density(tau, d_e, "tau")
    basis = hermitian_basis(d_s)
    partial = ReducedMap(v, tau, d_s, np.zeros((d_s ** 2, d_s ** 2)), None)
    transfer = np.array([to_coords(partial.apply(b), basis) for b in basis]).T
    frame_t = None
    if frame is not None:
        frame_t = np.array([fdc(frame, partial.apply(p)) for p in frame.projectors]).T
    return ReducedMap(v, tau, d_s, transfer, frame_t)


def apply_transfer(transfer: np.ndarray, rho: np.ndarray, d_s: int) -> np.ndarray:
    """Act with an orthonormal-basis transfer matrix on a system operator."""
    basis = hermitian_basis(d_s)
    return from_coords(transfer @ to_coords(rho, basis), basis)


@dataclass(frozen=True)
class FPositivityReport:
    positive: bool
    min_entry: float
    frame_index: int | None
    input_index: int | None

    def __bool__(self):
        return self.positive


def check_f_positivity(map_transfer, tol: float = 1e-9) -> FPositivityReport:
    """A frame transfer matrix is F-positive iff all its entries are nonnegative.

    Column ``j`` holds the FDCs of the image of frame element ``j``, so a
    negative entry names the frame index ``i`` and evolved element ``j``.
    """
    t = np.asarray(map_transfer, dtype=float)
    i, j = np.unravel_index(np.argmin(t), t.shape)
    low = float(t[i, j])
    if low >= -tol:
        return FPositivityReport(True, low, None, None)
    return FPositivityReport(False, low, int(i), int(j))
