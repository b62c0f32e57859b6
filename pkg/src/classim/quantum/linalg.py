"""Small dense helpers for system (x) environment operators.

Bipartite operators are ``(d_s*d_e, d_s*d_e)`` arrays with the system as the
first tensor factor.
"""

from __future__ import annotations

import numpy as np

from ..errors import MalformedInputError

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def hermitian_basis(d: int) -> np.ndarray:
    """Orthonormal (Hilbert-Schmidt) basis of d x d hermitian matrices.

    Order: ``I/sqrt(d)``, then for each pair ``j < k`` the symmetric and
    antisymmetric generalized Gell-Mann matrices, then the diagonal ones.
    For ``d = 2`` this is ``(I, X, Y, Z) / sqrt(2)``.
    """
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / np.sqrt(2)
            anti = np.zeros((d, d), dtype=complex)
            anti[j, k] = -1j / np.sqrt(2)
            anti[k, j] = 1j / np.sqrt(2)
            basis += [sym, anti]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return np.array(basis)


def to_coords(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Real coordinates ``Tr(B_k x)`` of a hermitian operator."""
    return np.einsum("kij,ji->k", basis, x).real


def from_coords(c: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return np.einsum("k,kij->ij", c, basis)


def is_hermitian(a: np.ndarray, tol: float = 1e-9) -> bool:
    return a.ndim == 2 and a.shape[0] == a.shape[1] and np.max(np.abs(a - dagger(a)), initial=0.0) <= tol


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    return (u.ndim == 2 and u.shape[0] == u.shape[1]
            and np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))) <= tol)


def check_unitary(u, dim: int, name: str = "unitary", tol: float = 1e-9) -> np.ndarray:
    arr = np.asarray(u, dtype=complex)
    if arr.shape != (dim, dim):
        raise MalformedInputError(f"{name} must have shape {(dim, dim)}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"{name} has non-finite entries")
    if not is_unitary(arr, tol):
        raise MalformedInputError(f"{name} is not unitary")
    return arr


def check_density(rho, dim: int, name: str = "state", tol: float = 1e-9) -> np.ndarray:
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (dim, dim):
        raise MalformedInputError(f"{name} must have shape {(dim, dim)}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"{name} has non-finite entries")
    if not is_hermitian(arr, tol):
        raise MalformedInputError(f"{name} is not hermitian")
    if abs(np.trace(arr) - 1) > tol:
        raise MalformedInputError(f"{name} does not have unit trace")
    if np.linalg.eigvalsh(hermitize(arr)).min() < -tol:
        raise MalformedInputError(f"{name} is not positive semidefinite")
    return arr


def hermitize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + dagger(a))


def min_eigenvalue(a: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(a)).min())


def partial_trace_system(rho: np.ndarray, d_s: int, d_e: int) -> np.ndarray:
    """Trace out the first factor, leaving the environment operator."""
    return np.einsum("ijik->jk", rho.reshape(d_s, d_e, d_s, d_e))


def partial_trace_env(rho: np.ndarray, d_s: int, d_e: int) -> np.ndarray:
    """Trace out the second factor, leaving the system operator."""
    return np.einsum("ijkj->ik", rho.reshape(d_s, d_e, d_s, d_e))


def expm_hermitian(h: np.ndarray, t: complex = -1j) -> np.ndarray:
    """``exp(t * h)`` for hermitian ``h`` via its eigendecomposition."""
    if not is_hermitian(h, 1e-12):
        raise MalformedInputError("generator must be hermitian")
    w, v = np.linalg.eigh(hermitize(h))
    return (v * np.exp(t * w)) @ dagger(v)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt random density operator (``rank=1`` gives a pure state)."""
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_state_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)
