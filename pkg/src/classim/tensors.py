"""Dense probability vectors, conditional tables and invasive measurement matrices.

Every table in the package is a plain ``numpy`` array whose axes follow the
fixed order ``[outcome axes..., conditioning axes...]``.  ``CondTable`` adds the
axis names so that marginalization cannot silently sum over the wrong index.
All arrays held by these types are copied and marked read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import MalformedInputError, NotInformationallyCompleteError, UsageError

DEFAULT_TOL = 1e-9
DEFAULT_POS_TOL = 1e-12
DEFAULT_COND_THRESHOLD = 1e8


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


def _check_finite(arr: np.ndarray, what: str) -> None:
    if arr.size == 0:
        raise MalformedInputError(f"{what} is empty")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"{what} has non-finite entries")


@dataclass(frozen=True)
class ProbVector:
    """A (quasi-)probability vector over the alphabet ``0..n-1``."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.entries)
        if arr.ndim != 1:
            raise MalformedInputError(f"probability vector must be 1-d, got shape {arr.shape}")
        _check_finite(arr, "probability vector")
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class CondTable:
    """A dense table with named axes; ``conditioning`` must be trailing axes.

    For every fixed value of the conditioning axes the remaining (outcome)
    axes hold one joint distribution.
    """

    entries: np.ndarray
    axes: tuple
    conditioning: tuple = ()

    def __post_init__(self):
        arr = _frozen(self.entries)
        axes = tuple(self.axes)
        cond = tuple(self.conditioning)
        if arr.ndim != len(axes):
            raise MalformedInputError(f"table has {arr.ndim} axes but {len(axes)} labels {axes}")
        if len(set(axes)) != len(axes):
            raise MalformedInputError(f"duplicate axis labels {axes}")
        if cond and axes[-len(cond):] != cond:
            raise MalformedInputError(f"conditioning axes {cond} must be the trailing axes of {axes}")
        _check_finite(arr, "table")
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "conditioning", cond)

    @property
    def outcome_axes(self) -> tuple:
        return self.axes[: len(self.axes) - len(self.conditioning)]

    def outcome_sums(self) -> np.ndarray:
        """Total mass of each conditional slice (shape of the conditioning axes)."""
        k = len(self.outcome_axes)
        return self.entries.sum(axis=tuple(range(k))) if k else np.ones(self.entries.shape)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    residual: float
    min_entry: float
    mode: str
    tol: float

    def __bool__(self):
        return self.passed


def validate_distribution(v, mode: str = "proper", tol: float = DEFAULT_TOL,
                          pos_tol: float | None = None) -> ValidationReport:
    """Check normalization (and, in ``proper`` mode, positivity) of a vector or table.

    For a ``CondTable`` the normalization residual is the max over all
    conditional slices.  ``pos_tol`` defaults to ``tol``.
    """
    if mode not in ("proper", "quasi"):
        raise UsageError(f"mode must be 'proper' or 'quasi', got {mode!r}")
    if tol <= 0:
        raise UsageError("tol must be positive")
    pos_tol = tol if pos_tol is None else pos_tol
    if isinstance(v, CondTable):
        entries = v.entries
        residual = float(np.max(np.abs(v.outcome_sums() - 1.0)))
    else:
        entries = v.entries if isinstance(v, ProbVector) else np.asarray(v, dtype=float)
        if entries.ndim != 1:
            raise MalformedInputError("expected a 1-d vector; wrap tables in CondTable")
        _check_finite(entries, "distribution")
        if entries.size < 2:
            raise MalformedInputError("alphabet size must be at least 2")
        residual = float(abs(entries.sum() - 1.0))
    min_entry = float(entries.min())
    passed = residual <= tol and (mode == "quasi" or min_entry >= -pos_tol)
    return ValidationReport(passed, residual, min_entry, mode, tol)


def marginalize(t: CondTable, axis: str) -> Union[CondTable, ProbVector]:
    """Sum ``t`` over the outcome axis ``axis``.

    A single remaining unconditioned axis is returned as a ``ProbVector``.
    """
    if axis in t.conditioning:
        raise UsageError(f"cannot marginalize conditioning axis {axis!r}")
    if axis not in t.axes:
        raise UsageError(f"no axis {axis!r} in {t.axes}")
    i = t.axes.index(axis)
    summed = t.entries.sum(axis=i)
    axes = t.axes[:i] + t.axes[i + 1:]
    if len(axes) == 1 and not t.conditioning:
        return ProbVector(summed)
    return CondTable(summed, axes, t.conditioning)


@dataclass(frozen=True)
class ImmMatrix:
    """Column-stochastic invasive measurement matrix ``m[a, l]`` and its inverse.

    Build through :func:`invert_imm` (or :meth:`from_array`) so that the
    inverse and the condition estimate are always populated.
    """

    m: np.ndarray
    m_inv: np.ndarray
    condition: float

    def __post_init__(self):
        object.__setattr__(self, "m", _frozen(self.m))
        object.__setattr__(self, "m_inv", _frozen(self.m_inv))

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @classmethod
    def from_array(cls, m, cond_threshold: float = DEFAULT_COND_THRESHOLD,
                   tol: float = DEFAULT_TOL) -> "ImmMatrix":
        return invert_imm(m, cond_threshold=cond_threshold, tol=tol)

    @classmethod
    def identity(cls, n: int) -> "ImmMatrix":
        return invert_imm(np.eye(n))


def check_column_stochastic(m: np.ndarray, tol: float = DEFAULT_TOL, quasi: bool = False,
                            what: str = "matrix") -> None:
    """Raise ``MalformedInputError`` unless every column of ``m`` is a distribution."""
    sums = m.sum(axis=0)
    bad = np.max(np.abs(sums - 1.0))
    if bad > tol:
        raise MalformedInputError(f"{what}: column sums deviate from 1 by {bad:.3g}")
    if not quasi and m.min() < -tol:
        raise MalformedInputError(f"{what}: negative entry {m.min():.3g}")


def invert_imm(m, cond_threshold: float = DEFAULT_COND_THRESHOLD,
               tol: float = DEFAULT_TOL) -> ImmMatrix:
    """Invert a column-stochastic IMM by a dense solve.

    Raises:
        MalformedInputError: ``m`` is not square or not column-stochastic.
        NotInformationallyCompleteError: ``m`` is singular or its 2-norm
            condition number exceeds ``cond_threshold``.
    """
    if isinstance(m, ImmMatrix):
        m = m.m
    arr = np.array(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MalformedInputError(f"IMM must be square, got shape {arr.shape}")
    _check_finite(arr, "IMM")
    check_column_stochastic(arr, tol=tol, what="IMM")
    if arr.max() > 1.0 + tol:
        raise MalformedInputError("IMM entries must lie in [0, 1]")
    cond = float(np.linalg.cond(arr))
    if not np.isfinite(cond) or cond > cond_threshold:
        raise NotInformationallyCompleteError(
            f"IMM condition estimate {cond:.3g} exceeds threshold {cond_threshold:.3g}")
    n = arr.shape[0]
    try:
        inv = np.linalg.solve(arr, np.eye(n))
    except np.linalg.LinAlgError as exc:
        raise NotInformationallyCompleteError(f"IMM is singular: {exc}") from None
    if np.max(np.abs(arr @ inv - np.eye(n))) > max(tol, 1e-12 * cond):
        raise NotInformationallyCompleteError("IMM inverse failed the identity round trip")
    return ImmMatrix(arr, inv, cond)


def as_imm(m) -> ImmMatrix:
    return m if isinstance(m, ImmMatrix) else invert_imm(m)


def stack_columns(columns: Sequence[Sequence[float]]) -> np.ndarray:
    """Assemble per-condition vectors into a matrix (one vector per column)."""
    return np.array(columns, dtype=float).T
