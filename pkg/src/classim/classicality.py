"""Two-time measurement-and-prepare statistics and the classicality decision procedure.

Axis conventions (all arrays dense, conditioning axis last):

    p_a1[a1], p_a2[a2]
    p_a2_a1[a2, a1]                  measured at t1, no re-preparation
    p_a2_given_r1[a2, r1]            re-prepared at t1 without measuring
    p_a2_a1_given_r1[a2, a1, r1]     measured at t1, then re-prepared in r1
    imm.m[a, l]                      invasive outcome a given hidden value l

The six checks, in the order they are reported:

    p_l1             P(l1) = M^-1 P(a1) is a distribution
    p_l2_l1          P(l2; l1 | r1) (both axes contracted with M^-1) is a distribution
    causality        sum_l2 P(l2; l1 | r1) = P(l1) for every r1
    kcc_a1           P(a2 | r1) = sum_a1 P(a2; a1 | r1)
    unmeasured_a2    P(a2) = sum_{a1, r1} (M^-1)[r1, a1] P(a2; a1 | r1)
    reprepare_same   P^A1(a2; a1) = P(a2; a1 | r1 = a1)

All five observable families are required; statistics recorded without
re-preparations are not checked for an embedding into a full set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import MalformedInputError
from .tensors import (
    DEFAULT_COND_THRESHOLD,
    DEFAULT_POS_TOL,
    DEFAULT_TOL,
    CondTable,
    ImmMatrix,
    ProbVector,
    as_imm,
    invert_imm,
    validate_distribution,
)

CONDITIONS = ("p_l1", "p_l2_l1", "causality", "kcc_a1", "unmeasured_a2", "reprepare_same")
POSITIVITY_CONDITIONS = ("p_l1", "p_l2_l1")

_FAMILIES = {
    "p_a1": (("a1",), ()),
    "p_a2": (("a2",), ()),
    "p_a2_a1": (("a2", "a1"), ()),
    "p_a2_given_r1": (("a2", "r1"), ("r1",)),
    "p_a2_a1_given_r1": (("a2", "a1", "r1"), ("r1",)),
}


class Classification(str, Enum):
    CLASSICAL = "classical"
    QUASI_CLASSICAL = "quasi_classical"
    INCONSISTENT = "inconsistent"


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TwoTimeStatistics:
    """The observable probability families plus the IMM.

    Construction only checks shapes and finiteness; whether the families are
    proper distributions is part of :func:`check_conditions`.
    """

    p_a1: np.ndarray
    p_a2: np.ndarray
    p_a2_a1: np.ndarray
    p_a2_given_r1: np.ndarray
    p_a2_a1_given_r1: np.ndarray
    imm: ImmMatrix

    def __post_init__(self):
        for name in _FAMILIES:
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        try:
            object.__setattr__(self, "imm", as_imm(self.imm))
        except MalformedInputError as exc:
            raise MalformedInputError(f"imm: {exc}") from None
        n = self.imm.n
        for name, (axes, _) in _FAMILIES.items():
            arr = getattr(self, name)
            if arr.shape != (n,) * len(axes):
                raise MalformedInputError(
                    f"{name} has shape {arr.shape}, expected {(n,) * len(axes)} for alphabet size {n}")
            if not np.all(np.isfinite(arr)):
                raise MalformedInputError(f"{name} has non-finite entries")

    @property
    def n(self) -> int:
        return self.imm.n

    def table(self, name: str) -> CondTable | ProbVector:
        axes, cond = _FAMILIES[name]
        arr = getattr(self, name)
        return ProbVector(arr) if len(axes) == 1 else CondTable(arr, axes, cond)

    def families(self) -> dict:
        return {name: getattr(self, name) for name in _FAMILIES}

    def max_abs_diff(self, other: "TwoTimeStatistics") -> float:
        """Max-norm distance over all five families and the IMM."""
        diffs = [np.max(np.abs(getattr(self, k) - getattr(other, k))) for k in _FAMILIES]
        diffs.append(np.max(np.abs(self.imm.m - other.imm.m)))
        return float(max(diffs))


@dataclass(frozen=True)
class HiddenReconstruction:
    """Quasi-distributions over the hidden (non-invasive) values.

    ``p_l2_l1_given_r1`` is indexed ``[l2, l1, r1]``.
    """

    p_l1: np.ndarray
    p_l2_l1_given_r1: np.ndarray


@dataclass(frozen=True)
class Verdict:
    classification: Classification
    residuals: dict
    negativity: dict
    worst_negative: float
    notes: list = field(default_factory=list)
    tol: float = DEFAULT_TOL
    pos_tol: float = DEFAULT_POS_TOL
    hidden: HiddenReconstruction | None = None

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())

    def passed(self, condition: str) -> bool:
        ok = self.residuals[condition] <= self.tol
        if condition in POSITIVITY_CONDITIONS:
            ok = ok and self.negativity[condition] >= -self.pos_tol
        return ok

    def failing(self) -> list:
        return [c for c in CONDITIONS if not self.passed(c)]

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "residuals": dict(self.residuals),
            "min_entries": dict(self.negativity),
            "worst_negative": self.worst_negative,
            "failing": self.failing(),
            "notes": list(self.notes),
            "tol": self.tol,
            "pos_tol": self.pos_tol,
        }


def reconstruct_hidden(s: TwoTimeStatistics) -> HiddenReconstruction:
    minv = s.imm.m_inv
    p_l1 = minv @ s.p_a1
    p_l2_l1 = np.einsum("la,kb,abr->lkr", minv, minv, s.p_a2_a1_given_r1)
    return HiddenReconstruction(_frozen(p_l1), _frozen(p_l2_l1))


def _observable_problems(s: TwoTimeStatistics, tol: float, pos_tol: float) -> list:
    notes = []
    for name in _FAMILIES:
        rep = validate_distribution(s.table(name), "proper", tol=tol, pos_tol=pos_tol)
        if not rep.passed:
            notes.append(f"{name} is not a proper distribution "
                         f"(normalization residual {rep.residual:.3g}, min entry {rep.min_entry:.3g})")
    return notes


def check_conditions(s: TwoTimeStatistics, tol: float = DEFAULT_TOL,
                     pos_tol: float = DEFAULT_POS_TOL) -> Verdict:
    """Decide whether ``s`` admits an instantaneously-invasive IC classical description.

    Residuals are max-norms over all index combinations.  Only failures of
    the two positivity checks lead to ``quasi_classical``; any failed
    equality or normalization, or an observable family that is not a proper
    distribution, makes the verdict ``inconsistent``.
    """
    if not isinstance(s, TwoTimeStatistics):
        raise MalformedInputError("check_conditions expects a TwoTimeStatistics")
    notes = _observable_problems(s, tol, pos_tol)
    hidden = reconstruct_hidden(s)
    minv = s.imm.m_inv
    p_l1, p_l2_l1 = hidden.p_l1, hidden.p_l2_l1_given_r1
    n = s.n

    residuals = {
        "p_l1": abs(p_l1.sum() - 1.0),
        "p_l2_l1": np.max(np.abs(p_l2_l1.sum(axis=(0, 1)) - 1.0)),
        "causality": np.max(np.abs(p_l2_l1.sum(axis=0) - p_l1[:, None])),
        "kcc_a1": np.max(np.abs(s.p_a2_given_r1 - s.p_a2_a1_given_r1.sum(axis=1))),
        "unmeasured_a2": np.max(np.abs(
            s.p_a2 - np.einsum("ra,bar->b", minv, s.p_a2_a1_given_r1))),
        "reprepare_same": np.max(np.abs(
            s.p_a2_a1 - s.p_a2_a1_given_r1[:, np.arange(n), np.arange(n)])),
    }
    residuals = {k: float(v) for k, v in residuals.items()}
    negativity = {"p_l1": float(p_l1.min()), "p_l2_l1": float(p_l2_l1.min())}
    worst = min(0.0, *negativity.values())

    equality_fail = [c for c in CONDITIONS if residuals[c] > tol]
    positivity_fail = [c for c in POSITIVITY_CONDITIONS if negativity[c] < -pos_tol]
    if notes or equality_fail:
        cls = Classification.INCONSISTENT
        notes += [f"{c} violated (residual {residuals[c]:.3g} > tol {tol:.3g})" for c in equality_fail]
    elif positivity_fail:
        cls = Classification.QUASI_CLASSICAL
        notes += [f"{c} has negative entry {negativity[c]:.3g}" for c in positivity_fail]
    else:
        cls = Classification.CLASSICAL
    return Verdict(cls, residuals, negativity, float(worst), notes, tol, pos_tol, hidden)


def imm_from_preparation_data(frequencies, tol: float = DEFAULT_TOL,
                              cond_threshold: float = DEFAULT_COND_THRESHOLD) -> ImmMatrix:
    """Estimate the IMM from outcome frequencies recorded after preparing each hidden value.

    ``frequencies[l]`` is the outcome distribution observed when the system
    was prepared so that the hidden value is ``l`` with certainty; it becomes
    column ``l`` of the IMM.
    """
    freqs = np.array(frequencies, dtype=float)
    if freqs.ndim != 2 or freqs.shape[0] != freqs.shape[1]:
        raise MalformedInputError(f"need one frequency vector per prepared value, got shape {freqs.shape}")
    for l, col in enumerate(freqs):
        rep = validate_distribution(col, "proper", tol=tol)
        if not rep.passed:
            raise MalformedInputError(
                f"frequencies for prepared value {l} are not normalized "
                f"(residual {rep.residual:.3g}, min {rep.min_entry:.3g})")
    return invert_imm(freqs.T, cond_threshold=cond_threshold, tol=tol)
