"""System-plus-environment stochastic models that reproduce two-time statistics.

Array layouts:

    p0[l0]
    t1[e1, l1, l0]     joint (environment, system) state at t1 given l0
    t2[l2, e1, s]      system value at t2 given environment e1 and system symbol s

The system slot ``s`` of ``t2`` receives the re-prepared value ``r1``, the
measured outcome ``a1`` (measured, not re-prepared) or the untouched hidden
value ``l1``, depending on the context.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classicality import Classification, TwoTimeStatistics, check_conditions, reconstruct_hidden
from .errors import (
    ConstructionRefusedError,
    InternalInconsistencyError,
    MalformedInputError,
    SamplingError,
    UsageError,
)
from .tensors import DEFAULT_POS_TOL, DEFAULT_TOL, ImmMatrix, as_imm

DENOM_FLOOR = 1e-12
CONTEXTS = ("bare", "measure", "reprepare", "measure+reprepare")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class OpenSystemModel:
    """Initial distribution, two stochastic evolutions and the measurement matrix.

    With ``quasi=True`` the evolutions only need to be normalized, entries
    may be negative.
    """

    p0: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    imm: ImmMatrix
    quasi: bool = False
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "imm", as_imm(self.imm))
        for name in ("p0", "t1", "t2"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = self.imm.n
        p0, t1, t2 = self.p0, self.t1, self.t2
        if p0.ndim != 1:
            raise MalformedInputError("p0 must be a vector")
        if t1.ndim != 3 or t1.shape[1] != n or t1.shape[2] != p0.shape[0]:
            raise MalformedInputError(f"t1 must have shape (n_env, {n}, {p0.shape[0]}), got {t1.shape}")
        if t2.shape != (n, t1.shape[0], n):
            raise MalformedInputError(f"t2 must have shape ({n}, {t1.shape[0]}, {n}), got {t2.shape}")
        for name, arr in (("p0", p0), ("t1", t1), ("t2", t2)):
            if not np.all(np.isfinite(arr)):
                raise MalformedInputError(f"{name} has non-finite entries")
        checks = (
            ("p0", p0.sum() - 1.0),
            ("t1", t1.sum(axis=(0, 1)) - 1.0),
            ("t2", t2.sum(axis=0) - 1.0),
        )
        for name, dev in checks:
            if np.max(np.abs(dev)) > self.tol:
                raise MalformedInputError(f"{name} is not normalized (max deviation {np.max(np.abs(dev)):.3g})")
        if not self.quasi:
            for name, arr in (("p0", p0), ("t1", t1), ("t2", t2)):
                if arr.min() < -self.tol:
                    raise MalformedInputError(f"{name} has negative entry {arr.min():.3g}; pass quasi=True")

    @property
    def n(self) -> int:
        return self.imm.n

    @property
    def n_env(self) -> int:
        return self.t1.shape[0]

    @property
    def is_proper(self) -> bool:
        return min(self.p0.min(), self.t1.min(), self.t2.min()) >= -DEFAULT_POS_TOL


@dataclass(frozen=True)
class ContextualJoint:
    """Joint quasi-distribution ``joint[a2, l2, a1, l1, r1]``, one slice per ``r1``."""

    joint: np.ndarray
    imm: ImmMatrix

    def p_a2_a1_given_r1(self) -> np.ndarray:
        return self.joint.sum(axis=(1, 3))

    def p_a2_given_r1(self) -> np.ndarray:
        return self.joint.sum(axis=(1, 2, 3))

    def p_a2(self) -> np.ndarray:
        return np.einsum("ra,bxayr->b", self.imm.m_inv, self.joint)

    def p_a2_a1(self) -> np.ndarray:
        n = self.joint.shape[0]
        marg = self.p_a2_a1_given_r1()
        return marg[:, np.arange(n), np.arange(n)]

    def p_a1(self) -> np.ndarray:
        """Time-1 marginal, one column per ``r1`` (all equal by causality)."""
        return self.joint.sum(axis=(0, 1, 3))


def _state_at_t1(m: OpenSystemModel) -> np.ndarray:
    # joint[e1, l1]
    return np.einsum("elk,k->el", m.t1, m.p0)


def evaluate_model(m: OpenSystemModel) -> TwoTimeStatistics:
    """Compute the five observable families of ``m`` by direct contraction."""
    if not isinstance(m, OpenSystemModel):
        raise MalformedInputError("evaluate_model expects an OpenSystemModel")
    M = m.imm.m
    j1 = _state_at_t1(m)
    # t2 composed with the time-2 measurement: out[a2, e1, s]
    t2m = np.einsum("al,les->aes", M, m.t2)
    p_a1 = M @ j1.sum(axis=0)
    p_a2_a1_r1 = np.einsum("aer,bl,el->abr", t2m, M, j1)
    p_a2_r1 = np.einsum("aer,el->ar", t2m, j1)
    p_a2 = np.einsum("ael,el->a", t2m, j1)
    p_a2_a1 = np.einsum("aeb,bl,el->ab", t2m, M, j1)
    return TwoTimeStatistics(p_a1, p_a2, p_a2_a1, p_a2_r1, p_a2_a1_r1, m.imm)


def build_contextual_joint(m: OpenSystemModel) -> ContextualJoint:
    M = m.imm.m
    j1 = _state_at_t1(m)
    joint = np.einsum("xy,yer,al,el->xyalr", M, m.t2, M, j1)
    return ContextualJoint(joint, m.imm)


def construct_model(s: TwoTimeStatistics, tol: float = DEFAULT_TOL, quasi: bool = False,
                    denom_floor: float = DENOM_FLOOR, pos_tol: float = DEFAULT_POS_TOL,
                    verify: bool = True) -> OpenSystemModel:
    """Build the canonical model whose environment stores a copy of the hidden value.

    The initial distribution is the reconstructed ``P(l1)``, ``t1`` copies
    ``l0`` into both system and environment, and ``t2`` is the conditional
    ``P(l2; l1=e1 | r1) / P(l1=e1)``.  A vanishing denominator gets the
    uniform column ``1/n`` provided its numerators vanish too.

    Raises:
        ConstructionRefusedError: the verdict is not ``classical`` (or, with
            ``quasi=True``, not ``classical``/``quasi_classical``).
        InternalInconsistencyError: a denominator below ``denom_floor`` met a
            numerator above ``tol``.
    """
    verdict = check_conditions(s, tol=tol, pos_tol=pos_tol)
    allowed = {Classification.CLASSICAL}
    if quasi:
        allowed.add(Classification.QUASI_CLASSICAL)
    if verdict.classification not in allowed:
        failing = ", ".join(verdict.failing()) or "observable families"
        raise ConstructionRefusedError(
            f"statistics are {verdict.classification.value}; failing: {failing}", verdict)

    hidden = verdict.hidden or reconstruct_hidden(s)
    n = s.n
    p_l1 = np.array(hidden.p_l1)
    # num[l2, e1, r1] = P(l2; l1=e1 | r1)
    num = np.array(hidden.p_l2_l1_given_r1)
    t2 = np.empty_like(num)
    for e1 in range(n):
        d = p_l1[e1]
        if abs(d) <= denom_floor:
            worst = np.max(np.abs(num[:, e1, :]))
            if worst > tol:
                raise InternalInconsistencyError(
                    f"P(l1={e1}) = {d:.3g} vanishes but its joint entries reach {worst:.3g}")
            t2[:, e1, :] = 1.0 / n
        else:
            t2[:, e1, :] = num[:, e1, :] / d
    t1 = np.zeros((n, n, n))
    t1[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    model = OpenSystemModel(p_l1, t1, t2, s.imm, quasi=quasi, tol=max(tol, 1e-9))
    if verify:
        dev = evaluate_model(model).max_abs_diff(s)
        if dev > tol:
            raise InternalInconsistencyError(f"constructed model misses the statistics by {dev:.3g}")
    return model


@dataclass(frozen=True)
class EmpiricalStatistics:
    """Outcome frequencies from sampled trajectories in one context.

    ``frequencies`` maps a family name (``p_a2``, ``p_a1``, ``p_a2_a1``,
    ``p_a2_given_r1``, ``p_a2_a1_given_r1``) to an array laid out like the
    matching ``TwoTimeStatistics`` field restricted to the sampled ``r1``.
    """

    context: str
    r1: int | None
    shots: int
    counts: dict
    frequencies: dict
    stderr: dict


def _categorical(rng: np.random.Generator, probs: np.ndarray, cond: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw per shot: ``probs[:, c]`` is the distribution for condition ``c``."""
    cdf = np.cumsum(probs, axis=0)
    cdf[-1] = 1.0
    u = rng.random(cond.shape[0])
    out = np.empty(cond.shape[0], dtype=np.int64)
    for c in np.unique(cond):
        mask = cond == c
        out[mask] = np.searchsorted(cdf[:, c], u[mask], side="right")
    return np.minimum(out, probs.shape[0] - 1)


def sample_trajectories(m: OpenSystemModel, context: str, shots: int, seed=None,
                        r1: int | None = None) -> EmpiricalStatistics:
    """Monte Carlo simulation of the model in one measurement context.

    Contexts: ``bare`` (nothing at t1), ``measure`` (measure at t1, feed the
    outcome to the evolution), ``reprepare`` (reset to ``r1`` without
    measuring) and ``measure+reprepare`` (measure, then reset to ``r1``).
    """
    if context not in CONTEXTS:
        raise UsageError(f"unknown context {context!r}; choose from {CONTEXTS}")
    if shots < 1:
        raise UsageError("shots must be >= 1")
    needs_r1 = "reprepare" in context
    if needs_r1 and (r1 is None or not 0 <= r1 < m.n):
        raise UsageError(f"context {context!r} needs r1 in 0..{m.n - 1}")
    if not needs_r1:
        r1 = None
    if not m.is_proper:
        raise SamplingError("model has negative weights; quasi-stochastic models cannot be sampled")

    rng = np.random.default_rng(seed)
    n, n_env = m.n, m.n_env
    M = np.clip(m.imm.m, 0.0, None)
    l0 = _categorical(rng, np.clip(m.p0, 0.0, None)[:, None], np.zeros(shots, dtype=int))
    joint = _categorical(rng, np.clip(m.t1, 0.0, None).reshape(n_env * n, -1), l0)
    e1, l1 = np.divmod(joint, n)
    a1 = _categorical(rng, M, l1) if context in ("measure", "measure+reprepare") else None
    if needs_r1:
        fed = np.full(shots, r1)
    elif context == "measure":
        fed = a1
    else:
        fed = l1
    t2 = np.clip(m.t2, 0.0, None).reshape(n, n_env * n)
    l2 = _categorical(rng, t2, e1 * n + fed)
    a2 = _categorical(rng, M, l2)

    counts = {}
    if context == "bare":
        counts["p_a2"] = np.bincount(a2, minlength=n)
    elif context == "reprepare":
        counts["p_a2_given_r1"] = np.bincount(a2, minlength=n)
    else:
        counts["p_a1"] = np.bincount(a1, minlength=n)
        pair = np.bincount(a2 * n + a1, minlength=n * n).reshape(n, n)
        counts["p_a2_a1" if context == "measure" else "p_a2_a1_given_r1"] = pair
    freqs = {k: v / shots for k, v in counts.items()}
    stderr = {k: np.sqrt(f * (1.0 - f) / shots) for k, f in freqs.items()}
    return EmpiricalStatistics(context, r1, shots, counts, freqs, stderr)


def analytic_counterpart(s: TwoTimeStatistics, emp: EmpiricalStatistics) -> dict:
    """The exact probabilities matching each family in ``emp``."""
    out = {}
    for name in emp.frequencies:
        arr = getattr(s, name)
        if name.endswith("given_r1"):
            arr = arr[..., emp.r1]
        out[name] = np.array(arr)
    return out
