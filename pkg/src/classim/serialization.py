"""JSON files for statistics, models and quantum scenarios.

Arrays are nested lists in row-major order with the axis order of the
in-memory layout.  Complex numbers are ``[re, im]`` pairs.  Floats are
written with Python's shortest round-trip representation, so parsing an
emitted file reproduces every double bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .classicality import TwoTimeStatistics
from .errors import ClassimError, MalformedInputError
from .model import OpenSystemModel
from .quantum.born import QuantumScenario
from .quantum.frames import ICPOVM, QuantumFrame
from .tensors import ImmMatrix, invert_imm

STAT_FIELDS = ("p_a1", "p_a2", "p_a2_a1", "p_a2_given_r1", "p_a2_a1_given_r1")


def _require(d: dict, key: str, where: str):
    if not isinstance(d, dict):
        raise MalformedInputError(f"{where}: expected a JSON object")
    if key not in d:
        raise MalformedInputError(f"{where}: missing field {key!r}")
    return d[key]


def _real_array(value, field: str, ndim: int | None = None) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise MalformedInputError(f"field {field!r}: not a rectangular array of numbers") from None
    if ndim is not None and arr.ndim != ndim:
        raise MalformedInputError(f"field {field!r}: expected {ndim}-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"field {field!r}: non-finite value")
    return arr


def encode_complex(a) -> list:
    arr = np.asarray(a, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_complex(value, field: str) -> np.ndarray:
    arr = _real_array(value, field)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise MalformedInputError(f"field {field!r}: complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _imm_from(value, field: str = "imm") -> ImmMatrix:
    try:
        return invert_imm(_real_array(value, field, 2))
    except MalformedInputError as exc:
        raise MalformedInputError(f"field {field!r}: {exc}") from None


# statistics

def statistics_to_dict(s: TwoTimeStatistics, metadata: dict | None = None) -> dict:
    d = {"alphabet_size": s.n, "imm": s.imm.m.tolist()}
    for name in STAT_FIELDS:
        d[name] = getattr(s, name).tolist()
    if metadata:
        d["metadata"] = metadata
    return d


def statistics_from_dict(d: dict) -> TwoTimeStatistics:
    n = _require(d, "alphabet_size", "statistics")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise MalformedInputError("field 'alphabet_size': must be an integer >= 2")
    imm = _imm_from(_require(d, "imm", "statistics"))
    if imm.n != n:
        raise MalformedInputError(f"field 'imm': shape {imm.m.shape} does not match alphabet_size {n}")
    arrays = {name: _real_array(_require(d, name, "statistics"), name) for name in STAT_FIELDS}
    return TwoTimeStatistics(imm=imm, **arrays)


# models

def model_to_dict(m: OpenSystemModel) -> dict:
    return {
        "n": m.n,
        "n_env": m.n_env,
        "quasi": m.quasi,
        "p0": m.p0.tolist(),
        "t1": m.t1.tolist(),
        "t2": m.t2.tolist(),
        "imm": m.imm.m.tolist(),
    }


def model_from_dict(d: dict) -> OpenSystemModel:
    n = _require(d, "n", "model")
    n_env = _require(d, "n_env", "model")
    imm = _imm_from(_require(d, "imm", "model"))
    p0 = _real_array(_require(d, "p0", "model"), "p0", 1)
    t1 = _real_array(_require(d, "t1", "model"), "t1", 3)
    t2 = _real_array(_require(d, "t2", "model"), "t2", 3)
    if imm.n != n:
        raise MalformedInputError(f"field 'imm': size {imm.n} does not match n = {n}")
    if t1.shape[0] != n_env:
        raise MalformedInputError(f"field 't1': environment axis {t1.shape[0]} does not match n_env = {n_env}")
    return OpenSystemModel(p0, t1, t2, imm, quasi=bool(d.get("quasi", False)))


# scenarios

def scenario_to_dict(sc: QuantumScenario) -> dict:
    d = {
        "dim_system": sc.d_s,
        "dim_env": sc.d_e,
        "frame": encode_complex(sc.povm.frame.vectors),
        "weights": sc.povm.weights.tolist(),
        "rho0": encode_complex(sc.rho0),
        "v0": encode_complex(sc.v0),
        "v1": encode_complex(sc.v1),
    }
    if sc.env_frame is not None:
        d["env_frame"] = encode_complex(sc.env_frame.vectors)
    return d


def scenario_from_dict(d: dict) -> QuantumScenario:
    d_s = _require(d, "dim_system", "scenario")
    d_e = _require(d, "dim_env", "scenario")
    vecs = decode_complex(_require(d, "frame", "scenario"), "frame")
    if vecs.ndim != 2 or vecs.shape[1] != d_s:
        raise MalformedInputError(f"field 'frame': expected vectors of length {d_s}, got shape {vecs.shape}")
    try:
        frame = QuantumFrame.from_vectors(vecs)
        povm = ICPOVM.from_frame(frame, d.get("weights"))
        env_frame = (QuantumFrame.from_vectors(decode_complex(d["env_frame"], "env_frame"))
                     if "env_frame" in d else None)
    except ClassimError as exc:
        raise MalformedInputError(f"field 'frame' / 'weights': {exc}") from None
    if "rho0" in d:
        rho0 = decode_complex(d["rho0"], "rho0")
    elif "rho_s" in d and "tau" in d:
        rho0 = np.kron(decode_complex(d["rho_s"], "rho_s"), decode_complex(d["tau"], "tau"))
    else:
        raise MalformedInputError("scenario: need either 'rho0' or both 'rho_s' and 'tau'")
    v0 = decode_complex(_require(d, "v0", "scenario"), "v0")
    v1 = decode_complex(_require(d, "v1", "scenario"), "v1")
    return QuantumScenario(d_s, d_e, rho0, v0, v1, povm, env_frame)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=1)


def _load(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc})") from None


def save_statistics(path, s: TwoTimeStatistics, metadata: dict | None = None) -> None:
    Path(path).write_text(dumps(statistics_to_dict(s, metadata)))


def load_statistics(path) -> TwoTimeStatistics:
    return statistics_from_dict(_load(path))


def save_model(path, m: OpenSystemModel) -> None:
    Path(path).write_text(dumps(model_to_dict(m)))


def load_model(path) -> OpenSystemModel:
    return model_from_dict(_load(path))


def save_scenario(path, sc: QuantumScenario) -> None:
    Path(path).write_text(dumps(scenario_to_dict(sc)))


def load_scenario(path) -> QuantumScenario:
    return scenario_from_dict(_load(path))
