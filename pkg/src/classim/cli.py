"""Command-line front end: ``classim {check,construct,simulate,sample,repro}``.

Exit codes are a stable contract::

    0   classical / success
    10  quasi_classical (``check`` only)
    20  inconsistent, or a construction / sampling refusal
    2   input or usage error
    1   a ``repro`` target failed
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import serialization as ser
from .classicality import CONDITIONS, Classification, check_conditions
from .errors import ClassimError, ConstructionRefusedError, SamplingError, UsageError
from .model import CONTEXTS, analytic_counterpart, construct_model, evaluate_model, sample_trajectories
from .quantum.born import QuantumScenario, born_statistics
from .quantum.frames import imm_from_povm, random_povm
from .quantum.linalg import random_density, random_unitary
from .repro import REPRO_TARGETS, run_repro, sic_qubit_fixture
from .tensors import DEFAULT_TOL

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_QUASI = 10
EXIT_INCONSISTENT = 20

_CHECK_EXIT = {
    Classification.CLASSICAL: EXIT_OK,
    Classification.QUASI_CLASSICAL: EXIT_QUASI,
    Classification.INCONSISTENT: EXIT_INCONSISTENT,
}


def default_tol() -> float:
    raw = os.environ.get("CLASSIM_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"CLASSIM_TOL={raw!r} is not a number") from None
    if not tol > 0:
        raise UsageError("CLASSIM_TOL must be positive")
    return tol


def _emit(args, payload: dict, text: list) -> None:
    if args.json:
        print(json.dumps(payload, indent=1))
    else:
        print("\n".join(text))


# check

def cmd_check(args) -> int:
    s = ser.load_statistics(args.stats)
    verdict = check_conditions(s, tol=args.tol)
    payload = verdict.to_dict()
    text = [f"classification: {verdict.classification.value}"]
    for c in CONDITIONS:
        mark = "ok" if verdict.passed(c) else "FAIL"
        extra = f"  min entry {verdict.negativity[c]:.3e}" if c in verdict.negativity else ""
        text.append(f"  {c:<15} residual {verdict.residuals[c]:.3e}{extra}  {mark}")
    text.append(f"worst negative entry: {verdict.worst_negative:.6g}")
    text += [f"note: {n}" for n in verdict.notes]
    _emit(args, payload, text)
    code = _CHECK_EXIT[verdict.classification]
    if args.quasi and code == EXIT_QUASI:
        return EXIT_OK
    return code


# construct

def cmd_construct(args) -> int:
    s = ser.load_statistics(args.stats)
    try:
        model = construct_model(s, tol=args.tol, quasi=args.quasi)
    except ConstructionRefusedError as exc:
        hint = "" if args.quasi else " (use --quasi to allow quasi-stochastic models)"
        _emit(args, {"refused": True, "reason": str(exc), "verdict": exc.verdict.to_dict()},
              [f"refused: {exc}{hint}"])
        return EXIT_INCONSISTENT
    dev = evaluate_model(model).max_abs_diff(s)
    ser.save_model(args.out, model)
    _emit(args, {"refused": False, "out": str(args.out), "n": model.n, "n_env": model.n_env,
                 "quasi": model.quasi, "max_deviation": dev},
          [f"wrote {args.out}: n={model.n}, n_env={model.n_env}, quasi={model.quasi}",
           f"re-evaluated statistics deviate by {dev:.3e}"])
    return EXIT_OK


# simulate

def parse_random_spec(tokens: list, seed: int | None) -> dict:
    """``["d=2", "seed=3"]`` -> ``{"d": 2, "d_e": 2, "seed": 3}``."""
    spec = {"d": 2, "d_e": None, "seed": seed}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if not sep or key not in ("d", "d_e", "seed"):
            raise UsageError(f"bad --random item {tok!r}; expected d=<int>, d_e=<int> or seed=<int>")
        try:
            spec[key] = int(value)
        except ValueError:
            raise UsageError(f"bad --random item {tok!r}: {value!r} is not an integer") from None
    if spec["d_e"] is None:
        spec["d_e"] = spec["d"]
    if spec["d"] < 2 or spec["d_e"] < 1:
        raise UsageError("--random needs d >= 2 and d_e >= 1")
    return spec


def random_scenario(d: int, d_e: int, seed) -> QuantumScenario:
    """Random IC-POVM, Haar unitaries and a Hilbert-Schmidt random joint state."""
    rng = np.random.default_rng(seed)
    povm = random_povm(d, rng)
    dim = d * d_e
    return QuantumScenario(d, d_e, random_density(dim, rng), random_unitary(dim, rng),
                           random_unitary(dim, rng), povm)


def cmd_simulate(args) -> int:
    sources = [args.scenario is not None, args.fixture is not None, args.random is not None]
    if sum(sources) != 1:
        raise UsageError("simulate needs exactly one of SCENARIO, --fixture or --random")
    if args.scenario is not None:
        sc = ser.load_scenario(args.scenario)
    elif args.fixture is not None:
        sc = sic_qubit_fixture().scenario()
    else:
        spec = parse_random_spec(args.random, args.seed)
        sc = random_scenario(spec["d"], spec["d_e"], spec["seed"])
    if args.scenario_out:
        ser.save_scenario(args.scenario_out, sc)
    s = born_statistics(sc)
    imm = imm_from_povm(sc.povm)
    meta = {"imm": imm.m.tolist(), "imm_condition": imm.condition}
    ser.save_statistics(args.out, s, metadata=meta)
    _emit(args, {"out": str(args.out), "alphabet_size": s.n, "imm_condition": imm.condition},
          [f"wrote {args.out}: alphabet size {s.n}, IMM condition {imm.condition:.4g}"])
    return EXIT_OK


# sample

def deviation_summary(emp, exact: dict) -> dict:
    """Per family: max |freq - p| in units of the exact standard error, and chi^2."""
    out = {}
    for name, freq in emp.frequencies.items():
        p = exact[name]
        sigma = np.sqrt(p * (1 - p) / emp.shots)
        diff = np.abs(freq - p)
        z = np.where(sigma > 0, diff / np.where(sigma > 0, sigma, 1), np.where(diff > 0, np.inf, 0.0))
        live = p > 0
        chi2 = float(np.sum((freq[live] - p[live]) ** 2 / p[live]) * emp.shots)
        out[name] = {"max_sigma": float(z.max()), "chi2": chi2, "cells": int(live.sum())}
    return out


def cmd_sample(args) -> int:
    model = ser.load_model(args.model)
    r1 = args.r1
    if "reprepare" in args.context and r1 is None:
        r1 = 0
    try:
        emp = sample_trajectories(model, args.context, args.shots, seed=args.seed, r1=r1)
    except SamplingError as exc:
        _emit(args, {"refused": True, "reason": str(exc)},
              [f"refused: {exc}", "negative weights have no frequency interpretation"])
        return EXIT_INCONSISTENT
    exact = analytic_counterpart(evaluate_model(model), emp)
    summary = deviation_summary(emp, exact)
    payload = {
        "context": emp.context, "r1": emp.r1, "shots": emp.shots, "seed": args.seed,
        "frequencies": {k: v.tolist() for k, v in emp.frequencies.items()},
        "stderr": {k: v.tolist() for k, v in emp.stderr.items()},
        "analytic": {k: v.tolist() for k, v in exact.items()},
        "deviation": summary,
    }
    text = [f"context {emp.context}" + (f", r1={emp.r1}" if emp.r1 is not None else "")
            + f", {emp.shots} shots, seed {args.seed}"]
    with np.printoptions(precision=5, suppress=True):
        for name, freq in emp.frequencies.items():
            text.append(f"{name}:\n{freq}\n  +/- {emp.stderr[name].max():.2e} (max stderr)")
            d = summary[name]
            text.append(f"  max deviation {d['max_sigma']:.2f} sigma, chi2 {d['chi2']:.2f} over {d['cells']} cells")
    _emit(args, payload, text)
    return EXIT_OK


# repro

def cmd_repro(args) -> int:
    results = run_repro(args.target)
    payload = {"passed": all(r.passed for r in results), "results": [r.to_dict() for r in results]}
    text = []
    for r in results:
        text.append(f"[{'PASS' if r.passed else 'FAIL'}] {r.target}: max deviation {r.max_deviation:.3e}"
                    f" ({r.elapsed * 1e3:.2f} ms)")
        text += [f"    {line}" for line in r.lines]
        with np.printoptions(precision=6, suppress=True):
            text.append(f"    computed:\n{np.asarray(r.computed)}")
    text.append("overall: " + ("PASS" if payload["passed"] else "FAIL"))
    _emit(args, payload, text)
    return EXIT_OK if payload["passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="equality tolerance (default 1e-9, or $CLASSIM_TOL)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed")

    p = argparse.ArgumentParser(prog="classim", description=__doc__.splitlines()[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--json", action="store_true", default=False)
    p.add_argument("--seed", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="classify a statistics file")
    c.add_argument("stats")
    c.add_argument("--quasi", action="store_true", help="treat quasi_classical as success (exit 0)")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("construct", parents=[common], help="build the canonical model")
    c.add_argument("stats")
    c.add_argument("--out", required=True)
    c.add_argument("--quasi", action="store_true", help="allow a quasi-stochastic model")
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("simulate", parents=[common], help="Born-rule statistics of a scenario")
    c.add_argument("scenario", nargs="?")
    c.add_argument("--out", required=True)
    c.add_argument("--fixture", choices=["sic-qubit"])
    c.add_argument("--random", nargs="+", metavar="KEY=VALUE", help="d=<int> [d_e=<int>] [seed=<int>]")
    c.add_argument("--scenario-out", help="also write the scenario that was simulated")
    c.set_defaults(func=cmd_simulate)

    c = sub.add_parser("sample", parents=[common], help="Monte Carlo trajectories of a model")
    c.add_argument("model")
    c.add_argument("--shots", type=int, default=100_000)
    c.add_argument("--context", choices=CONTEXTS, default="measure")
    c.add_argument("--r1", type=int, default=None, help="re-preparation label (default 0)")
    c.set_defaults(func=cmd_sample)

    c = sub.add_parser("repro", parents=[common], help="golden-value reproduction")
    c.add_argument("target", choices=[*REPRO_TARGETS, "all"])
    c.set_defaults(func=cmd_repro)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        if args.tol is None:
            args.tol = default_tol()
        elif not args.tol > 0:
            raise UsageError("--tol must be positive")
        return args.func(args)
    except (ClassimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
