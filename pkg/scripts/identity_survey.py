"""Survey random qubit scenarios: equality residuals and how often hidden tables go negative.

    python3 scripts/identity_survey.py --count 500 --seed 0 [--d-env 2]
"""

import argparse

import numpy as np

from classim import Classification, check_conditions
from classim.quantum import QuantumScenario, born_statistics, random_density, random_povm, random_unitary

EQUALITIES = ("causality", "kcc_a1", "unmeasured_a2", "reprepare_same")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--d-env", type=int, default=2)
    ap.add_argument("--product", action="store_true", help="product initial states rho_S (x) tau")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    d_e = args.d_env
    dim = 2 * d_e
    residuals = {c: 0.0 for c in EQUALITIES + ("p_l1", "p_l2_l1")}
    worst = []
    counts = {c: 0 for c in Classification}
    for _ in range(args.count):
        povm = random_povm(2, rng)
        if args.product:
            rho0 = np.kron(random_density(2, rng), random_density(d_e, rng))
        else:
            rho0 = random_density(dim, rng)
        sc = QuantumScenario(2, d_e, rho0, random_unitary(dim, rng), random_unitary(dim, rng), povm)
        v = check_conditions(born_statistics(sc))
        for c in residuals:
            residuals[c] = max(residuals[c], v.residuals[c])
        counts[v.classification] += 1
        worst.append(v.worst_negative)

    print(f"{args.count} scenarios, d_S = 2, d_E = {d_e}, seed {args.seed}")
    for c, r in residuals.items():
        print(f"  max residual {c:<15} {r:.2e}")
    for c, k in counts.items():
        print(f"  {c.value:<16} {k}")
    q = np.percentile(worst, [5, 25, 50, 75, 95])
    print("  worst negative entry percentiles 5/25/50/75/95: " + " ".join(f"{x:.3f}" for x in q))


if __name__ == "__main__":
    main()
