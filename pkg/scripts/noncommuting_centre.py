"""How the per-arrow exponential image fares at a branch vertex, against the true monodromy.

For a three-arm star with centre dimension d and arm dimension e, sample
Pi(Q)-representations, put the central residues R_k = -x_k x_k^* at three
poles, and compare
  * the Lambda^1 centre relation for rho^*_k = x^*_k phi(x_k x^*_k), q = 1;
  * the product of numerically integrated keyhole monodromies.
The first fails as soon as the R_k stop commuting; the second does not.

    python3 scripts/noncommuting_centre.py [--centre 4] [--arm 2] [--rows 5] [--seed 0]
"""

import argparse

import numpy as np

from quivermonodromy.dynkin import check_lambda1_relations, exp_functor_on_rep, sample_pi_solution
from quivermonodromy.fuchsian import FuchsianSystem, total_monodromy_check
from quivermonodromy.quiver_model import ComponentQuiver


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--centre", type=int, default=4)
    ap.add_argument("--arm", type=int, default=2)
    ap.add_argument("--rows", type=int, default=5, help="rows per class (commuting, non-commuting)")
    ap.add_argument("--max-draws", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cq = ComponentQuiver(("c", "1", "2", "3"), (("a1", "1", "c"), ("a2", "2", "c"), ("a3", "3", "c")))
    dims = {"c": args.centre, "1": args.arm, "2": args.arm, "3": args.arm}
    rng = np.random.default_rng(args.seed)
    rows = {"commuting": [], "non-commuting": []}
    draws = 0
    while min(len(v) for v in rows.values()) < args.rows and draws < args.max_draws:
        draws += 1
        X = sample_pi_solution(cq, dims, rng)
        R = [-x @ xs for x, xs in X.maps.values()]
        norms = [np.linalg.norm(r) for r in R]
        if min(norms) < 0.1:
            continue  # a (nearly) vanishing residue: nothing to compare
        comm = max(np.linalg.norm(R[i] @ R[j] - R[j] @ R[i]) / (norms[i] * norms[j]) for i in range(3) for j in range(i + 1, 3))
        kind = "non-commuting" if comm > 1e-6 else "commuting"
        if len(rows[kind]) >= args.rows:
            continue
        per_arrow = check_lambda1_relations(exp_functor_on_rep(X)).item("component c").defect
        numeric = total_monodromy_check(FuchsianSystem((-1 + 0j, 1 + 0j, 1j), tuple(R), args.centre)).max_defect
        rows[kind].append((comm, per_arrow, numeric))

    print(f"{'class':14} {'rel.commutator':>14} {'per-arrow':>10} {'numerical':>10}")
    for kind, vals in rows.items():
        for comm, per_arrow, numeric in vals:
            print(f"{kind:14} {comm:14.2e} {per_arrow:10.2e} {numeric:10.2e}")
    print(f"({draws} draws)")


if __name__ == "__main__":
    main()
