"""Sampled Pi(Q) -> Lambda^1(Q) checks over several Dynkin types and dimension bounds.

    python3 scripts/dynkin_sweep.py [--types A2 A3 D4 E6] [--bounds 1 2 3] [--samples 200] [--seeds 3]

Prints one row per (type, bound, seed); exit status 1 if any row fails.
"""

import argparse
import json
import time

from quivermonodromy.dynkin import verify_dynkin_corollary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--types", nargs="+", default=["A2", "A3", "A5", "D4", "D5", "E6"])
    ap.add_argument("--bounds", nargs="+", type=int, default=[1, 2, 3])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--json", help="also write all reports to this file")
    args = ap.parse_args()

    rows, bad = [], 0
    print(f"{'type':5} {'dims<=':6} {'seed':4} {'rel.max':>9} {'rel.fail':>8} {'rt.max':>9} {'hom.miss':>8} {'ind.miss':>8} {'time':>6}")
    for kind in args.types:
        for b in args.bounds:
            for seed in range(args.seeds):
                t0 = time.perf_counter()
                r = verify_dynkin_corollary(kind, args.samples, b, seed, args.tol)
                dt = time.perf_counter() - t0
                bad += not r.passed
                rows.append(r.to_dict())
                print(
                    f"{kind:5} {b:6d} {seed:4d} {r.relation_max_defect:9.1e} {r.relation_failures:8d} "
                    f"{r.roundtrip_max:9.1e} {r.hom_mismatches:8d} {r.indecomposable_mismatches:8d} {dt:5.1f}s"
                )
    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=2)
    print(f"{len(rows) - bad}/{len(rows)} configurations pass")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
