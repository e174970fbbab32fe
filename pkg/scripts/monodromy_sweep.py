"""Keyhole monodromy products and determinant identity for random three-pole systems, across rtol.

    python3 scripts/monodromy_sweep.py [--systems 20] [--dim 2] [--rtols 1e-6 1e-8 1e-10]

For each rtol prints the worst |M_k ... M_1 - I| and the worst
|det M_k - exp(-2 pi i tr R_k)| over the sampled systems.
"""

import argparse
import time

import numpy as np

from quivermonodromy.fuchsian import FuchsianSystem, IntegratorConfig, keyhole_monodromies, total_monodromy_check


def random_system(rng, dim, scale):
    R = [scale * (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2) for _ in range(2)]
    R.append(-R[0] - R[1])
    while True:
        pos = [complex(*rng.uniform(-1, 1, 2)) for _ in range(3)]
        if min(abs(a - b) for i, a in enumerate(pos) for b in pos[i + 1 :]) > 0.3:
            return FuchsianSystem(tuple(pos), tuple(R), dim)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--systems", type=int, default=20)
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--scale", type=float, default=0.4)
    ap.add_argument("--rtols", nargs="+", type=float, default=[1e-6, 1e-8, 1e-10])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    systems = [random_system(rng, args.dim, args.scale) for _ in range(args.systems)]
    print(f"{'rtol':>8} {'product':>10} {'det':>10} {'time':>7}")
    for rtol in args.rtols:
        cfg = IntegratorConfig(rtol=rtol, atol=rtol * 1e-2)
        t0 = time.perf_counter()
        prod = det = 0.0
        for s in systems:
            prod = max(prod, total_monodromy_check(s, cfg=cfg).max_defect)
            for k, M in keyhole_monodromies(s, cfg=cfg).items():
                det = max(det, abs(np.linalg.det(M) - np.exp(-2j * np.pi * np.trace(s.residues[k]))))
        print(f"{rtol:8.0e} {prod:10.2e} {det:10.2e} {time.perf_counter() - t0:6.2f}s")


if __name__ == "__main__":
    main()
