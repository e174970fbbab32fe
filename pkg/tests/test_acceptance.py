"""Acceptance criteria 1-10, one pass/fail line each.

Run under pytest (lines appear in the terminal summary) or directly:
    python3 tests/test_acceptance.py
"""

import io as stdio
import json
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))
from conftest import crandn, random_additive_solution, random_nilpotent, strip_spectrum_matrix, unit_disk  # noqa: E402

from quivermonodromy import io  # noqa: E402
from quivermonodromy.additive import SummandDescriptor, lifting_criterion, lifting_value  # noqa: E402
from quivermonodromy.cli import main as cli_main  # noqa: E402
from quivermonodromy.dynkin import double_hom_dimension, dynkin_quiver, exp_functor_on_rep, sample_pi_solution  # noqa: E402
from quivermonodromy.fuchsian import (  # noqa: E402
    FuchsianSystem,
    Loop,
    compare_with_algebraic,
    hilbert21_demo,
    keyhole_monodromies,
    total_monodromy_check,
)
from quivermonodromy.matfun import exp_2pii, hom_dimension, jordan_block, phi_times, rank_sequence  # noqa: E402
from quivermonodromy.multiplicative import check_arrow_relations  # noqa: E402
from quivermonodromy.quiver_model import EigenvalueSet, WeightData, p1_quiver  # noqa: E402
from quivermonodromy.transform import (  # noqa: E402
    CyclicRep,
    cyclic_exp,
    cyclic_log,
    cyclic_reps_equal,
    forward_transform,
    inverse_transform,
    max_rep_difference,
)

EX = Path(__file__).resolve().parents[1] / "docs" / "examples"
ZERO, STRIP = EigenvalueSet.zero(), EigenvalueSet.strip()
RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def one_arrow():
    return p1_quiver(["P", "Q"], [("a", "P", "Q")])


def star():
    return p1_quiver(["c", "x", "y", "z"], [("a", "x", "c"), ("b", "y", "c"), ("d", "c", "z")])


def scale_of(mats):
    return max([1.0] + [float(np.abs(M).max()) for M in mats if np.size(M)])


def test_criterion_01_fundamental_identity():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst_rel = worst_abs = 0.0
    count = 0
    for n in range(1, 7):
        for m in range(1, 7):
            for _ in range(6):
                A, B = unit_disk(rng, n, m), unit_disk(rng, m, n)
                rhs = exp_2pii(A @ B)
                d = np.linalg.norm(np.eye(n) + phi_times(A, B @ A) @ B - rhs)
                worst_abs = max(worst_abs, d)
                worst_rel = max(worst_rel, d / max(1.0, np.linalg.norm(rhs)))
                count += 1
    dt = time.perf_counter() - t0
    record(1, count >= 200 and worst_rel <= 1e-10 and dt < 5,
           f"{count} pairs, max defect {worst_rel:.2e} relative to max(1, |exp|) (absolute {worst_abs:.2e}), {dt:.2f}s")


def random_cyclic_nilpotent(rng, m, dims):
    P = [crandn(rng, d, d) + 2 * np.eye(d) for d in dims]
    maps = []
    for k in range(m):
        a = np.triu(crandn(rng, dims[k], dims[k - 1], scale=0.6), 1 if k == 0 else 0)
        maps.append(P[k] @ a @ np.linalg.inv(P[k - 1]))
    return CyclicRep(tuple(dims), tuple(maps))


def random_cyclic_strip(rng, m, n):
    others = [crandn(rng, n, n) + 2 * np.eye(n) for _ in range(m - 1)]
    tail = np.eye(n, dtype=complex)
    for a in others:
        tail = a @ tail
    return CyclicRep((n,) * m, (np.linalg.solve(tail, strip_spectrum_matrix(rng, n)), *others))


def test_criterion_02_round_trips():
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    worst = {"forward nilpotent": 0.0, "forward strip": 0.0, "cyclic nilpotent": 0.0, "cyclic strip": 0.0}
    counts = dict.fromkeys(worst, 0)
    for k in range(100):
        for kind, T in (("nilpotent", ZERO), ("strip", STRIP)):
            g = one_arrow() if k % 2 else star()
            dims = {c.id: int(rng.integers(1, 4)) for c in g.components}
            lam = {p.id: 0.3 * complex(rng.normal(), rng.normal()) for p in g.marked_points}
            w = WeightData(lam)
            rep = random_additive_solution(rng, g, dims, lam, kind)
            mrep = forward_transform(g, w, rep, T)
            back = inverse_transform(g, w, mrep, T)
            again = forward_transform(g, w, back, T)
            s = scale_of([M for pair in mrep.arrow_maps.values() for M in pair] + list(mrep.point_monodromies.values()))
            d = max(max_rep_difference(back, rep), max_rep_difference(again, mrep)) / s
            worst[f"forward {kind}"] = max(worst[f"forward {kind}"], d)
            counts[f"forward {kind}"] += 1

            m = int(rng.integers(1, 5))
            if kind == "nilpotent":
                c = random_cyclic_nilpotent(rng, m, [int(x) for x in rng.integers(1, 4, m)])
            else:
                c = random_cyclic_strip(rng, m, int(rng.integers(1, 5)))
            img = cyclic_exp(c, T)
            s = scale_of(c.maps + img.maps)
            d = max(cyclic_reps_equal(cyclic_log(img, T), c), cyclic_reps_equal(cyclic_exp(cyclic_log(c, T), T), c)) / s
            worst[f"cyclic {kind}"] = max(worst[f"cyclic {kind}"], d)
            counts[f"cyclic {kind}"] += 1
    dt = time.perf_counter() - t0
    ok = all(worst[k] <= (1e-12 if "nilpotent" in k else 1e-9) for k in worst) and min(counts.values()) >= 100 and dt < 10
    detail = ", ".join(f"{k} {worst[k]:.1e}" for k in worst)
    record(2, ok, f"100 inputs each; max relative differences: {detail}; {dt:.2f}s")


def test_criterion_03_relation_transport():
    rng = np.random.default_rng(303)
    worst, count = 0.0, 0
    for k in range(120):
        g = one_arrow() if k % 2 else star()
        dims = {c.id: int(rng.integers(1, 4)) for c in g.components}
        lam = {p.id: 0.3 * complex(rng.normal(), rng.normal()) for p in g.marked_points}
        w = WeightData(lam)
        rep = random_additive_solution(rng, g, dims, lam, "strip" if k % 3 else "nilpotent")
        mrep = forward_transform(g, w, rep, STRIP)
        worst = max(worst, check_arrow_relations(g, w, mrep, 1e-9).max_defect)
        count += 1
    record(3, count >= 100 and worst <= 1e-9, f"{count} exact additive solutions (one-arrow and star), max arrow-relation defect {worst:.2e}")


def test_criterion_04_jordan_covariance():
    bad = []
    for n in range(1, 6):
        for lam in (0, 1 / 3, 0.25j):
            cyc = cyclic_exp(CyclicRep.B(jordan_block(n, lam)), STRIP).cycle()
            mu = np.exp(2j * np.pi * lam) - 1
            if rank_sequence(cyc, mu, 1e-8) != rank_sequence(jordan_block(n, mu), mu, 1e-8):
                bad.append((n, lam))
    record(4, not bad, f"15 Jordan blocks J_n(lambda), n <= 5, lambda in {{0, 1/3, i/4}}; mismatches {bad}")


def test_criterion_05_hom_preservation():
    rng = np.random.default_rng(505)
    mismatches, pairs = 0, {}
    for _ in range(100):
        m = int(rng.integers(1, 5))
        x = random_cyclic_nilpotent(rng, m, [int(d) for d in rng.integers(1, 4, m)])
        y = random_cyclic_nilpotent(rng, m, [int(d) for d in rng.integers(1, 4, m)])
        fx, fy = cyclic_exp(x, ZERO), cyclic_exp(y, ZERO)
        arrows, dx, mx = x.as_quiver_rep()
        _, dy, my = y.as_quiver_rep()
        _, fdx, fmx = fx.as_quiver_rep()
        _, fdy, fmy = fy.as_quiver_rep()
        if hom_dimension(arrows, dx, mx, dy, my) != hom_dimension(arrows, fdx, fmx, fdy, fmy):
            mismatches += 1
    pairs["Q_m"] = 100
    for kind in ("A2", "A3", "D4"):
        q = dynkin_quiver(kind)
        for _ in range(100):
            X, Y = (sample_pi_solution(q, {v: int(rng.integers(0, 3)) for v in q.vertices}, rng) for _ in range(2))
            if double_hom_dimension(X, Y) != double_hom_dimension(exp_functor_on_rep(X), exp_functor_on_rep(Y)):
                mismatches += 1
        pairs[kind] = 100
    record(5, mismatches == 0, f"pairs {pairs}, Hom-dimension mismatches {mismatches}")


def test_criterion_06_numeric_vs_algebraic():
    rng = np.random.default_rng(606)
    t0 = time.perf_counter()
    cases = {"diag(1/3)": np.array([[1 / 3]]), "J2(0)": jordan_block(2), "random dim 3": strip_spectrum_matrix(rng, 3)}
    worst = {}
    for name, R in cases.items():
        report = compare_with_algebraic(FuchsianSystem.disk_model(R), Loop.circle(0, 1), tol=1e-6)
        assert report.items[0].name == "direct"
        worst[name] = report.max_defect
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-6 and dt < 10
    record(6, ok, "direct defects " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f" (rtol 1e-10), {dt:.2f}s")


def test_criterion_07_global_product():
    worst_prod = worst_det = 0.0
    n = 0
    for seed in range(20):
        rng = np.random.default_rng([707, seed])
        R = [crandn(rng, 2, 2, scale=0.4) for _ in range(2)]
        R.append(-R[0] - R[1])
        pos = [complex(*rng.uniform(-1, 1, 2)) for _ in range(3)]
        while min(abs(a - b) for i, a in enumerate(pos) for b in pos[i + 1 :]) < 0.3:
            pos = [complex(*rng.uniform(-1, 1, 2)) for _ in range(3)]
        sys_ = FuchsianSystem(tuple(pos), tuple(R), 2)
        worst_prod = max(worst_prod, total_monodromy_check(sys_, tol=1e-6).max_defect)
        for k, M in keyhole_monodromies(sys_).items():
            worst_det = max(worst_det, abs(np.linalg.det(M) - np.exp(-2j * np.pi * np.trace(R[k]))))
        n += 1
    record(7, n >= 20 and worst_prod <= 1e-6 and worst_det <= 1e-6,
           f"{n} three-pole systems, max |product - I| {worst_prod:.1e}, max det defect {worst_det:.1e}")


def test_criterion_08_lifting():
    v1 = lifting_criterion({"X": 0}, [SummandDescriptor({"X": 2}, {"X": 0})])
    v2 = lifting_criterion({"X": 1}, [SummandDescriptor({"X": 1}, {"X": -1})])
    v3 = lifting_criterion({"X": 0.5}, [SummandDescriptor({"X": 1}, {"X": 0})])
    examples = v1.exists and v2.exists and not v3.exists and v3.values == [0.5]
    rng = np.random.default_rng(808)
    failures = 0
    for _ in range(100):
        s = []
        for _ in range(2):
            ranks = {c: int(rng.integers(0, 4)) for c in "ABC"}
            s.append(SummandDescriptor(ranks, {c: int(rng.integers(-5, 6)) if r else 0 for c, r in ranks.items()}))
        lam = {c: int(rng.integers(-16, 17)) / 8 for c in "ABC"}  # dyadic: float sums are exact
        if lifting_value(lam, s[0] + s[1]) != lifting_value(lam, s[0]) + lifting_value(lam, s[1]):
            failures += 1
    record(8, examples and failures == 0, f"three examples {'reproduced' if examples else 'WRONG'}, additivity failures {failures}/100")


def test_criterion_09_dynkin_pipeline():
    t0 = time.perf_counter()
    summary = {}
    ok = True
    for kind in ("A2", "A3", "D4"):
        out = stdio.StringIO()
        code = cli_main(["dynkin", "--type", kind, "--dims", "2", "--samples", "200", "--tol", "1e-9", "--seed", "0"], out)
        d = json.loads(out.getvalue())
        summary[kind] = (d["relation_failures"], d["hom_mismatches"])
        ok = ok and code == 0 and d["relation_failures"] == 0 and d["hom_mismatches"] == 0 and d["samples"] == 200
    dt = time.perf_counter() - t0
    record(9, ok and dt < 60, f"200 samples each, dims <= 2, (relation failures, Hom mismatches) {summary}, {dt:.1f}s")


def test_criterion_10_hilbert21():
    t0 = time.perf_counter()
    d = io.load_json(EX / "star_d4.json")
    gamma, weights = io.quiver_from_json(d["quiver"])
    rep = io.connection_rep_from_json(d["representation"])
    report = hilbert21_demo(gamma, weights, rep, orders=d["orders"], tol=1e-6)
    mons = report.data["monodromies"]
    uni = max(np.linalg.norm((M - np.eye(len(M))) @ (M - np.eye(len(M)))) for M in mons.values())
    prod = report.item("product of monodromies").defect
    dt = time.perf_counter() - t0
    record(10, d["orders"] == [2, 2, 2] and uni <= 1e-6 and prod <= 1e-6 and dt < 10,
           f"committed D4 star, max |(M_k - I)^2| {uni:.1e}, |product - I| {prod:.1e}, {dt:.2f}s")


if __name__ == "__main__":
    tests = [f for name, f in sorted(globals().items()) if name.startswith("test_criterion")]
    failed = 0
    for f in tests:
        try:
            f()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
