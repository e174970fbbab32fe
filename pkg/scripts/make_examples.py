"""Regenerate the example files in docs/examples (one per JSON schema).

    python3 scripts/make_examples.py [--out docs/examples] [--seed 7]
"""

import argparse
from pathlib import Path

import numpy as np

from quivermonodromy import io
from quivermonodromy.additive import ConnectionSystemRep, check_residue_relations
from quivermonodromy.dynkin import sample_pi_solution
from quivermonodromy.matfun import jordan_block
from quivermonodromy.quiver_model import (
    Arrow,
    Component,
    ComponentQuiver,
    EigenvalueSet,
    MarkedPoint,
    RiemannSurfaceQuiver,
    WeightData,
)
from quivermonodromy.transform import forward_transform


def one_arrow():
    gamma = RiemannSurfaceQuiver(
        (Component("P"), Component("Q")),
        (MarkedPoint("p", "P", 0j), MarkedPoint("q", "Q", 0j)),
        (Arrow("a", "p", "q"),),
    )
    return gamma, WeightData.zero(gamma)


def d4_star(seed, centre_dim=4, arm_dim=2, tries=500):
    """Arms 1, 2, 3 with one arrow each into the centre; residues on the centre are -x x^*.

    With x^* x = 0 on the arms, each central residue squares to zero, so n_k = 2.
    Draws are repeated until the three residues are nonzero and pairwise non-commuting.
    """
    cq = ComponentQuiver(("c", "1", "2", "3"), (("a1", "1", "c"), ("a2", "2", "c"), ("a3", "3", "c")))
    dims = {"c": centre_dim, "1": arm_dim, "2": arm_dim, "3": arm_dim}
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        X = sample_pi_solution(cq, dims, rng)
        Rs = [-x @ xs for x, xs in X.maps.values()]
        norms = [np.linalg.norm(R) for R in Rs]
        if min(norms) < 0.1:
            continue
        comm = min(
            np.linalg.norm(Rs[i] @ Rs[j] - Rs[j] @ Rs[i]) / (norms[i] * norms[j]) for i in range(3) for j in range(i + 1, 3)
        )
        if comm > 0.1:
            break
    else:
        raise RuntimeError("no non-commuting sample found")
    positions = {"a1.h": -1 + 0j, "a2.h": 1 + 0j, "a3.h": 1j}
    comps = tuple(Component(v) for v in cq.vertices)
    points, arrows, residues, maps = [], [], {}, {}
    for aid, t, h in cq.arrows:
        points += [MarkedPoint(f"{aid}.t", t, 0j), MarkedPoint(f"{aid}.h", h, positions[f"{aid}.h"])]
        arrows.append(Arrow(aid, f"{aid}.t", f"{aid}.h"))
        x, xs = X.maps[aid]
        maps[aid] = (x, xs)
        residues[f"{aid}.t"] = xs @ x
        residues[f"{aid}.h"] = -x @ xs
    gamma = RiemannSurfaceQuiver(comps, tuple(points), tuple(arrows))
    rep = ConnectionSystemRep(dims, residues, maps)
    weights = WeightData.zero(gamma)
    assert check_residue_relations(gamma, weights, rep, 1e-12).passed
    return gamma, weights, rep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "docs" / "examples"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    gamma, w = one_arrow()
    io.dump_json(io.quiver_to_json(gamma, w), out / "quiver_one_arrow.json")
    rep = ConnectionSystemRep(
        {"P": 1, "Q": 1}, {"p": [[0.5]], "q": [[-0.5]]}, {"a": ([[1.0]], [[0.5]])}
    )
    io.dump_json(io.connection_rep_to_json(rep), out / "rep_additive_scalar.json")
    mrep = forward_transform(gamma, w, rep, EigenvalueSet.strip())
    io.dump_json(io.monodromy_rep_to_json(mrep), out / "rep_multiplicative_scalar.json")

    io.dump_json({"kind": "finite", "values": [[0.0, 0.0], [0.5, 0.0]]}, out / "T_finite.json")
    io.dump_json(
        {"lambda": {"P": [1.0, 0.0]}, "summands": [{"ranks": {"P": 1}, "degrees": {"P": -1}}]},
        out / "summands.json",
    )

    io.dump_json(
        {"dim": 1, "poles": [{"position": [0.0, 0.0], "residue": io.matrix_to_json([[1 / 3]])}]},
        out / "system_disk.json",
    )
    io.dump_json(
        {"dim": 2, "poles": [{"position": [0.0, 0.0], "residue": io.matrix_to_json(jordan_block(2, 0))}]},
        out / "system_jordan.json",
    )
    rng = np.random.default_rng(args.seed)
    R = [(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) * 0.2 for _ in range(2)]
    R.append(-R[0] - R[1])
    poles = [{"position": io.complex_to_json(p), "residue": io.matrix_to_json(r)} for p, r in zip([-1, 1, 1j], R)]
    io.dump_json({"dim": 2, "balanced": True, "poles": poles}, out / "system_three_pole.json")
    io.dump_json({"circle": {"center": [0.0, 0.0], "radius": 1.0, "basepoint_angle": 0.0, "orientation": 1}}, out / "loop_circle.json")
    io.dump_json({"polyline": [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5]]}, out / "loop_polyline.json")

    gamma, w, rep = d4_star(args.seed)
    io.dump_json(io.quiver_to_json(gamma, w), out / "quiver_d4_star.json")
    io.dump_json(io.connection_rep_to_json(rep), out / "rep_additive_d4_star.json")
    io.dump_json(
        {"quiver": io.quiver_to_json(gamma, w), "representation": io.connection_rep_to_json(rep), "orders": [2, 2, 2]},
        out / "star_d4.json",
    )
    print(f"wrote examples to {out}")


if __name__ == "__main__":
    main()
