import cmath
from pathlib import Path

import numpy as np
import pytest

from conftest import crandn, random_additive_solution, strip_spectrum_matrix
from quivermonodromy import io
from quivermonodromy.additive import ConnectionSystemRep
from quivermonodromy.errors import (
    AtPole,
    ClearanceViolated,
    MultiplePolesEnclosed,
    NonNilpotentResidue,
    RelationDefect,
    ValidationError,
)
from quivermonodromy.fuchsian import (
    Arc,
    FuchsianSystem,
    Loop,
    Segment,
    check_clearance,
    compare_with_algebraic,
    default_base,
    evaluate_A,
    hilbert21_demo,
    keyhole_loops,
    keyhole_monodromies,
    monodromy_along,
    total_monodromy_check,
)
from quivermonodromy.matfun import exp_2pii, jordan_block
from quivermonodromy.multiplicative import MonodromyRep, check_arrow_relations
from quivermonodromy.quiver_model import EigenvalueSet, WeightData, p1_quiver
from quivermonodromy.transform import forward_transform

EXAMPLES = Path(__file__).resolve().parents[1] / "docs" / "examples"
J2 = jordan_block(2)


def three_pole(seed, dim=2, scale=0.4):
    rng = np.random.default_rng(seed)
    R = [crandn(rng, dim, dim, scale=scale) for _ in range(2)]
    R.append(-R[0] - R[1])
    pos = [0j, 1 + 0j, 0.3 + 0.9j]
    return FuchsianSystem(tuple(pos), tuple(R), dim)


def test_evaluate_A_examples():
    R = np.array([[1, 2], [3, 4]], dtype=complex)
    assert np.array_equal(evaluate_A(FuchsianSystem.disk_model(R), 1), R)
    two = FuchsianSystem((0, 1), (R, -R), 2)
    assert np.allclose(evaluate_A(two, 2), -R / 2, atol=0)
    assert np.array_equal(evaluate_A(FuchsianSystem((), (), 3), 0.5j), np.zeros((3, 3)))
    with pytest.raises(AtPole):
        evaluate_A(two, 1)


def test_system_validation():
    with pytest.raises(ValidationError):
        FuchsianSystem((0, 1), (np.eye(2), np.eye(2)), 2)  # unbalanced
    with pytest.raises(ValidationError):
        FuchsianSystem((0, 0), (np.eye(2), -np.eye(2)), 2)
    with pytest.raises(ValidationError):
        Loop.polyline([1, 1j, -1])
    with pytest.raises(ValidationError):
        Loop.circle(0, 0.0)


def test_monodromy_examples():
    M = monodromy_along(FuchsianSystem.disk_model([[1 / 3]]), Loop.circle())
    assert abs(M[0, 0] - cmath.exp(-2j * cmath.pi / 3)) < 1e-8
    Z = monodromy_along(FuchsianSystem((0, 2), (np.zeros((2, 2)), np.zeros((2, 2))), 2), Loop.circle(0, 1))
    assert np.abs(Z - np.eye(2)).max() < 1e-12
    M = monodromy_along(FuchsianSystem.disk_model(J2), Loop.circle())
    assert np.abs(M - (np.eye(2) - 2j * np.pi * J2)).max() < 1e-8


def test_clearance_violation():
    sys = FuchsianSystem((0, 1), (J2, -J2), 2)
    with pytest.raises(ClearanceViolated):
        monodromy_along(sys, Loop.circle(0, 0.95))


def test_total_monodromy_examples():
    assert total_monodromy_check(FuchsianSystem((0,), (np.zeros((2, 2)),), 2)).passed
    R = np.array([[0.2, 0.5], [0.1, -0.3]], dtype=complex)
    assert total_monodromy_check(FuchsianSystem((0, 1), (R, -R), 2)).passed
    for seed in range(3):
        report = total_monodromy_check(three_pole(seed))
        assert report.passed and report.max_defect < 1e-6


def test_total_monodromy_is_order_sensitive():
    sys = three_pole(0)
    right = total_monodromy_check(sys)
    order = [int(s) for s in right.items[0].detail.split("[")[1].rstrip("]").split(",")]
    wrong = total_monodromy_check(sys, ordering=order[::-1])
    assert right.passed and not wrong.passed


def test_compare_with_algebraic_examples():
    r = compare_with_algebraic(FuchsianSystem.disk_model([[1 / 3]]), Loop.circle(), tol=1e-8)
    assert r.passed and r.items[0].name == "direct"
    r = compare_with_algebraic(FuchsianSystem.disk_model(J2), Loop.circle(), tol=1e-8)
    assert r.passed
    # two poles with generic non-resonant residues: only conjugacy invariants are comparable
    rng = np.random.default_rng(4)
    R0 = strip_spectrum_matrix(rng, 2) * 0.5
    sys = FuchsianSystem((0, 2), (R0, -R0), 2)
    r = compare_with_algebraic(sys, Loop.circle(0, 1), tol=1e-6)
    assert r.passed and r.items[0].name == "charpoly"


def test_compare_rejects_multiple_poles():
    sys = FuchsianSystem((0, 1), (J2, -J2), 2)
    with pytest.raises(MultiplePolesEnclosed):
        compare_with_algebraic(sys, Loop.circle(0.5, 2))
    with pytest.raises(ValidationError):
        compare_with_algebraic(sys, Loop.circle(5, 1))


@pytest.mark.parametrize("seed", range(4))
def test_det_identity(seed):
    sys = three_pole(seed)
    # a loop around poles 0 and 1 only
    loop = Loop.polyline([-0.4 - 0.3j, 1.4 - 0.3j, 1.4 + 0.4j, -0.4 + 0.4j, -0.4 - 0.3j])
    M = monodromy_along(sys, loop)
    expected = np.exp(-2j * np.pi * (np.trace(sys.residues[0]) + np.trace(sys.residues[1])))
    assert abs(np.linalg.det(M) - expected) < 1e-6
    for k, Mk in keyhole_monodromies(sys).items():
        assert abs(np.linalg.det(Mk) - np.exp(-2j * np.pi * np.trace(sys.residues[k]))) < 1e-6


def test_reversal_inverts():
    sys = three_pole(1)
    loop = Loop.circle(0, 0.5, basepoint_angle=1.0)
    M, Mr = monodromy_along(sys, loop), monodromy_along(sys, loop.reversed())
    assert np.abs(Mr @ M - np.eye(2)).max() < 1e-6
    assert loop.reversed().winding_number(0) == -1


def test_homotopy_invariance():
    rng = np.random.default_rng(2)
    R = crandn(rng, 3, 3, scale=0.5)
    sys = FuchsianSystem((0, 3), (R, -R), 3)
    M5 = monodromy_along(sys, Loop.circle(0, 0.5))
    M9 = monodromy_along(sys, Loop.circle(0, 0.9))
    # different base points: conjugate monodromies
    assert np.abs(power_sums(M5) - power_sums(M9)).max() < 1e-6
    # same base point 0.9: go in to radius 0.5, around, and back out
    detour = Loop((Segment(0.9, 0.5), Arc(0j, 0.5, 0.0, 2 * np.pi), Segment(0.5, 0.9)))
    assert np.abs(monodromy_along(sys, detour) - M9).max() < 1e-6


def power_sums(M):
    return np.array([np.trace(np.linalg.matrix_power(M, k)) for k in range(1, M.shape[0] + 1)])


@pytest.mark.parametrize("seed", range(3))
def test_end_to_end_one_arrow(seed):
    rng = np.random.default_rng(seed)
    g = p1_quiver(["P", "Q"], [("a", "P", "Q")])
    dims = {"P": 2, "Q": 2}
    lam = {"a.t": 0.1 + 0.05j, "a.h": -0.2}
    w = WeightData(lam)
    rep = random_additive_solution(rng, g, dims, lam)
    mrep = forward_transform(g, w, rep, EigenvalueSet.strip())
    numeric = {}
    for p in g.marked_points:
        R = rep.residues[p.id]
        r = compare_with_algebraic(FuchsianSystem.disk_model(R, p.position), Loop.circle(p.position, 1.0), tol=1e-6)
        assert r.passed, r.to_text()
        numeric[p.id] = r.data["monodromy"]
    assembled = MonodromyRep(dims, numeric, mrep.arrow_maps)
    assert check_arrow_relations(g, w, assembled, 1e-6).passed


def load_star():
    d = io.load_json(EXAMPLES / "star_d4.json")
    gamma, weights = io.quiver_from_json(d["quiver"])
    return gamma, weights, io.connection_rep_from_json(d["representation"]), d["orders"]


def test_hilbert21_committed_example():
    gamma, weights, rep, orders = load_star()
    report = hilbert21_demo(gamma, weights, rep, orders=orders)
    assert report.passed, report.to_text()
    assert len(report.data["monodromies"]) == 3
    for M in report.data["monodromies"].values():
        U = M - np.eye(M.shape[0])
        assert np.linalg.norm(U @ U) <= 1e-6
        assert np.linalg.norm(U) > 1e-3  # not trivially the identity


def test_hilbert21_zero_and_rejections():
    gamma, weights, rep, orders = load_star()
    zero = ConnectionSystemRep.zero(gamma, rep.dims)
    report = hilbert21_demo(gamma, weights, zero, orders=orders)
    assert report.passed
    assert all(np.abs(M - np.eye(M.shape[0])).max() < 1e-12 for M in report.data["monodromies"].values())
    # break the balance at the centre: relations then fail before any integration
    centre_pt = next(p for p in rep.residues if gamma.component_of(p) == "c")
    bad = ConnectionSystemRep(rep.dims, {**rep.residues, centre_pt: rep.residues[centre_pt] + np.eye(4)}, rep.arrow_maps)
    with pytest.raises(RelationDefect):
        hilbert21_demo(gamma, weights, bad, orders=orders)
    with pytest.raises(NonNilpotentResidue):
        hilbert21_demo(gamma, weights, rep, orders=[1, 1, 1])


def test_default_base_below_poles_when_clear():
    sys = three_pole(0)
    b = default_base(sys)
    assert all(b.imag < p.imag for p in sys.positions)


def test_keyholes_clear_vertically_aligned_poles():
    R = np.array([[0.1, 0.2], [0.0, -0.1]], dtype=complex)
    S = np.array([[0.0, 0.0], [0.3, 0.05]], dtype=complex)
    sys = FuchsianSystem((0.7 - 0.8j, 0.71 + 0.5j, -0.5 + 0j), (R, S, -R - S), 2)
    for loop in keyhole_loops(sys).values():
        check_clearance(sys, loop)
    assert total_monodromy_check(sys).passed


def test_hilbert21_small_star():
    """Centre of dimension 2, arms of dimension 1: rank one nilpotent residues."""
    from quivermonodromy.dynkin import sample_pi_solution
    from quivermonodromy.quiver_model import Arrow, Component, ComponentQuiver, MarkedPoint, RiemannSurfaceQuiver

    cq = ComponentQuiver(("c", "1", "2", "3"), (("a1", "1", "c"), ("a2", "2", "c"), ("a3", "3", "c")))
    rng = np.random.default_rng(5)
    for _ in range(50):
        X = sample_pi_solution(cq, {"c": 2, "1": 1, "2": 1, "3": 1}, rng)
        if min(np.linalg.norm(x @ xs) for x, xs in X.maps.values()) > 0.1:
            break
    pos = {"a1": -1 + 0j, "a2": 1 + 0j, "a3": 1j}
    points = [MarkedPoint(f"{a}.t", t, 0j) for a, t, _ in cq.arrows] + [MarkedPoint(f"{a}.h", "c", pos[a]) for a, _, _ in cq.arrows]
    gamma = RiemannSurfaceQuiver(
        tuple(Component(v) for v in cq.vertices), tuple(points), tuple(Arrow(a, f"{a}.t", f"{a}.h") for a, _, _ in cq.arrows)
    )
    res = {}
    for a, (x, xs) in X.maps.items():
        res[f"{a}.t"], res[f"{a}.h"] = xs @ x, -x @ xs
    rep = ConnectionSystemRep(X.dims, res, X.maps)
    report = hilbert21_demo(gamma, WeightData.zero(gamma), rep)
    assert report.passed, report.to_text()
    assert all(np.linalg.norm(M - np.eye(2)) > 1e-3 for M in report.data["monodromies"].values())
