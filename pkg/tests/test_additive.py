from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import crandn
from quivermonodromy.additive import (
    ConnectionSystemRep,
    SummandDescriptor,
    check_deformed_preprojective,
    check_eigenvalues_in_T,
    check_residue_relations,
    lifting_criterion,
    lifting_value,
)
from quivermonodromy.errors import GenusNotZero, ShapeMismatch, ValidationError
from quivermonodromy.matfun import jordan_block
from quivermonodromy.quiver_model import (
    Arrow,
    Component,
    EigenvalueSet,
    MarkedPoint,
    RiemannSurfaceQuiver,
    WeightData,
    p1_quiver,
)


def one_arrow(genus=0):
    return RiemannSurfaceQuiver(
        (Component("P", genus), Component("Q")),
        (MarkedPoint("p", "P"), MarkedPoint("q", "Q")),
        (Arrow("a", "p", "q"),),
    )


def rep_1(E, N, Rp, Rq, dp=None, dq=None):
    E, N = np.atleast_2d(E), np.atleast_2d(N)
    return ConnectionSystemRep({"P": E.shape[1], "Q": E.shape[0]}, {"p": Rp, "q": Rq}, {"a": (E, N)})


def test_zero_rep_passes():
    g = one_arrow()
    w = WeightData.zero(g)
    rep = ConnectionSystemRep.zero(g, {"P": 2, "Q": 3})
    assert check_residue_relations(g, w, rep).passed
    assert check_deformed_preprojective(g, w, rep).passed
    assert check_eigenvalues_in_T(g, rep, EigenvalueSet.zero()).passed


def test_residue_relation_jordan_example():
    g = one_arrow()
    w = WeightData.zero(g)
    J = jordan_block(2)
    assert check_residue_relations(g, w, rep_1(np.eye(2), J, J, -J)).passed
    report = check_residue_relations(g, w, rep_1(np.eye(2), J, J, J))
    assert [i.name for i in report.failures] == ["point q"]
    assert abs(report.item("point q").defect - 2 * np.linalg.norm(J)) < 1e-15


def test_residue_relation_shape_mismatch():
    g = one_arrow()
    with pytest.raises(ShapeMismatch):
        rep_1(np.eye(2), np.eye(2), np.eye(3), np.eye(2)).validate(g)


def test_deformed_preprojective_scalar_example():
    # lambda = -1 at the tail, 1 at the head, E = 1, nabla = -1: E nabla = -1 != 1 and -nabla E = 1 != -1
    g = one_arrow()
    w = WeightData({"p": -1, "q": 1})
    rep = rep_1([[1.0]], [[-1.0]], [[-2.0]], [[2.0]])
    report = check_deformed_preprojective(g, w, rep)
    assert report.item("component P").defect == pytest.approx(2.0, abs=1e-15)
    assert report.item("component Q").defect == pytest.approx(2.0, abs=1e-15)
    assert not report.item("component P").passed and not report.item("component Q").passed
    # with nabla = 1 both sides match
    ok = rep_1([[1.0]], [[1.0]], [[0.0]], [[0.0]])
    assert check_deformed_preprojective(g, w, ok).passed


def test_deformed_preprojective_a2_example():
    g = one_arrow()
    w = WeightData.zero(g)
    assert check_deformed_preprojective(g, w, rep_1([[1.0]], [[0.0]], [[0.0]], [[0.0]])).passed


def test_deformed_preprojective_rejects_genus():
    g = one_arrow(genus=1)
    w = WeightData.zero(g)
    rep = ConnectionSystemRep.zero(g, {"P": 1, "Q": 1})
    assert check_residue_relations(g, w, rep).passed  # genus-agnostic
    with pytest.raises(GenusNotZero):
        check_deformed_preprojective(g, w, rep)


def test_lifting_examples():
    assert lifting_criterion({"X": 0}, [SummandDescriptor({"X": 2}, {"X": 0})]).exists
    v = lifting_criterion({"X": 1}, [SummandDescriptor({"X": 1}, {"X": -1})])
    assert v.exists and v.values == [0]
    v = lifting_criterion({"X": 0.5}, [SummandDescriptor({"X": 1}, {"X": 0})])
    assert not v.exists and v.values == [0.5]


def test_summand_validation():
    with pytest.raises(ValidationError):
        SummandDescriptor({"X": 0}, {"X": 1})
    with pytest.raises(ValidationError):
        SummandDescriptor({"X": -1}, {})


summand = st.builds(
    lambda r, d: SummandDescriptor(r, {k: (d.get(k, 0) if v else 0) for k, v in r.items()}),
    st.dictionaries(st.sampled_from("ABC"), st.integers(0, 5)),
    st.dictionaries(st.sampled_from("ABC"), st.integers(-5, 5)),
)


@given(summand, summand, st.dictionaries(st.sampled_from("ABC"), st.integers(-16, 16)))
def test_lifting_value_additive(s1, s2, lam8):
    lam = {k: v / 8 for k, v in lam8.items()}  # dyadic, so float sums are exact
    assert lifting_value(lam, s1 + s2) == lifting_value(lam, s1) + lifting_value(lam, s2)
    # compare with exact rational arithmetic
    exact = sum(Fraction(v) for v in [s1.degree, s2.degree]) + sum(
        Fraction(lam8.get(c, 0), 8) * (s1.ranks.get(c, 0) + s2.ranks.get(c, 0)) for c in "ABC"
    )
    assert lifting_value(lam, s1 + s2) == float(exact)


def test_eigenvalues_in_T_examples():
    g = one_arrow()
    rep = rep_1([[1.0]], [[0.5]], [[0.5]], [[-0.5]])
    assert not check_eigenvalues_in_T(g, rep, EigenvalueSet.zero()).passed
    assert check_eigenvalues_in_T(g, rep, EigenvalueSet.strip()).passed
    assert check_eigenvalues_in_T(g, rep_1([[1.0]], [[0.0]], [[0]], [[0]]), EigenvalueSet.zero()).passed


@given(st.integers(0, 2**32 - 1))
def test_residue_relations_imply_vertex_relation(seed):
    """Summing the residue relations over a component gives the vertex relation plus sum R_p."""
    rng = np.random.default_rng(seed)
    verts = ["1", "2", "3"]
    arrows = [("a", "1", "2"), ("b", "2", "3"), ("c", "1", "3")]
    g = p1_quiver(verts, arrows)
    dims = {v: int(rng.integers(1, 4)) for v in verts}
    lam = {p.id: complex(rng.normal(), rng.normal()) for p in g.marked_points}
    w = WeightData(lam)
    maps, res = {}, {}
    for aid, t, h in arrows:
        E, N = crandn(rng, dims[h], dims[t]), crandn(rng, dims[t], dims[h])
        maps[aid] = (E, N)
        res[f"{aid}.t"] = lam[f"{aid}.t"] * np.eye(dims[t]) + N @ E
        res[f"{aid}.h"] = lam[f"{aid}.h"] * np.eye(dims[h]) - E @ N
    rep = ConnectionSystemRep(dims, res, maps)
    tol = 1e-12
    assert check_residue_relations(g, w, rep, tol).passed
    report = check_deformed_preprojective(g, w, rep, tol)
    for c in verts:
        rsum = sum((res[p] for p in g.points_on(c)), np.zeros((dims[c], dims[c])))
        assert abs(report.item(f"component {c}").defect - np.linalg.norm(rsum)) <= len(g.points_on(c)) * 1e-12 * 10


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 5))
def test_nonzero_spectra_of_EN_and_NE_agree(seed, n, m):
    rng = np.random.default_rng(seed)
    E, N = crandn(rng, n, m), crandn(rng, m, n)
    a = np.sort_complex(np.linalg.eigvals(E @ N))
    b = np.sort_complex(np.linalg.eigvals(N @ E))
    big = max(n, m)
    a = np.sort_complex(np.concatenate([a, np.zeros(big - n)]))
    b = np.sort_complex(np.concatenate([b, np.zeros(big - m)]))
    # match greedily rather than by sort order
    for z in a:
        k = int(np.argmin(np.abs(b - z)))
        assert abs(b[k] - z) <= 1e-8 * max(1, abs(z))
        b = np.delete(b, k)
