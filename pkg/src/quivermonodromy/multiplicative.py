"""Multiplicative side: monodromy data, arrow relations, and multiplicative preprojective relations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import RequiresNonInterfering, ShapeMismatch, SingularFactor, SingularMonodromy, ValidationError
from .matfun import spectrum_in
from .quiver_model import EigenvalueSet, RiemannSurfaceQuiver, WeightData, as_matrix, eigenvalue_set_S
from .reports import Report

SINGULAR_TOL = 1e-10


def is_singular(M: np.ndarray, rel_tol: float = SINGULAR_TOL) -> bool:
    if M.shape[0] == 0:
        return False
    sv = np.linalg.svd(M, compute_uv=False)
    return sv[0] == 0 or sv[-1] < rel_tol * sv[0]


def _inverse(M: np.ndarray, what: str, exc=SingularFactor) -> np.ndarray:
    if is_singular(M):
        raise exc(f"{what} is numerically singular")
    return np.linalg.inv(M)


@dataclass(frozen=True)
class MonodromyRep:
    """(V_i, rho_i(l_p), genus maps (e_j, e_j^*), rho_a, rho_a^*).

    For an arrow a : p -> q with i = [p], j = [q], ``arrow_maps[a] =
    (rho_a, rho_a_star)`` with rho_a : V_i -> V_j and rho_a^* : V_j -> V_i.
    Genus generators are stored as (e_j, e_j^*) and act as rho(u_j) = e_j,
    rho(v_j) = e_j^-1 + e_j^*.
    """

    dims: Mapping[str, int]
    point_monodromies: Mapping[str, np.ndarray]
    arrow_maps: Mapping[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    genus_maps: Mapping[str, Sequence[tuple[np.ndarray, np.ndarray]]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dims", {k: int(v) for k, v in dict(self.dims).items()})
        object.__setattr__(self, "point_monodromies", {k: as_matrix(v) for k, v in dict(self.point_monodromies).items()})
        object.__setattr__(
            self, "arrow_maps", {k: (as_matrix(r), as_matrix(rs)) for k, (r, rs) in dict(self.arrow_maps).items()}
        )
        object.__setattr__(
            self,
            "genus_maps",
            {k: tuple((as_matrix(e), as_matrix(es)) for e, es in v) for k, v in dict(self.genus_maps).items()},
        )
        if any(d < 0 for d in self.dims.values()):
            raise ValidationError("dimensions must be non-negative")

    def rho(self, aid: str) -> np.ndarray:
        return self.arrow_maps[aid][0]

    def rho_star(self, aid: str) -> np.ndarray:
        return self.arrow_maps[aid][1]

    def validate(self, gamma: RiemannSurfaceQuiver) -> None:
        comps = {c.id for c in gamma.components}
        if set(self.dims) != comps:
            raise ShapeMismatch(f"dims must be given for exactly the components {sorted(comps)}")
        points = {p.id for p in gamma.marked_points}
        if set(self.point_monodromies) != points:
            raise ShapeMismatch(f"point monodromies must be given for exactly the marked points {sorted(points)}")
        for p in gamma.marked_points:
            d = self.dims[p.component]
            if self.point_monodromies[p.id].shape != (d, d):
                raise ShapeMismatch(f"monodromy at {p.id!r} has shape {self.point_monodromies[p.id].shape}")
        if set(self.arrow_maps) != {a.id for a in gamma.arrows}:
            raise ShapeMismatch("arrow maps must be given for exactly the arrows of the quiver")
        for a in gamma.arrows:
            di = self.dims[gamma.component_of(a.tail)]
            dj = self.dims[gamma.component_of(a.head)]
            r, rs = self.arrow_maps[a.id]
            if r.shape != (dj, di) or rs.shape != (di, dj):
                raise ShapeMismatch(f"arrow {a.id!r}: rho {r.shape}, rho* {rs.shape}, expected {(dj, di)}, {(di, dj)}")
        for cid, pairs in self.genus_maps.items():
            if cid not in comps:
                raise ShapeMismatch(f"genus maps for unknown component {cid!r}")
            g = gamma.component(cid).genus
            if len(pairs) not in (0, g):
                raise ShapeMismatch(f"component {cid!r} has genus {g} but {len(pairs)} genus pairs")
            d = self.dims[cid]
            for e, es in pairs:
                if e.shape != (d, d) or es.shape != (d, d):
                    raise ShapeMismatch(f"genus maps on {cid!r} must be {d}x{d}")


def check_arrow_relations(
    gamma: RiemannSurfaceQuiver,
    weights: WeightData,
    mrep: MonodromyRep,
    tol: float = 1e-9,
    relative: bool = False,
) -> Report:
    """sigma_p^-1 rho(l_p)^-1 = 1 + rho_a^* rho_a at the tail, sigma_q rho(l_q) = 1 + rho_a rho_a^* at the head.

    With ``relative`` each defect is divided by max(1, norm of the larger side).
    """
    if not gamma.non_interfering:
        raise RequiresNonInterfering("arrow relations are stated for non-interfering quivers")
    mrep.validate(gamma)
    weights.validate_for(gamma)
    report = Report("arrow relations", tol)
    for a in gamma.arrows:
        r, rs = mrep.arrow_maps[a.id]
        Mp = mrep.point_monodromies[a.tail]
        Mq = mrep.point_monodromies[a.head]
        Mp_inv = _inverse(Mp, f"monodromy at {a.tail!r}", SingularMonodromy)
        _inverse(Mq, f"monodromy at {a.head!r}", SingularMonodromy)
        lhs_t, rhs_t = Mp_inv / weights.sigma(a.tail), np.eye(Mp.shape[0]) + rs @ r
        lhs_h, rhs_h = weights.sigma(a.head) * Mq, np.eye(Mq.shape[0]) + r @ rs
        for name, lhs, rhs in ((f"arrow {a.id} tail {a.tail}", lhs_t, rhs_t), (f"arrow {a.id} head {a.head}", lhs_h, rhs_h)):
            d = np.linalg.norm(lhs - rhs)
            if relative:
                d /= max(1.0, np.linalg.norm(lhs), np.linalg.norm(rhs))
            report.add(name, d)
    return report


def _default_order(gamma: RiemannSurfaceQuiver, cid: str) -> tuple[list[str], list[str]]:
    return [a.id for a in gamma.arrows_with_head_on(cid)], [a.id for a in gamma.arrows_with_tail_on(cid)]


def vertex_product(
    gamma: RiemannSurfaceQuiver, mrep: MonodromyRep, cid: str, order: tuple[Sequence[str], Sequence[str]] | None = None
) -> np.ndarray:
    """Genus factors, then (1 + rho rho^*) over head arrows, then (1 + rho^* rho)^-1 over tail arrows."""
    heads, tails = order if order is not None else _default_order(gamma, cid)
    d = mrep.dims[cid]
    eye = np.eye(d)
    P = eye.astype(complex)
    for j, (e, es) in enumerate(mrep.genus_maps.get(cid, ())):
        _inverse(e, f"genus map e_{j + 1} on {cid!r}")
        P = P @ (eye + e @ es) @ _inverse(eye + es @ e, f"(1 + e*_{j + 1} e_{j + 1}) on {cid!r}")
    for aid in heads:
        P = P @ (eye + mrep.rho(aid) @ mrep.rho_star(aid))
    for aid in tails:
        P = P @ _inverse(eye + mrep.rho_star(aid) @ mrep.rho(aid), f"(1 + rho*_{aid} rho_{aid})")
    return P


def check_mpa_vertex_relation(
    gamma: RiemannSurfaceQuiver,
    weights: WeightData,
    mrep: MonodromyRep,
    arrow_order: Mapping[str, tuple[Sequence[str], Sequence[str]]] | None = None,
    tol: float = 1e-9,
) -> Report:
    """Multiplicative preprojective relation at each vertex: ordered product = q_i 1.

    ``arrow_order[i] = (head arrows, tail arrows)`` fixes the factor order at
    component i; by default both lists are sorted by arrow id.
    """
    mrep.validate(gamma)
    weights.validate_for(gamma)
    report = Report("multiplicative preprojective relations", tol)
    for c in gamma.components:
        order = arrow_order.get(c.id) if arrow_order else None
        P = vertex_product(gamma, mrep, c.id, order)
        q = weights.q(gamma, c.id)
        report.add(f"component {c.id}", np.linalg.norm(P - q * np.eye(P.shape[0])))
    return report


def vertex_determinant_defect(gamma, weights, mrep, cid, order=None) -> float:
    """|det(ordered product) - q_i^dim V_i|, the scalar shadow of the vertex relation."""
    P = vertex_product(gamma, mrep, cid, order)
    return float(abs(np.linalg.det(P) - weights.q(gamma, cid) ** mrep.dims[cid]))


def check_eigenvalues_in_S(
    gamma: RiemannSurfaceQuiver, mrep: MonodromyRep, T: EigenvalueSet, tol: float = 1e-8
) -> Report:
    S = eigenvalue_set_S(T)
    mrep.validate(gamma)
    report = Report("eigenvalues in S", tol)
    for a in gamma.arrows:
        prod = mrep.rho_star(a.id) @ mrep.rho(a.id)
        ok, bad = spectrum_in(prod, lambda z: S.contains(z, tol))
        detail = "" if ok else "eigenvalues " + ", ".join(f"{z:.6g}" for z in bad)
        report.add(f"arrow {a.id}", 0.0 if ok else np.inf, detail)
    return report


def _commutator(u: np.ndarray, v: np.ndarray, what: str) -> np.ndarray:
    return u @ v @ _inverse(u, what) @ _inverse(v, what)


def surface_group_relation_check(
    gamma: RiemannSurfaceQuiver,
    cid: str,
    mrep: MonodromyRep,
    loops_order: Sequence[str] | None = None,
    tol: float = 1e-9,
) -> Report:
    """prod_j [rho(u_j), rho(v_j)] prod_k rho(l_k) = 1 on one component.

    ``loops_order`` lists marked points on the component; the default puts
    the heads of head-arrows first, then the tails of tail-arrows, each
    sorted by arrow id, matching the default vertex relation order.
    """
    if loops_order is None:
        heads, tails = _default_order(gamma, cid)
        loops_order = [gamma.arrow(a).head for a in heads] + [gamma.arrow(a).tail for a in tails]
        loops_order += [p for p in gamma.points_on(cid) if p not in loops_order]
    d = mrep.dims[cid]
    P = np.eye(d, dtype=complex)
    for j, (e, es) in enumerate(mrep.genus_maps.get(cid, ())):
        u = e
        v = _inverse(e, f"genus map e_{j + 1} on {cid!r}") + es
        P = P @ _commutator(u, v, f"genus generator {j + 1} on {cid!r}")
    for pid in loops_order:
        M = mrep.point_monodromies[pid]
        _inverse(M, f"monodromy at {pid!r}")
        P = P @ M
    report = Report(f"surface group relation on {cid}", tol)
    report.add(f"component {cid}", np.linalg.norm(P - np.eye(d)))
    return report


def monodromies_from_arrows(
    gamma: RiemannSurfaceQuiver,
    weights: WeightData,
    dims: Mapping[str, int],
    arrow_maps: Mapping[str, tuple[np.ndarray, np.ndarray]],
    genus_maps=None,
) -> MonodromyRep:
    """Solve the arrow relations for the point monodromies (non-interfering quivers)."""
    if not gamma.non_interfering:
        raise RequiresNonInterfering("point monodromies are determined by arrows only without interference")
    mons = {}
    for a in gamma.arrows:
        r, rs = (np.asarray(m, dtype=complex) for m in arrow_maps[a.id])
        di, dj = r.shape[1], r.shape[0]
        tail_factor = np.eye(di) + rs @ r
        mons[a.tail] = _inverse(tail_factor, f"(1 + rho*_{a.id} rho_{a.id})") / weights.sigma(a.tail)
        mons[a.head] = (np.eye(dj) + r @ rs) / weights.sigma(a.head)
    for p in gamma.unused_points:
        d = dims[gamma.component_of(p)]
        mons[p] = np.eye(d) / weights.sigma(p)
    return MonodromyRep(dims, mons, arrow_maps, genus_maps or {})
