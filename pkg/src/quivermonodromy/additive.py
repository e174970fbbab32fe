"""Additive side: residue data of lambda-connection systems on vb-trivial representations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import GenusNotZero, ShapeMismatch, ValidationError
from .matfun import spectrum_in
from .quiver_model import EigenvalueSet, RiemannSurfaceQuiver, WeightData, as_matrix
from .reports import Report


@dataclass(frozen=True)
class ConnectionSystemRep:
    """Fibres identified with C^dims[i] on each component.

    ``arrow_maps[a] = (E_a, nabla_a)`` with E_a : E_p -> E_q and
    nabla_a : E_q -> E_p for the arrow a : p -> q.
    """

    dims: Mapping[str, int]
    residues: Mapping[str, np.ndarray]
    arrow_maps: Mapping[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "dims", {k: int(v) for k, v in dict(self.dims).items()})
        object.__setattr__(self, "residues", {k: as_matrix(v) for k, v in dict(self.residues).items()})
        object.__setattr__(
            self, "arrow_maps", {k: (as_matrix(E), as_matrix(N)) for k, (E, N) in dict(self.arrow_maps).items()}
        )
        if any(d < 0 for d in self.dims.values()):
            raise ValidationError("dimensions must be non-negative")

    @classmethod
    def zero(cls, gamma: RiemannSurfaceQuiver, dims: Mapping[str, int]) -> "ConnectionSystemRep":
        res = {}
        for p in gamma.marked_points:
            d = dims[p.component]
            res[p.id] = np.zeros((d, d))
        maps = {}
        for a in gamma.arrows:
            dp, dq = dims[gamma.component_of(a.tail)], dims[gamma.component_of(a.head)]
            maps[a.id] = (np.zeros((dq, dp)), np.zeros((dp, dq)))
        return cls(dims, res, maps)

    def E(self, aid: str) -> np.ndarray:
        return self.arrow_maps[aid][0]

    def nabla(self, aid: str) -> np.ndarray:
        return self.arrow_maps[aid][1]

    def dim_at_point(self, gamma: RiemannSurfaceQuiver, pid: str) -> int:
        return self.dims[gamma.component_of(pid)]

    def validate(self, gamma: RiemannSurfaceQuiver) -> None:
        comps = {c.id for c in gamma.components}
        if set(self.dims) != comps:
            raise ShapeMismatch(f"dims must be given for exactly the components {sorted(comps)}")
        points = {p.id for p in gamma.marked_points}
        if set(self.residues) != points:
            raise ShapeMismatch(f"residues must be given for exactly the marked points {sorted(points)}")
        for p in gamma.marked_points:
            d = self.dims[p.component]
            if self.residues[p.id].shape != (d, d):
                raise ShapeMismatch(f"residue at {p.id!r} has shape {self.residues[p.id].shape}, expected {(d, d)}")
        arrows = {a.id for a in gamma.arrows}
        if set(self.arrow_maps) != arrows:
            raise ShapeMismatch(f"arrow maps must be given for exactly the arrows {sorted(arrows)}")
        for a in gamma.arrows:
            dp = self.dim_at_point(gamma, a.tail)
            dq = self.dim_at_point(gamma, a.head)
            E, N = self.arrow_maps[a.id]
            if E.shape != (dq, dp):
                raise ShapeMismatch(f"E for arrow {a.id!r} has shape {E.shape}, expected {(dq, dp)}")
            if N.shape != (dp, dq):
                raise ShapeMismatch(f"nabla for arrow {a.id!r} has shape {N.shape}, expected {(dp, dq)}")


@dataclass(frozen=True)
class SummandDescriptor:
    """Rank and degree per component of one direct summand of a bundle representation."""

    ranks: Mapping[str, int]
    degrees: Mapping[str, int]

    def __post_init__(self):
        for cid, r in self.ranks.items():
            if r < 0:
                raise ValidationError(f"rank on {cid!r} must be non-negative")
            if r == 0 and self.degrees.get(cid, 0) != 0:
                raise ValidationError(f"rank 0 on {cid!r} forces degree 0")

    @property
    def degree(self) -> int:
        return sum(self.degrees.values())

    def __add__(self, other: "SummandDescriptor") -> "SummandDescriptor":
        keys = set(self.ranks) | set(other.ranks) | set(self.degrees) | set(other.degrees)
        return SummandDescriptor(
            {k: self.ranks.get(k, 0) + other.ranks.get(k, 0) for k in keys},
            {k: self.degrees.get(k, 0) + other.degrees.get(k, 0) for k in keys},
        )


def _residue_defect(gamma, weights, rep, pid):
    R = rep.residues[pid]
    tails, heads = gamma.arrows_at_point(pid)
    D = R - weights.at(pid) * np.eye(R.shape[0])
    for a in tails:
        D = D - rep.nabla(a.id) @ rep.E(a.id)
    for a in heads:
        D = D + rep.E(a.id) @ rep.nabla(a.id)
    return D


def check_residue_relations(
    gamma: RiemannSurfaceQuiver, weights: WeightData, rep: ConnectionSystemRep, tol: float = 1e-9
) -> Report:
    """Res_p - lambda_p = sum_{t(a)=p} nabla_a E_a - sum_{h(a)=p} E_a nabla_a at every marked point."""
    rep.validate(gamma)
    weights.validate_for(gamma)
    report = Report("residue relations", tol)
    for p in gamma.marked_points:
        report.add(f"point {p.id}", np.linalg.norm(_residue_defect(gamma, weights, rep, p.id)))
    return report


def check_deformed_preprojective(
    gamma: RiemannSurfaceQuiver, weights: WeightData, rep: ConnectionSystemRep, tol: float = 1e-9
) -> Report:
    """Vertex relation sum_{h} E nabla - sum_{t} nabla E = lambda_i on each P^1 component.

    The detail field also records ||sum_{p in D_i} R_p||, the trivial-bundle
    condition that the relation is equivalent to when residues are linked.
    """
    rep.validate(gamma)
    weights.validate_for(gamma)
    for c in gamma.components:
        if not c.is_p1:
            raise GenusNotZero(f"component {c.id!r} has genus {c.genus}; the vertex relation needs P^1-type")
    report = Report("deformed preprojective relations", tol)
    for c in gamma.components:
        d = rep.dims[c.id]
        D = -weights.component_lambda(gamma, c.id) * np.eye(d)
        for a in gamma.arrows_with_head_on(c.id):
            D = D + rep.E(a.id) @ rep.nabla(a.id)
        for a in gamma.arrows_with_tail_on(c.id):
            D = D - rep.nabla(a.id) @ rep.E(a.id)
        residue_sum = sum((rep.residues[p] for p in gamma.points_on(c.id)), np.zeros((d, d)))
        report.add(f"component {c.id}", np.linalg.norm(D), detail=f"|sum R_p| = {np.linalg.norm(residue_sum):.3e}")
    return report


def residue_sum_defects(gamma: RiemannSurfaceQuiver, rep: ConnectionSystemRep) -> dict[str, float]:
    out = {}
    for c in gamma.components:
        d = rep.dims[c.id]
        out[c.id] = float(np.linalg.norm(sum((rep.residues[p] for p in gamma.points_on(c.id)), np.zeros((d, d)))))
    return out


@dataclass
class LiftingVerdict:
    values: list[complex]
    exists: bool

    def to_dict(self):
        return {"values": [[v.real, v.imag] for v in self.values], "exists": self.exists}


def lifting_value(component_lambdas: Mapping[str, complex], summand: SummandDescriptor) -> complex:
    return summand.degree + sum(complex(component_lambdas.get(c, 0)) * r for c, r in summand.ranks.items())


def lifting_criterion(
    component_lambdas: Mapping[str, complex], summands: Sequence[SummandDescriptor], tol: float = 1e-12
) -> LiftingVerdict:
    """deg E' + sum_i lambda_i rank E'_i for each listed indecomposable summand.

    The caller supplies a Krull-Schmidt decomposition; by additivity of degree
    and rank the indecomposable summands are the only ones that need testing.
    """
    values = [lifting_value(component_lambdas, s) for s in summands]
    return LiftingVerdict(values, all(abs(v) <= tol for v in values))


def check_eigenvalues_in_T(
    gamma: RiemannSurfaceQuiver, rep: ConnectionSystemRep, T: EigenvalueSet, tol: float = 1e-8
) -> Report:
    rep.validate(gamma)
    report = Report("eigenvalues in T", tol)
    for a in gamma.arrows:
        E, N = rep.arrow_maps[a.id]
        # 0 is in T, so the smaller of the two products decides
        prod = N @ E if N.shape[0] <= E.shape[0] else E @ N
        ok, bad = spectrum_in(prod, lambda z: T.contains(z, tol))
        defect = max((T.distance(z) for z in bad), default=0.0)
        if not ok and defect <= tol:
            defect = np.inf  # right edge of the strip: excluded but at distance 0
        detail = "" if ok else "eigenvalues " + ", ".join(f"{z:.6g}" for z in bad)
        report.add(f"arrow {a.id}", defect, detail)
    return report
