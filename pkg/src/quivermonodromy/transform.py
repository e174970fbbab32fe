"""The exponential transform on objects: cyclic quivers and one-arrow-local connection data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .additive import ConnectionSystemRep, check_eigenvalues_in_T, check_residue_relations
from .errors import (
    GenusNotZero,
    RelationDefect,
    RequiresNonInterfering,
    ShapeMismatch,
    SpectrumOutsideS,
    SpectrumOutsideT,
)
from .matfun import BRANCH_TOL, exp_2pii, phi_times, psi_times, spectrum_in
from .multiplicative import MonodromyRep, check_arrow_relations, check_eigenvalues_in_S
from .quiver_model import EigenvalueSet, RiemannSurfaceQuiver, WeightData, as_matrix, eigenvalue_set_S


@dataclass(frozen=True)
class CyclicRep:
    """Representation of the cyclic quiver Q_m.

    ``maps[k]`` goes from vertex k-1 to vertex k (indices mod m), so
    ``maps[0]`` is the distinguished arrow a_1 : V_m -> V_1 and the cycle
    a_m ... a_1 is an endomorphism of V_m = ``dims[-1]``.
    """

    dims: tuple[int, ...]
    maps: tuple[np.ndarray, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        maps = tuple(as_matrix(a) if np.size(a) else np.zeros((0, 0)) for a in self.maps)
        m = len(dims)
        if m < 1 or len(maps) != m:
            raise ShapeMismatch("a cyclic representation needs m >= 1 dims and m maps")
        fixed = []
        for k, a in enumerate(maps):
            want = (dims[k], dims[k - 1])
            if a.size == 0:
                a = as_matrix(np.zeros(want))
            if a.shape != want:
                raise ShapeMismatch(f"map a_{k + 1} has shape {a.shape}, expected {want}")
            fixed.append(a)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", tuple(fixed))

    @property
    def m(self) -> int:
        return len(self.dims)

    @classmethod
    def B(cls, sigma, m: int = 1) -> "CyclicRep":
        """All spaces equal, a_1 = sigma, the other maps identities."""
        sigma = np.asarray(sigma, dtype=complex)
        n = sigma.shape[0]
        return cls((n,) * m, (sigma,) + tuple(np.eye(n) for _ in range(m - 1)))

    def cycle(self) -> np.ndarray:
        C = np.eye(self.dims[-1], dtype=complex)
        for a in self.maps:
            C = a @ C
        return C

    def with_first(self, a1) -> "CyclicRep":
        return CyclicRep(self.dims, (a1,) + self.maps[1:])

    def quiver_arrows(self) -> list[tuple[int, int, int]]:
        m = self.m
        return [(k, (k - 1) % m, k) for k in range(m)]

    def as_quiver_rep(self):
        """(arrows, dims, maps) in the form taken by ``matfun.hom_dimension``."""
        return self.quiver_arrows(), dict(enumerate(self.dims)), dict(enumerate(self.maps))


def cyclic_exp(rep: CyclicRep, T: EigenvalueSet | None = None, tol: float = BRANCH_TOL, check: bool = True) -> CyclicRep:
    """a_1' = a_1 phi(a_m ... a_1); all other maps unchanged."""
    T = T if T is not None else EigenvalueSet.strip()
    C = rep.cycle()
    if check:
        ok, bad = spectrum_in(C, lambda z: T.contains(z, tol))
        if not ok:
            raise SpectrumOutsideT(f"cycle eigenvalue(s) {', '.join(f'{z:.6g}' for z in bad)} not in T")
    return rep.with_first(phi_times(rep.maps[0], C))


def cyclic_log(rep: CyclicRep, T: EigenvalueSet | None = None, tol: float = BRANCH_TOL) -> CyclicRep:
    """Inverse of ``cyclic_exp``: a_1'' = a_1 psi(a_m ... a_1)."""
    T = T if T is not None else EigenvalueSet.strip()
    return rep.with_first(psi_times(rep.maps[0], rep.cycle(), T, tol))


def _require_local_scope(gamma: RiemannSurfaceQuiver) -> None:
    if not gamma.non_interfering:
        raise RequiresNonInterfering("the transform needs non-interfering arrows")
    for c in gamma.components:
        if not c.is_p1:
            raise GenusNotZero(f"component {c.id!r} has genus {c.genus}; only P^1-type quivers are transformed")


def forward_transform(
    gamma: RiemannSurfaceQuiver,
    weights: WeightData,
    rep: ConnectionSystemRep,
    T: EigenvalueSet,
    tol: float = 1e-9,
) -> MonodromyRep:
    """Connection-system residue data -> monodromy data.

    rho_a = E_a, rho_a^* = nabla_a phi(E_a nabla_a), and the loop around p acts
    by exp(-2 pi i R_p) as in the disk model.
    """
    _require_local_scope(gamma)
    res = check_residue_relations(gamma, weights, rep, tol)
    if not res.passed:
        worst = max(res.failures, key=lambda i: i.defect)
        raise RelationDefect(f"residue relation fails at {worst.name} (defect {worst.defect:.3e})")
    eig = check_eigenvalues_in_T(gamma, rep, T, BRANCH_TOL)
    if not eig.passed:
        bad = eig.failures[0]
        raise SpectrumOutsideT(f"{bad.name}: {bad.detail} not in T")
    arrow_maps = {}
    for a in gamma.arrows:
        E, N = rep.arrow_maps[a.id]
        arrow_maps[a.id] = (E.copy(), phi_times(N, E @ N))
    mons = {p.id: exp_2pii(-rep.residues[p.id]) for p in gamma.marked_points}
    return MonodromyRep(rep.dims, mons, arrow_maps)


def inverse_transform(
    gamma: RiemannSurfaceQuiver,
    weights: WeightData,
    mrep: MonodromyRep,
    T: EigenvalueSet,
    tol: float = 1e-9,
) -> ConnectionSystemRep:
    """Monodromy data -> residue data; inverse of ``forward_transform``.

    Residues are rebuilt from the linking relation, then checked against
    the point monodromies through exp(-2 pi i R_p). Both consistency checks
    are relative, so large monodromies (weights with big imaginary part)
    are not rejected for roundoff.
    """
    _require_local_scope(gamma)
    if any(len(v) for v in mrep.genus_maps.values()):
        raise GenusNotZero("genus maps are not supported by the inverse transform")
    rel = check_arrow_relations(gamma, weights, mrep, tol, relative=True)
    if not rel.passed:
        worst = max(rel.failures, key=lambda i: i.defect)
        raise RelationDefect(f"arrow relation fails at {worst.name} (defect {worst.defect:.3e})")
    eig = check_eigenvalues_in_S(gamma, mrep, T, BRANCH_TOL)
    if not eig.passed:
        bad = eig.failures[0]
        raise SpectrumOutsideS(f"{bad.name}: {bad.detail} not in S")
    eigenvalue_set_S(T)
    arrow_maps = {}
    residues = {}
    for a in gamma.arrows:
        r, rs = mrep.arrow_maps[a.id]
        N = psi_times(rs, r @ rs, T)
        arrow_maps[a.id] = (r.copy(), N)
        dp, dq = r.shape[1], r.shape[0]
        residues[a.tail] = weights.at(a.tail) * np.eye(dp) + N @ r
        residues[a.head] = weights.at(a.head) * np.eye(dq) - r @ N
    for p in gamma.unused_points:
        d = mrep.dims[gamma.component_of(p)]
        residues[p] = weights.at(p) * np.eye(d)
    for pid, R in residues.items():
        M = mrep.point_monodromies[pid]
        # tol is relative on R; to first order exp amplifies that by 2 pi |R|
        defect = np.linalg.norm(exp_2pii(-R) - M)
        if defect > tol * max(1.0, np.linalg.norm(M)) * max(1.0, 2 * np.pi * np.linalg.norm(R)):
            raise RelationDefect(f"recovered residue at {pid!r} does not reproduce its monodromy (defect {defect:.3e})")
    return ConnectionSystemRep(mrep.dims, residues, arrow_maps)


def transform_morphism_defect(theta: dict, source: MonodromyRep, target: MonodromyRep, gamma) -> float:
    """Largest failure of theta (component -> matrix) to intertwine two monodromy representations."""
    worst = 0.0
    for a in gamma.arrows:
        i, j = gamma.component_of(a.tail), gamma.component_of(a.head)
        worst = max(worst, np.linalg.norm(theta[j] @ source.rho(a.id) - target.rho(a.id) @ theta[i]))
        worst = max(worst, np.linalg.norm(theta[i] @ source.rho_star(a.id) - target.rho_star(a.id) @ theta[j]))
    for p in gamma.marked_points:
        c = gamma.component_of(p.id)
        worst = max(
            worst, np.linalg.norm(theta[c] @ source.point_monodromies[p.id] - target.point_monodromies[p.id] @ theta[c])
        )
    return float(worst)


def additive_morphism_defect(theta: dict, source: ConnectionSystemRep, target: ConnectionSystemRep, gamma) -> float:
    worst = 0.0
    for a in gamma.arrows:
        i, j = gamma.component_of(a.tail), gamma.component_of(a.head)
        worst = max(worst, np.linalg.norm(theta[j] @ source.E(a.id) - target.E(a.id) @ theta[i]))
        worst = max(worst, np.linalg.norm(theta[i] @ source.nabla(a.id) - target.nabla(a.id) @ theta[j]))
    for p in gamma.marked_points:
        c = gamma.component_of(p.id)
        worst = max(worst, np.linalg.norm(theta[c] @ source.residues[p.id] - target.residues[p.id] @ theta[c]))
    return float(worst)


def cyclic_reps_equal(x: CyclicRep, y: CyclicRep) -> float:
    if x.dims != y.dims:
        return np.inf
    return float(max((np.abs(a - b).max() if a.size else 0.0 for a, b in zip(x.maps, y.maps)), default=0.0))


def max_rep_difference(x, y) -> float:
    """Max entrywise difference between two representations of the same kind and shape."""
    out = 0.0
    if isinstance(x, ConnectionSystemRep):
        pairs = [(x.residues[k], y.residues[k]) for k in x.residues]
        pairs += [(x.arrow_maps[k][i], y.arrow_maps[k][i]) for k in x.arrow_maps for i in (0, 1)]
    else:
        pairs = [(x.point_monodromies[k], y.point_monodromies[k]) for k in x.point_monodromies]
        pairs += [(x.arrow_maps[k][i], y.arrow_maps[k][i]) for k in x.arrow_maps for i in (0, 1)]
    for a, b in pairs:
        if a.shape != b.shape:
            return np.inf
        if a.size:
            out = max(out, float(np.abs(a - b).max()))
    return out
