"""Fuchsian systems on the sphere and their numerical monodromy.

Flat sections of d + A(z) dz satisfy f' = -A(z) f. Transporting the
identity matrix once around a loop gives the monodromy; for the disk model
A = R / (z - p) this is exp(-2 pi i R).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import DOP853

from .errors import (
    AtPole,
    ClearanceViolated,
    MultiplePolesEnclosed,
    NonNilpotentResidue,
    RelationDefect,
    StepSizeUnderflow,
    ValidationError,
)
from .matfun import exp_2pii, power_sums_charpoly
from .quiver_model import as_matrix
from .reports import Report

BALANCE_TOL = 1e-12


@dataclass(frozen=True)
class FuchsianSystem:
    """A(z) = sum_k R_k / (z - p_k) on a trivial bundle of rank ``dim``.

    ``balanced`` systems have sum R_k = 0, i.e. no pole at infinity. The
    single-pole disk model is built with ``balanced=False``.
    """

    positions: tuple[complex, ...]
    residues: tuple[np.ndarray, ...]
    dim: int
    balanced: bool = True

    def __post_init__(self):
        pos = tuple(complex(p) for p in self.positions)
        res = tuple(as_matrix(R) for R in self.residues)
        if len(pos) != len(res):
            raise ValidationError("one residue per pole is required")
        for R in res:
            if R.shape != (self.dim, self.dim):
                raise ValidationError(f"residue shape {R.shape} does not match dimension {self.dim}")
        for i in range(len(pos)):
            for j in range(i + 1, len(pos)):
                if pos[i] == pos[j]:
                    raise ValidationError(f"poles {i} and {j} coincide at {pos[i]}")
        if self.balanced and res:
            total = np.linalg.norm(sum(res))
            scale = max(1.0, sum(np.linalg.norm(R) for R in res))
            if total > BALANCE_TOL * scale:
                raise ValidationError(f"residues must sum to zero (|sum R| = {total:.3e})")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "residues", res)
        object.__setattr__(self, "_stack", np.array(res, dtype=complex).reshape(len(res), self.dim, self.dim))

    @classmethod
    def disk_model(cls, R, center: complex = 0j) -> "FuchsianSystem":
        R = np.asarray(R, dtype=complex)
        return cls((center,), (R,), R.shape[0], balanced=False)

    @property
    def min_pole_distance(self) -> float:
        p = self.positions
        d = [abs(p[i] - p[j]) for i in range(len(p)) for j in range(i + 1, len(p))]
        return min(d) if d else math.inf

    def A(self, z: complex) -> np.ndarray:
        diff = complex(z) - np.asarray(self.positions, dtype=complex)
        return np.tensordot(1.0 / diff, self._stack, axes=1) if len(diff) else np.zeros((self.dim, self.dim), complex)


def evaluate_A(system: FuchsianSystem, z: complex) -> np.ndarray:
    for k, p in enumerate(system.positions):
        if abs(complex(z) - p) == 0:
            raise AtPole(f"z = {z} is the pole {k}")
    return system.A(z)


# loops -------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    start: complex
    end: complex

    def point(self, t):
        return self.start + t * (self.end - self.start)

    def velocity(self, t):
        return self.end - self.start

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start)

    def distance_to(self, p: complex) -> float:
        d = self.end - self.start
        if d == 0:
            return abs(p - self.start)
        t = ((p - self.start) * d.conjugate()).real / abs(d) ** 2
        return abs(p - self.point(min(max(t, 0.0), 1.0)))

    def angle_swept(self, p: complex) -> float:
        return cmath.phase((self.end - p) / (self.start - p))


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    start_angle: float
    sweep: float  # signed, 2 pi for one counterclockwise turn

    def point(self, t):
        return self.center + self.radius * np.exp(1j * (self.start_angle + self.sweep * t))

    def velocity(self, t):
        return 1j * self.sweep * self.radius * np.exp(1j * (self.start_angle + self.sweep * t))

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.start_angle + self.sweep, -self.sweep)

    def distance_to(self, p: complex) -> float:
        rel = p - self.center
        if abs(self.sweep) >= 2 * math.pi:
            return abs(abs(rel) - self.radius)
        lo = min(self.start_angle, self.start_angle + self.sweep)
        ang = cmath.phase(rel)
        off = (ang - lo) % (2 * math.pi)
        if off <= abs(self.sweep):
            return abs(abs(rel) - self.radius)
        return min(abs(p - self.point(0.0)), abs(p - self.point(1.0)))

    def angle_swept(self, p: complex) -> float:
        n = max(16, int(abs(self.sweep) / (math.pi / 90)) + 1)
        pts = self.point(np.linspace(0.0, 1.0, n + 1))
        return float(np.sum(np.angle((pts[1:] - p) / (pts[:-1] - p))))


@dataclass(frozen=True)
class Loop:
    """A closed piecewise path of segments and circular arcs, traversed in order."""

    pieces: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValidationError("a loop needs at least one piece")
        for a, b in zip(pieces, pieces[1:] + pieces[:1]):
            if abs(complex(a.point(1.0)) - complex(b.point(0.0))) > 1e-9 * max(1.0, abs(complex(b.point(0.0)))):
                raise ValidationError("loop pieces do not join up into a closed path")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def circle(cls, center: complex = 0j, radius: float = 1.0, basepoint_angle: float = 0.0, orientation: int = 1):
        if radius <= 0:
            raise ValidationError("circle radius must be positive")
        return cls((Arc(complex(center), float(radius), float(basepoint_angle), 2 * math.pi * orientation),))

    @classmethod
    def polyline(cls, vertices: Sequence[complex]):
        v = [complex(z) for z in vertices]
        if len(v) < 3 or v[0] != v[-1]:
            raise ValidationError("a polyline loop must be closed (first vertex equal to last)")
        return cls(tuple(Segment(a, b) for a, b in zip(v, v[1:]) if a != b))

    @classmethod
    def keyhole(cls, base: complex, pole: complex, radius: float):
        """Out from ``base`` to a circle of ``radius`` around ``pole``, once around counterclockwise, back."""
        base, pole = complex(base), complex(pole)
        if abs(base - pole) <= radius:
            raise ValidationError("keyhole base point must lie outside the circle")
        ang = cmath.phase(base - pole)
        entry = pole + radius * cmath.exp(1j * ang)
        return cls((Segment(base, entry), Arc(pole, radius, ang, 2 * math.pi), Segment(entry, base)))

    @property
    def basepoint(self) -> complex:
        return complex(self.pieces[0].point(0.0))

    def reversed(self) -> "Loop":
        return Loop(tuple(p.reversed() for p in reversed(self.pieces)))

    def distance_to(self, p: complex) -> float:
        return min(piece.distance_to(complex(p)) for piece in self.pieces)

    def winding_number(self, p: complex) -> int:
        total = sum(piece.angle_swept(complex(p)) for piece in self.pieces)
        return int(round(total / (2 * math.pi)))


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 200_000
    clearance: float | None = None  # default 0.1 x minimum pole spacing


def _clearance(system: FuchsianSystem, cfg: IntegratorConfig) -> float:
    if cfg.clearance is not None:
        return cfg.clearance
    d = system.min_pole_distance
    return 0.1 * d if math.isfinite(d) else 1e-6


def check_clearance(system: FuchsianSystem, loop: Loop, cfg: IntegratorConfig = IntegratorConfig()) -> None:
    need = _clearance(system, cfg)
    for k, p in enumerate(system.positions):
        d = loop.distance_to(p)
        if d < need:
            raise ClearanceViolated(f"loop passes within {d:.3g} of pole {k} at {p} (clearance {need:.3g})")


def transport(system: FuchsianSystem, piece, Y0: np.ndarray, cfg: IntegratorConfig) -> np.ndarray:
    """Solve Y'(t) = -A(z(t)) z'(t) Y(t) on t in [0, 1] along one piece."""
    n = system.dim

    def rhs(t, y):
        Y = y.reshape(n, n)
        return (-(system.A(piece.point(t)) * piece.velocity(t)) @ Y).ravel()

    solver = DOP853(rhs, 0.0, Y0.astype(complex).ravel(), 1.0, rtol=cfg.rtol, atol=cfg.atol)
    steps = 0
    while solver.status == "running":
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            raise StepSizeUnderflow(f"integrator failed: {msg}")
        if steps > cfg.max_steps:
            raise StepSizeUnderflow(f"exceeded {cfg.max_steps} steps")
    return solver.y.reshape(n, n)


def monodromy_along(system: FuchsianSystem, loop: Loop, cfg: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """Fundamental solution transported once around ``loop`` starting from the identity."""
    check_clearance(system, loop, cfg)
    Y = np.eye(system.dim, dtype=complex)
    if system.dim == 0:
        return Y
    for piece in loop.pieces:
        Y = transport(system, piece, Y, cfg)
    return Y


def _centroid(system: FuchsianSystem) -> complex:
    return complex(np.mean(np.asarray(system.positions, dtype=complex))) if system.positions else 0j


def _projection_gap(system: FuchsianSystem, theta: float) -> float:
    """Smallest distance between poles measured across direction theta.

    Seen from far away along theta, a keyhole segment to one pole passes
    another pole at about this distance.
    """
    pos = np.asarray(system.positions, dtype=complex)
    if len(pos) < 2:
        return math.inf
    proj = np.sort((pos * cmath.exp(-1j * theta)).imag)
    return float(np.diff(proj).min())


def default_base(system: FuchsianSystem) -> complex:
    """A base point outside all poles, in the direction where keyhole segments keep clear of other poles.

    Straight down is used when its clearance is within 1/2 of the best of 72 directions.
    """
    pos = np.asarray(system.positions, dtype=complex)
    spread = float(np.ptp(pos.real) + np.ptp(pos.imag)) if len(pos) > 1 else 1.0
    down = -math.pi / 2
    thetas = [down + 2 * math.pi * k / 72 for k in range(72)]
    gaps = [_projection_gap(system, t) for t in thetas]
    best = max(range(72), key=lambda k: gaps[k])
    theta = down if gaps[0] >= 0.5 * gaps[best] else thetas[best]
    c = _centroid(system)
    # far enough that every pole is seen within a narrow cone
    radius = max(pos - c, key=abs) if len(pos) else 0
    return c + (abs(radius) + max(1.0, spread)) * cmath.exp(1j * theta)


def angle_ordering(system: FuchsianSystem, base: complex) -> list[int]:
    """Poles sorted counterclockwise by the direction in which they are seen from ``base``.

    Directions are measured from the ray pointing from the poles' centroid
    through ``base``; for a base point below every pole the sweep runs right to left.
    """
    ref = cmath.phase(complex(base) - _centroid(system))
    angles = [(cmath.phase(p - base) - ref) % (2 * math.pi) for p in system.positions]
    return sorted(range(len(angles)), key=lambda k: angles[k])


def keyhole_loops(system: FuchsianSystem, base: complex | None = None, radius: float | None = None) -> dict[int, Loop]:
    base = default_base(system) if base is None else complex(base)
    if radius is None:
        d = system.min_pole_distance
        radius = 0.3 * d if math.isfinite(d) else 0.5 * abs(base - system.positions[0])
    return {k: Loop.keyhole(base, p, radius) for k, p in enumerate(system.positions)}


def keyhole_monodromies(
    system: FuchsianSystem,
    base: complex | None = None,
    cfg: IntegratorConfig = IntegratorConfig(),
    radius: float | None = None,
) -> dict[int, np.ndarray]:
    return {k: monodromy_along(system, loop, cfg) for k, loop in keyhole_loops(system, base, radius).items()}


def total_monodromy_check(
    system: FuchsianSystem,
    base: complex | None = None,
    ordering: Sequence[int] | None = None,
    cfg: IntegratorConfig = IntegratorConfig(),
    tol: float = 1e-6,
) -> Report:
    """Keyhole monodromies from a common base, composed in traversal order, against the identity.

    With ``ordering = [k1, k2, ...]`` the loops are traversed k1 first, so the
    composite transport is M_kn ... M_k2 M_k1. The default ordering sweeps
    the poles counterclockwise as seen from the base point, which makes the composite
    homotopic to a large counterclockwise circle, trivial when sum R = 0.
    """
    base = default_base(system) if base is None else complex(base)
    ordering = angle_ordering(system, base) if ordering is None else list(ordering)
    mons = keyhole_monodromies(system, base, cfg)
    P = np.eye(system.dim, dtype=complex)
    for k in ordering:
        P = mons[k] @ P
    report = Report("total monodromy", tol)
    report.add("product of keyhole monodromies", np.linalg.norm(P - np.eye(system.dim)), detail=f"order {ordering}")
    return report


def compare_with_algebraic(
    system: FuchsianSystem, loop: Loop, tol: float = 1e-6, cfg: IntegratorConfig = IntegratorConfig()
) -> Report:
    """Numerical monodromy around one pole against exp(-2 pi i R).

    If every other residue vanishes the comparison is entrywise; otherwise
    only conjugacy invariants (characteristic polynomial) are compared.
    """
    enclosed = [(k, loop.winding_number(p)) for k, p in enumerate(system.positions)]
    enclosed = [(k, w) for k, w in enclosed if w != 0]
    if len(enclosed) > 1:
        raise MultiplePolesEnclosed(f"loop winds around poles {[k for k, _ in enclosed]}")
    if not enclosed:
        raise ValidationError("loop does not wind around any pole")
    k, w = enclosed[0]
    M = monodromy_along(system, loop, cfg)
    expected = exp_2pii(-w * system.residues[k])
    others_zero = all(np.linalg.norm(R) == 0 for j, R in enumerate(system.residues) if j != k)
    report = Report(f"monodromy around pole {k}", tol)
    if others_zero:
        report.add("direct", np.abs(M - expected).max(), detail=f"winding {w}")
    else:
        report.add(
            "charpoly",
            np.abs(power_sums_charpoly(M) - power_sums_charpoly(expected)).max(),
            detail=f"winding {w}",
        )
    report.data["monodromy"] = M
    return report


# Hilbert 21 on a three-arm star -------------------------------------------------


def star_structure(gamma) -> tuple[str, list[tuple[str, str, int]]]:
    """Centre component and, per arm, (marked point on the centre, arrow id, arm length).

    The centre is the unique component carrying three marked points; the
    arm length counts the components hanging off that point.
    """
    centres = [c.id for c in gamma.components if len(gamma.points_on(c.id)) == 3]
    if len(centres) != 1:
        raise ValidationError("expected exactly one component with three marked points")
    centre = centres[0]
    adj: dict[str, set[str]] = {c.id: set() for c in gamma.components}
    for a in gamma.arrows:
        i, j = gamma.component_of(a.tail), gamma.component_of(a.head)
        adj[i].add(j)
        adj[j].add(i)
    arms = []
    for pid in sorted(gamma.points_on(centre)):
        tails, heads = gamma.arrows_at_point(pid)
        (a,) = tails + heads
        nxt = gamma.component_of(a.tail if a.head == pid else a.head)
        length, prev, cur = 0, centre, nxt
        while cur is not None:
            length += 1
            forward = [v for v in adj[cur] if v != prev]
            prev, cur = cur, (forward[0] if forward else None)
        arms.append((pid, a.id, length))
    return centre, arms


def hilbert21_demo(
    gamma,
    weights,
    rep,
    positions: Sequence[complex] | None = None,
    orders: Sequence[int] | None = None,
    cfg: IntegratorConfig = IntegratorConfig(),
    tol: float = 1e-6,
) -> Report:
    """Fuchsian system at the centre of a star, its unipotent monodromies, and their product.

    ``orders[k]`` is the unipotency order n_k for arm k; by default
    n_k = 1 + (arm length), the star shape attached to (n_1, n_2, n_3).
    """
    from .additive import check_residue_relations

    centre, arms = star_structure(gamma)
    if any(abs(v) > 0 for v in weights.lam.values()):
        raise ValidationError("the Hilbert 21 construction uses lambda = 0")
    rel = check_residue_relations(gamma, weights, rep, 1e-9)
    if not rel.passed:
        raise RelationDefect(f"residue relations fail: {[i.name for i in rel.failures]}")
    orders = list(orders) if orders is not None else [1 + length for _, _, length in arms]
    pids = [pid for pid, _, _ in arms]
    residues = [rep.residues[pid] for pid in pids]
    d = rep.dims[centre]
    total = np.linalg.norm(sum(residues, np.zeros((d, d))))
    if total > BALANCE_TOL * max(1.0, sum(np.linalg.norm(R) for R in residues)):
        raise RelationDefect(f"central residues do not sum to zero (|sum R| = {total:.3e})")
    for pid, R, n in zip(pids, residues, orders):
        scale = max(1.0, np.linalg.norm(R)) ** n
        if np.linalg.norm(np.linalg.matrix_power(R, n)) > 1e-10 * scale:
            raise NonNilpotentResidue(f"residue at {pid!r} is not nilpotent of order {n}")
    pos = list(positions) if positions is not None else [gamma.point(pid).position for pid in pids]
    system = FuchsianSystem(tuple(pos), tuple(residues), d)
    base = default_base(system)
    mons = keyhole_monodromies(system, base, cfg)
    report = Report("Hilbert 21 star monodromy", tol)
    for k, (pid, n) in enumerate(zip(pids, orders)):
        U = np.linalg.matrix_power(mons[k] - np.eye(d), n)
        report.add(f"unipotent at {pid} (n={n})", np.linalg.norm(U))
    P = np.eye(d, dtype=complex)
    for k in angle_ordering(system, base):
        P = mons[k] @ P
    report.add("product of monodromies", np.linalg.norm(P - np.eye(d)))
    report.data["monodromies"] = {pid: mons[k] for k, pid in enumerate(pids)}
    return report
