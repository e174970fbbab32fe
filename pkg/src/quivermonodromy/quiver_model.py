"""Combinatorial data: Riemann surface quivers, weights, eigenvalue sets."""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import ResonantSet, ShapeMismatch, ValidationError

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class Component:
    id: str
    genus: int = 0

    def __post_init__(self):
        if self.genus < 0:
            raise ValidationError(f"component {self.id!r}: genus must be >= 0, got {self.genus}")

    @property
    def is_p1(self) -> bool:
        return self.genus == 0


@dataclass(frozen=True)
class MarkedPoint:
    id: str
    component: str
    position: complex = 0j


@dataclass(frozen=True)
class Arrow:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class ComponentQuiver:
    """Ordinary quiver with one vertex per component and one arrow per arrow of the surface quiver."""

    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]  # (arrow id, tail vertex, head vertex)

    def loops(self):
        return [a for a in self.arrows if a[1] == a[2]]


@dataclass(frozen=True)
class RiemannSurfaceQuiver:
    components: tuple[Component, ...]
    marked_points: tuple[MarkedPoint, ...]
    arrows: tuple[Arrow, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "marked_points", tuple(self.marked_points))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        _require_unique("component", [c.id for c in self.components])
        _require_unique("marked point", [p.id for p in self.marked_points])
        _require_unique("arrow", [a.id for a in self.arrows])
        comp_ids = {c.id for c in self.components}
        for p in self.marked_points:
            if p.component not in comp_ids:
                raise ValidationError(f"marked point {p.id!r} references unknown component {p.component!r}")
        point_ids = {p.id for p in self.marked_points}
        for a in self.arrows:
            for end in (a.tail, a.head):
                if end not in point_ids:
                    raise ValidationError(f"arrow {a.id!r} references unknown marked point {end!r}")
            if a.tail == a.head:
                raise ValidationError(f"arrow {a.id!r} has the same marked point {a.tail!r} as head and tail")
        seen: dict[tuple[str, complex], str] = {}
        for p in self.marked_points:
            key = (p.component, complex(p.position))
            if key in seen:
                raise ValidationError(
                    f"marked points {seen[key]!r} and {p.id!r} share position {p.position} on {p.component!r}"
                )
            seen[key] = p.id

    # lookups -------------------------------------------------------------

    @cached_property
    def _components(self) -> dict[str, Component]:
        return {c.id: c for c in self.components}

    @cached_property
    def _points(self) -> dict[str, MarkedPoint]:
        return {p.id: p for p in self.marked_points}

    @cached_property
    def _arrows(self) -> dict[str, Arrow]:
        return {a.id: a for a in self.arrows}

    def component(self, cid: str) -> Component:
        return self._components[cid]

    def point(self, pid: str) -> MarkedPoint:
        return self._points[pid]

    def arrow(self, aid: str) -> Arrow:
        return self._arrows[aid]

    def component_of(self, pid: str) -> str:
        return self._points[pid].component

    def points_on(self, cid: str) -> list[str]:
        return [p.id for p in self.marked_points if p.component == cid]

    def arrows_with_head_on(self, cid: str) -> list[Arrow]:
        return sorted((a for a in self.arrows if self.component_of(a.head) == cid), key=lambda a: a.id)

    def arrows_with_tail_on(self, cid: str) -> list[Arrow]:
        return sorted((a for a in self.arrows if self.component_of(a.tail) == cid), key=lambda a: a.id)

    def arrows_at_point(self, pid: str) -> tuple[list[Arrow], list[Arrow]]:
        """(arrows with tail at pid, arrows with head at pid)."""
        return ([a for a in self.arrows if a.tail == pid], [a for a in self.arrows if a.head == pid])

    @cached_property
    def incidence_counts(self) -> Counter:
        return Counter([a.tail for a in self.arrows] + [a.head for a in self.arrows])

    @property
    def non_interfering(self) -> bool:
        return all(n <= 1 for n in self.incidence_counts.values())

    @property
    def unused_points(self) -> list[str]:
        return [p.id for p in self.marked_points if p.id not in self.incidence_counts]

    @property
    def is_p1_type(self) -> bool:
        return all(c.is_p1 for c in self.components)


def _require_unique(kind: str, ids: list[str]) -> None:
    dup = [k for k, n in Counter(ids).items() if n > 1]
    if dup:
        raise ValidationError(f"duplicate {kind} id(s): {', '.join(map(repr, dup))}")


def component_quiver(gamma: RiemannSurfaceQuiver) -> ComponentQuiver:
    return ComponentQuiver(
        vertices=tuple(c.id for c in gamma.components),
        arrows=tuple((a.id, gamma.component_of(a.tail), gamma.component_of(a.head)) for a in gamma.arrows),
    )


def check_non_interfering(gamma: RiemannSurfaceQuiver) -> bool:
    """True iff every marked point is the endpoint of exactly one arrow incidence.

    Marked points that belong to no arrow make the answer False: a marked
    point is by definition an arrow endpoint.
    """
    return gamma.non_interfering and not gamma.unused_points


def p1_quiver(vertices: Iterable[str], arrows: Iterable[tuple[str, str, str]]) -> RiemannSurfaceQuiver:
    """Build a P^1-type surface quiver with a prescribed component quiver.

    Each arrow ``(aid, i, j)`` gets a fresh tail point ``aid.t`` on component
    ``i`` and head point ``aid.h`` on ``j``; points on a component are placed
    on the unit circle so that they are distinct.
    """
    vertices = list(vertices)
    arrows = list(arrows)
    per_comp: dict[str, list[str]] = {v: [] for v in vertices}
    for aid, i, j in arrows:
        per_comp[i].append(f"{aid}.t")
        per_comp[j].append(f"{aid}.h")
    points = []
    for v, pids in per_comp.items():
        n = len(pids)
        for k, pid in enumerate(pids):
            points.append(MarkedPoint(pid, v, cmath.exp(TWO_PI_I * k / max(n, 1))))
    return RiemannSurfaceQuiver(
        components=tuple(Component(v, 0) for v in vertices),
        marked_points=tuple(points),
        arrows=tuple(Arrow(aid, f"{aid}.t", f"{aid}.h") for aid, _, _ in arrows),
    )


@dataclass(frozen=True)
class WeightData:
    """Scalars lambda_p attached to the marked points."""

    lam: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "lam", {k: complex(v) for k, v in dict(self.lam).items()})

    @classmethod
    def zero(cls, gamma: RiemannSurfaceQuiver) -> "WeightData":
        return cls({p.id: 0j for p in gamma.marked_points})

    def validate_for(self, gamma: RiemannSurfaceQuiver) -> None:
        expected = {p.id for p in gamma.marked_points}
        got = set(self.lam)
        if got != expected:
            missing, extra = sorted(expected - got), sorted(got - expected)
            raise ValidationError(f"weights must cover exactly the marked points (missing {missing}, extra {extra})")

    def at(self, pid: str) -> complex:
        return self.lam[pid]

    def sigma(self, pid: str) -> complex:
        return cmath.exp(TWO_PI_I * self.lam[pid])

    def component_lambda(self, gamma: RiemannSurfaceQuiver, cid: str) -> complex:
        return sum((self.lam[p] for p in gamma.points_on(cid)), 0j)

    def q(self, gamma: RiemannSurfaceQuiver, cid: str) -> complex:
        return cmath.exp(TWO_PI_I * self.component_lambda(gamma, cid))


# eigenvalue sets -----------------------------------------------------------

ZERO_ONLY = "zero"
HALF_OPEN_STRIP = "strip"
EXPLICIT_FINITE = "finite"


def _is_nonzero_integer(z: complex, tol: float) -> bool:
    n = round(z.real)
    return n != 0 and abs(z - n) <= tol


@dataclass(frozen=True)
class EigenvalueSet:
    """A non-resonant subset T of C containing 0.

    ``kind`` is one of ``"zero"`` (T = {0}), ``"strip"`` (0 <= Re z < 1)
    or ``"finite"`` (the members listed in ``values``).
    """

    kind: str = ZERO_ONLY
    values: tuple[complex, ...] = ()

    def __post_init__(self):
        if self.kind not in (ZERO_ONLY, HALF_OPEN_STRIP, EXPLICIT_FINITE):
            raise ValidationError(f"unknown eigenvalue set kind {self.kind!r}")
        if self.kind == EXPLICIT_FINITE:
            vals: list[complex] = []
            for v in self.values:
                v = complex(v)
                if not any(abs(v - w) <= 1e-14 for w in vals):
                    vals.append(v)
            object.__setattr__(self, "values", tuple(vals))
            if not any(abs(v) <= 1e-14 for v in vals):
                raise ValidationError("eigenvalue set must contain 0")
        else:
            object.__setattr__(self, "values", (0j,) if self.kind == ZERO_ONLY else ())

    @classmethod
    def zero(cls) -> "EigenvalueSet":
        return cls(ZERO_ONLY)

    @classmethod
    def strip(cls) -> "EigenvalueSet":
        return cls(HALF_OPEN_STRIP)

    @classmethod
    def finite(cls, values: Iterable[complex]) -> "EigenvalueSet":
        return cls(EXPLICIT_FINITE, tuple(values))

    def resonant_pairs(self, tol: float = 1e-12) -> list[tuple[complex, complex]]:
        vals = self.values
        return [
            (vals[i], vals[j])
            for i in range(len(vals))
            for j in range(i + 1, len(vals))
            if _is_nonzero_integer(vals[i] - vals[j], tol)
        ]

    def is_non_resonant(self, tol: float = 1e-12) -> bool:
        return not self.resonant_pairs(tol)

    def distance(self, z: complex) -> float:
        z = complex(z)
        if self.kind == HALF_OPEN_STRIP:
            if z.real < 0:
                return -z.real
            if z.real >= 1:
                # the right edge is excluded; report the distance to the closure
                return z.real - 1.0 if z.real > 1 else 0.0
            return 0.0
        return min(abs(z - t) for t in self.values)

    def contains(self, z: complex, tol: float = 1e-10) -> bool:
        z = complex(z)
        if self.kind == HALF_OPEN_STRIP:
            return -tol <= z.real < 1.0
        return self.distance(z) <= tol

    def to_dict(self):
        if self.kind == EXPLICIT_FINITE:
            return {"kind": self.kind, "values": [[v.real, v.imag] for v in self.values]}
        return {"kind": self.kind}


def membership_in_T(z: complex, T: EigenvalueSet, tol: float = 1e-10) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return T.contains(z, tol)


@dataclass(frozen=True)
class ExponentialImage:
    """S = {exp(2 pi i t) - 1 : t in T}, with the branch map back into T."""

    T: EigenvalueSet
    values: tuple[complex, ...] = ()

    @property
    def kind(self) -> str:
        return self.T.kind

    def contains(self, s: complex, tol: float = 1e-8) -> bool:
        s = complex(s)
        if self.kind == HALF_OPEN_STRIP:
            return abs(1 + s) > tol
        return min(abs(s - v) for v in self.values) <= tol

    def preimages(self, s: complex, tol: float = 1e-8) -> list[complex]:
        """Members t of T with exp(2 pi i t) - 1 within tol of s."""
        s = complex(s)
        if self.kind == HALF_OPEN_STRIP:
            if abs(1 + s) <= tol:
                return []
            t = cmath.log(1 + s) / TWO_PI_I
            # principal log gives Re t in (-1/2, 1/2]; fold into [0, 1)
            if t.real < -1e-12:
                t += 1
            return [complex(max(t.real, 0.0), t.imag)]
        return [t for t, v in zip(self.T.values, self.values) if abs(s - v) <= tol]


def eigenvalue_set_S(T: EigenvalueSet) -> ExponentialImage:
    if T.kind == HALF_OPEN_STRIP:
        return ExponentialImage(T)
    pairs = T.resonant_pairs()
    if pairs:
        a, b = pairs[0]
        raise ResonantSet(f"members {a} and {b} of T differ by a nonzero integer")
    images = tuple(0j if t == 0 else cmath.exp(TWO_PI_I * t) - 1 for t in T.values)
    return ExponentialImage(T, images)


def as_matrix(x, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce to a read-only complex 2-D array, checking the shape if given."""
    a = np.array(x, dtype=complex)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValidationError(f"expected a matrix, got array of shape {a.shape}")
    if rows is not None and cols is not None and a.shape != (rows, cols):
        raise ShapeMismatch(f"expected shape {(rows, cols)}, got {a.shape}")
    a.setflags(write=False)
    return a
