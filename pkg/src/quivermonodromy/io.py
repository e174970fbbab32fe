"""JSON formats for matrices, quivers, representations, Fuchsian systems and loops.

Complex numbers are always [re, im] pairs. Matrices are
{"rows": r, "cols": c, "entries": [[re, im], ...]} in row-major order.
Floats go through Python's shortest round-trip repr, so parse(emit(x)) == x.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .additive import ConnectionSystemRep, SummandDescriptor
from .errors import ValidationError
from .fuchsian import FuchsianSystem, Loop
from .multiplicative import MonodromyRep
from .quiver_model import Arrow, Component, EigenvalueSet, MarkedPoint, RiemannSurfaceQuiver, WeightData


class InputError(Exception):
    """Unreadable or invalid input file; carries a location when one is known."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path, self.line, self.column = path, line, column
        where = str(path) if path else "input"
        if line is not None:
            where += f":{line}:{column}"
        super().__init__(f"{where}: {message}")


def load_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputError("file does not exist", path)
    text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"malformed JSON ({e.msg})", path, e.lineno, e.colno) from None


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


# scalars and matrices ---------------------------------------------------------


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)):
        raise ValidationError(f"complex numbers are [re, im] pairs, got {v!r}")
    return complex(float(v[0]), float(v[1]))


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2:
        raise ValidationError("only 2D matrices serialize")
    return {"rows": M.shape[0], "cols": M.shape[1], "entries": [complex_to_json(z) for z in M.ravel()]}


def matrix_from_json(d) -> np.ndarray:
    if not isinstance(d, dict) or not {"rows", "cols", "entries"} <= set(d):
        raise ValidationError("a matrix needs 'rows', 'cols' and 'entries'")
    r, c = int(d["rows"]), int(d["cols"])
    entries = d["entries"]
    if len(entries) != r * c:
        raise ValidationError(f"matrix declares {r}x{c} but has {len(entries)} entries")
    M = np.array([complex_from_json(v) for v in entries], dtype=complex).reshape(r, c)
    if not all(math.isfinite(x) for x in np.concatenate([M.real.ravel(), M.imag.ravel()])):
        raise ValidationError("matrix entries must be finite")
    return M


# quivers --------------------------------------------------------------------


def quiver_to_json(gamma: RiemannSurfaceQuiver, weights: WeightData | None = None) -> dict:
    out = {
        "components": [{"id": c.id, "genus": c.genus} for c in gamma.components],
        "marked_points": [
            {"id": p.id, "component": p.component, "position": complex_to_json(p.position)} for p in gamma.marked_points
        ],
        "arrows": [{"id": a.id, "tail": a.tail, "head": a.head} for a in gamma.arrows],
    }
    if weights is not None:
        out["lambda"] = {k: complex_to_json(v) for k, v in weights.lam.items()}
    return out


def quiver_from_json(d) -> tuple[RiemannSurfaceQuiver, WeightData]:
    """Quiver plus weights; missing "lambda" entries default to 0."""
    try:
        comps = tuple(Component(str(c["id"]), int(c.get("genus", 0))) for c in d["components"])
        points = tuple(
            MarkedPoint(str(p["id"]), str(p["component"]), complex_from_json(p.get("position", [0.0, 0.0])))
            for p in d["marked_points"]
        )
        arrows = tuple(Arrow(str(a["id"]), str(a["tail"]), str(a["head"])) for a in d.get("arrows", []))
    except (KeyError, TypeError) as e:
        raise ValidationError(f"quiver JSON is missing a field: {e}") from None
    gamma = RiemannSurfaceQuiver(comps, points, arrows)
    lam = {p.id: 0j for p in points}
    for k, v in (d.get("lambda") or {}).items():
        if k not in lam:
            raise ValidationError(f"lambda given for unknown marked point {k!r}")
        lam[k] = complex_from_json(v)
    return gamma, WeightData(lam)


# representations --------------------------------------------------------------


def connection_rep_to_json(rep: ConnectionSystemRep) -> dict:
    return {
        "dims": dict(rep.dims),
        "residues": {k: matrix_to_json(v) for k, v in rep.residues.items()},
        "arrows": {k: {"E": matrix_to_json(E), "nabla": matrix_to_json(N)} for k, (E, N) in rep.arrow_maps.items()},
    }


def connection_rep_from_json(d) -> ConnectionSystemRep:
    try:
        return ConnectionSystemRep(
            {k: int(v) for k, v in d["dims"].items()},
            {k: matrix_from_json(v) for k, v in d["residues"].items()},
            {k: (matrix_from_json(v["E"]), matrix_from_json(v["nabla"])) for k, v in d.get("arrows", {}).items()},
        )
    except (KeyError, TypeError) as e:
        raise ValidationError(f"representation JSON is missing a field: {e}") from None


def monodromy_rep_to_json(mrep: MonodromyRep) -> dict:
    return {
        "dims": dict(mrep.dims),
        "point_monodromies": {k: matrix_to_json(v) for k, v in mrep.point_monodromies.items()},
        "genus": {
            k: [{"e": matrix_to_json(e), "e_star": matrix_to_json(es)} for e, es in v] for k, v in mrep.genus_maps.items()
        },
        "arrows": {
            k: {"rho": matrix_to_json(r), "rho_star": matrix_to_json(rs)} for k, (r, rs) in mrep.arrow_maps.items()
        },
    }


def monodromy_rep_from_json(d) -> MonodromyRep:
    try:
        return MonodromyRep(
            {k: int(v) for k, v in d["dims"].items()},
            {k: matrix_from_json(v) for k, v in d["point_monodromies"].items()},
            {k: (matrix_from_json(v["rho"]), matrix_from_json(v["rho_star"])) for k, v in d.get("arrows", {}).items()},
            {
                k: [(matrix_from_json(p["e"]), matrix_from_json(p["e_star"])) for p in v]
                for k, v in d.get("genus", {}).items()
            },
        )
    except (KeyError, TypeError) as e:
        raise ValidationError(f"representation JSON is missing a field: {e}") from None


def rep_from_json(d):
    """Either kind of representation, told apart by "residues" vs "point_monodromies"."""
    if "residues" in d:
        return connection_rep_from_json(d)
    if "point_monodromies" in d:
        return monodromy_rep_from_json(d)
    raise ValidationError("representation JSON needs 'residues' or 'point_monodromies'")


# eigenvalue sets, summands ----------------------------------------------------


def eigenvalue_set_from_json(d) -> EigenvalueSet:
    kind = d.get("kind")
    if kind == "zero":
        return EigenvalueSet.zero()
    if kind == "strip":
        return EigenvalueSet.strip()
    if kind == "finite":
        return EigenvalueSet.finite(complex_from_json(v) for v in d.get("values", []))
    raise ValidationError(f"unknown eigenvalue set kind {kind!r}")


def summands_from_json(d) -> tuple[dict[str, complex], list[SummandDescriptor]]:
    """{"lambda": {component: [re, im]}, "summands": [{"ranks": {...}, "degrees": {...}}]}."""
    try:
        lam = {k: complex_from_json(v) for k, v in d.get("lambda", {}).items()}
        summands = [
            SummandDescriptor({k: int(v) for k, v in s["ranks"].items()}, {k: int(v) for k, v in s.get("degrees", {}).items()})
            for s in d["summands"]
        ]
    except (KeyError, TypeError) as e:
        raise ValidationError(f"summands JSON is missing a field: {e}") from None
    return lam, summands


# Fuchsian systems and loops -----------------------------------------------------


def system_to_json(system: FuchsianSystem) -> dict:
    return {
        "dim": system.dim,
        "balanced": system.balanced,
        "poles": [{"position": complex_to_json(p), "residue": matrix_to_json(R)} for p, R in zip(system.positions, system.residues)],
    }


def system_from_json(d) -> FuchsianSystem:
    """Residues need not sum to zero unless "balanced": true is given (disk models are allowed)."""
    try:
        poles = d["poles"]
        return FuchsianSystem(
            tuple(complex_from_json(p["position"]) for p in poles),
            tuple(matrix_from_json(p["residue"]) for p in poles),
            int(d["dim"]),
            bool(d.get("balanced", False)),
        )
    except (KeyError, TypeError) as e:
        raise ValidationError(f"system JSON is missing a field: {e}") from None


def loop_from_json(d) -> Loop:
    """{"circle": {"center", "radius", "basepoint_angle", "orientation"}} or {"polyline": [[re, im], ...]}."""
    if "circle" in d:
        c = d["circle"]
        return Loop.circle(
            complex_from_json(c.get("center", [0.0, 0.0])),
            float(c.get("radius", 1.0)),
            float(c.get("basepoint_angle", 0.0)),
            int(c.get("orientation", 1)),
        )
    if "polyline" in d:
        return Loop.polyline([complex_from_json(v) for v in d["polyline"]])
    raise ValidationError("loop JSON needs a 'circle' or 'polyline' entry")
