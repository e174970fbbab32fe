"""Command-line interface.

Exit codes: 0 all checks pass, 1 a check or precondition fails, 2 the input
could not be read or validated.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import io
from .additive import check_deformed_preprojective, check_eigenvalues_in_T, check_residue_relations, lifting_criterion
from .dynkin import verify_dynkin_corollary
from .errors import QuiverMonodromyError, ResonantSet, ValidationError
from .fuchsian import IntegratorConfig, compare_with_algebraic, hilbert21_demo, monodromy_along, total_monodromy_check
from .multiplicative import (
    check_arrow_relations,
    check_eigenvalues_in_S,
    check_mpa_vertex_relation,
    surface_group_relation_check,
)
from .quiver_model import EigenvalueSet
from .reports import Report
from .transform import forward_transform, inverse_transform

COMMANDS = ("check-additive", "check-multiplicative", "transform", "monodromy", "lift", "dynkin", "hilbert21")


@dataclass
class CliConfig:
    command: str
    tol: float = 1e-9
    rtol: float = 1e-10
    atol: float = 1e-12
    max_steps: int = 200_000
    T: str = "strip"
    seed: int = 0
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}")
        for name in ("tol", "rtol", "atol"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"--{name} must be positive")
        if self.format not in ("json", "text"):
            raise ValidationError("--format is json or text")

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(rtol=self.rtol, atol=self.atol, max_steps=self.max_steps)

    def eigenvalue_set(self) -> EigenvalueSet:
        if self.T == "zero":
            return EigenvalueSet.zero()
        if self.T == "strip":
            return EigenvalueSet.strip()
        return io.eigenvalue_set_from_json(io.load_json(self.T))


def _clean(x):
    """JSON has no infinities; report them as null."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _emit(cfg: CliConfig, payload: dict, text: str, out) -> None:
    if cfg.format == "json":
        out.write(json.dumps(_clean(payload), indent=2) + "\n")
    else:
        out.write(text.rstrip() + "\n")


def _emit_reports(cfg, reports: list[Report], out, extra: dict | None = None) -> int:
    passed = all(r.passed for r in reports)
    payload = {"command": cfg.command, "passed": passed, "reports": [r.to_dict() for r in reports]}
    payload.update(extra or {})
    _emit(cfg, payload, "\n".join(r.to_text() for r in reports), out)
    return 0 if passed else 1


# commands ---------------------------------------------------------------------


def cmd_check_additive(cfg, args, out) -> int:
    gamma, weights = io.quiver_from_json(io.load_json(args.quiver))
    rep = io.connection_rep_from_json(io.load_json(args.rep))
    rep.validate(gamma)
    reports = [check_residue_relations(gamma, weights, rep, cfg.tol)]
    if gamma.is_p1_type:
        reports.append(check_deformed_preprojective(gamma, weights, rep, cfg.tol))
    reports.append(check_eigenvalues_in_T(gamma, rep, cfg.eigenvalue_set()))
    return _emit_reports(cfg, reports, out)


def cmd_check_multiplicative(cfg, args, out) -> int:
    gamma, weights = io.quiver_from_json(io.load_json(args.quiver))
    mrep = io.monodromy_rep_from_json(io.load_json(args.rep))
    mrep.validate(gamma)
    reports = []
    if gamma.non_interfering:
        reports.append(check_arrow_relations(gamma, weights, mrep, cfg.tol))
    reports.append(check_mpa_vertex_relation(gamma, weights, mrep, tol=cfg.tol))
    for c in gamma.components:
        reports.append(surface_group_relation_check(gamma, c.id, mrep, tol=cfg.tol))
    reports.append(check_eigenvalues_in_S(gamma, mrep, cfg.eigenvalue_set()))
    return _emit_reports(cfg, reports, out)


def cmd_transform(cfg, args, out) -> int:
    gamma, weights = io.quiver_from_json(io.load_json(args.quiver))
    T = cfg.eigenvalue_set()
    if args.direction == "exp":
        rep = io.connection_rep_from_json(io.load_json(args.rep))
        rep.validate(gamma)
        result = forward_transform(gamma, weights, rep, T, cfg.tol)
        payload = io.monodromy_rep_to_json(result)
        checks = [check_arrow_relations(gamma, weights, result, cfg.tol)] if args.verify else []
    else:
        mrep = io.monodromy_rep_from_json(io.load_json(args.rep))
        mrep.validate(gamma)
        result = inverse_transform(gamma, weights, mrep, T, cfg.tol)
        payload = io.connection_rep_to_json(result)
        checks = [check_residue_relations(gamma, weights, result, cfg.tol)] if args.verify else []
    for r in checks:
        if not r.passed:
            sys.stderr.write("verification failed\n" + r.to_text() + "\n")
            return 1
    if args.output:
        io.dump_json(payload, args.output)
    else:
        out.write(io.dump_json(payload) + "\n")
    return 0


def cmd_monodromy(cfg, args, out) -> int:
    system = io.system_from_json(io.load_json(args.system))
    icfg = cfg.integrator()
    if args.loop is None:
        # no loop: keyhole product around all poles
        return _emit_reports(cfg, [total_monodromy_check(system, cfg=icfg, tol=args.check_tol)], out)
    loop = io.loop_from_json(io.load_json(args.loop))
    enclosed = [p for p in system.positions if loop.winding_number(p) != 0]
    if len(enclosed) == 1:
        report = compare_with_algebraic(system, loop, args.check_tol, icfg)
        M = report.data["monodromy"]
        reports = [report]
    else:
        M = monodromy_along(system, loop, icfg)
        reports = []
    extra = {"monodromy": io.matrix_to_json(M)}
    if cfg.format == "text":
        rows = ["monodromy:"] + ["  " + "  ".join(f"{z.real:+.10f}{z.imag:+.10f}i" for z in row) for row in M]
        text = "\n".join(rows + [r.to_text() for r in reports])
        _emit(cfg, {}, text, out)
        return 0 if all(r.passed for r in reports) else 1
    return _emit_reports(cfg, reports, out, extra)


def cmd_lift(cfg, args, out) -> int:
    lam, summands = io.summands_from_json(io.load_json(args.summands))
    verdict = lifting_criterion(lam, summands)
    lines = [f"summand {k}: value {v.real:g}{v.imag:+g}i" for k, v in enumerate(verdict.values)]
    lines.append("lambda-connection system " + ("exists" if verdict.exists else "does not exist"))
    _emit(cfg, {"command": cfg.command, **verdict.to_dict()}, "\n".join(lines), out)
    return 0 if verdict.exists else 1


def cmd_dynkin(cfg, args, out) -> int:
    dims = [int(x) for x in args.dims.split(",")] if args.dims else 2
    report = verify_dynkin_corollary(args.type, args.samples, dims, cfg.seed, cfg.tol)
    _emit(cfg, {"command": cfg.command, **report.to_dict()}, report.to_text(), out)
    return 0 if report.passed else 1


def _parse_complex(s: str) -> complex:
    try:
        if "," in s:
            re_, im = s.split(",")
            return complex(float(re_), float(im))
        return complex(s.replace("i", "j"))
    except ValueError:
        raise ValidationError(f"cannot read {s!r} as a complex number") from None


def cmd_hilbert21(cfg, args, out) -> int:
    d = io.load_json(args.star)
    try:
        gamma, weights = io.quiver_from_json(d["quiver"])
        rep = io.connection_rep_from_json(d["representation"])
    except (KeyError, TypeError):
        raise ValidationError("star JSON needs 'quiver' and 'representation'") from None
    rep.validate(gamma)
    positions = [_parse_complex(s) for s in args.positions] if args.positions else d.get("positions")
    if positions is not None:
        positions = [p if isinstance(p, complex) else io.complex_from_json(p) for p in positions]
    report = hilbert21_demo(gamma, weights, rep, positions, d.get("orders"), cfg.integrator(), args.check_tol)
    extra = {"monodromies": {k: io.matrix_to_json(M) for k, M in report.data["monodromies"].items()}}
    return _emit_reports(cfg, [report], out, extra)


HANDLERS = {
    "check-additive": cmd_check_additive,
    "check-multiplicative": cmd_check_multiplicative,
    "transform": cmd_transform,
    "monodromy": cmd_monodromy,
    "lift": cmd_lift,
    "dynkin": cmd_dynkin,
    "hilbert21": cmd_hilbert21,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="relation tolerance")
    common.add_argument("--T", dest="T", default="strip", help="eigenvalue set: zero, strip, or a JSON file")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rtol", type=float, default=1e-10)
    common.add_argument("--atol", type=float, default=1e-12)
    common.add_argument("--max-steps", type=int, default=200_000)

    parser = argparse.ArgumentParser(prog="quivermonodromy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-additive", parents=[common], help="residue and vertex relations")
    p.add_argument("quiver")
    p.add_argument("rep")

    p = sub.add_parser("check-multiplicative", parents=[common], help="arrow, vertex and surface relations")
    p.add_argument("quiver")
    p.add_argument("rep")

    p = sub.add_parser("transform", parents=[common], help="residue data <-> monodromy data")
    p.add_argument("quiver")
    p.add_argument("rep")
    p.add_argument("--direction", choices=("exp", "log"), default="exp")
    p.add_argument("--verify", action="store_true", help="re-check the target relations")
    p.add_argument("-o", "--output")

    p = sub.add_parser("monodromy", parents=[common], help="numerical monodromy of a Fuchsian system")
    p.add_argument("system")
    p.add_argument("loop", nargs="?", help="loop JSON; without it the keyhole product is checked")
    p.add_argument("--check-tol", type=float, default=1e-6)

    p = sub.add_parser("lift", parents=[common], help="lifting criterion over summand descriptors")
    p.add_argument("summands")

    p = sub.add_parser("dynkin", parents=[common], help="sampled checks on a Dynkin quiver")
    p.add_argument("--type", required=True)
    p.add_argument("--dims", help="comma separated dimension bounds, one per vertex or one for all")
    p.add_argument("--samples", type=int, default=200)

    p = sub.add_parser("hilbert21", parents=[common], help="unipotent monodromy from a three-arm star")
    p.add_argument("star")
    p.add_argument("--positions", nargs=3, help="three pole positions, e.g. -1 1 0,1")
    p.add_argument("--check-tol", type=float, default=1e-6)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig(args.command, args.tol, args.rtol, args.atol, args.max_steps, args.T, args.seed, args.format)
        np.seterr(all="ignore")
        return HANDLERS[args.command](cfg, args, out)
    except io.InputError as e:
        payload = {"error": "input", "message": str(e), "path": str(e.path) if e.path else None}
        if e.line is not None:
            payload.update(line=e.line, column=e.column)
        sys.stderr.write(json.dumps(payload) + "\n")
        return 2
    except (ValidationError, ResonantSet) as e:
        sys.stderr.write(json.dumps({"error": "input", "kind": type(e).__name__, "message": str(e)}) + "\n")
        return 2
    except QuiverMonodromyError as e:
        sys.stderr.write(json.dumps({"error": "check", "kind": type(e).__name__, "message": str(e)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
