"""Command-line front end: analyze, cones, table4, fixtures."""
from __future__ import annotations

import argparse
import json
import sys
import time

from . import __version__
from .checks import CheckRequest, check_all, run_request
from .errors import CqlabError
from .kernel.linalg import fmt_vec, frac
from .model.instance import load_problem
from .model.multiindex import parse_delta
from .report import build_report, jsonable, to_json, to_text, verdicts_report

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT = 0, 1, 2


def _fail(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_INPUT


def cmd_analyze(args) -> int:
    inst = load_problem(args.file)
    which = tuple(s.strip() for s in args.checks.split(",") if s.strip()) if args.checks else ("all",)
    delta = parse_delta(args.delta) if args.delta else None
    if delta is not None and delta.d != inst.d:
        return _fail(f"multi-index {delta} does not sum to d = {inst.d}")
    t0 = time.perf_counter()
    if which == ("all",):
        rep = check_all(inst, budget=args.budget, seed=args.seed, probe=not args.no_probe)
        report, timings = build_report(inst, rep), rep.timings
    else:
        req = CheckRequest(which, delta, args.directional, args.budget, args.seed)
        report, timings = verdicts_report(inst, run_request(inst, req), args.seed), {}
    timings = {**timings, "total": time.perf_counter() - t0}
    if args.format == "json":
        sys.stdout.write(to_json(report))
    else:
        sys.stdout.write(to_text(report, timings if args.timing else None))
    return EXIT_OK


def _cone_dict(union) -> list[dict]:
    return [{"rays": [list(r) for r in c.v.rays], "lineality": [list(l) for l in c.v.lineality]}
            for c in union.pieces]


def _cone_text(union) -> str:
    if union.is_empty:
        return "∅"
    out = []
    for c in union.pieces:
        parts = [f"R+{fmt_vec(r)}" for r in c.v.rays] + [f"R{fmt_vec(l)}" for l in c.v.lineality]
        out.append(" + ".join(parts) if parts else "{0}")
    return " U ".join(out)


def cmd_cones(args) -> int:
    from .normals import (PolyConeUnion, directional_limiting_normal_cone, limiting_normal_cone,
                          regular_normal_cone, tangent_cone)
    inst = load_problem(args.file)
    gamma = inst.require_disjunctive()
    y = inst.ybar
    cones = {
        "T": tangent_cone(gamma, y),
        "N_regular": PolyConeUnion(gamma.dim, (regular_normal_cone(gamma, y),)),
        "N": limiting_normal_cone(gamma, y),
    }
    if args.direction:
        v = tuple(frac(s.strip()) for s in args.direction.split(","))
        if len(v) != gamma.dim:
            return _fail(f"direction needs {gamma.dim} entries")
        cones["N_dir"] = directional_limiting_normal_cone(gamma, y, v)
    if args.format == "json":
        out = {"point": jsonable(list(y)), "direction": jsonable(list(v)) if args.direction else None,
               "cones": {k: jsonable(_cone_dict(u)) for k, u in cones.items()}}
        sys.stdout.write(json.dumps(out, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    names = {"T": "T", "N_regular": "N̂", "N": "N", "N_dir": f"N(·;{fmt_vec(v) if args.direction else ''})"}
    print(f"set {gamma.name} at F(x̄) = {fmt_vec(y)}")
    for k, u in cones.items():
        print(f"{names[k]:<14} = {_cone_text(u)}")
    return EXIT_OK


def _parse_cell(text: str) -> tuple:
    vals = tuple(int(frac(s.strip())) for s in text.split(","))
    if len(vals) != 4:
        raise ValueError(f"cell '{text}' needs four values a,b,c,d")
    return vals


def cmd_table4(args) -> int:
    from .table4 import TableSpec, format_table, run_table
    spec = TableSpec()
    if not args.cells or args.cells == ["all"]:
        cells = None
    else:
        cells = [_parse_cell(c) for c in args.cells]
        unknown = [c for c in cells if c not in spec.cells]
        if unknown:
            return _fail(f"no expected label for cells {unknown}")
    t0 = time.perf_counter()
    results = run_table(cells, spec, args.seed)
    sys.stdout.write(format_table(results))
    print(f"time: {time.perf_counter() - t0:.2f}s")
    return EXIT_OK if all(r.match for r in results) else EXIT_MISMATCH


def cmd_fixtures(args) -> int:
    from .fixtures import fixtures, run_fixtures
    reg = fixtures()
    if args.action == "list":
        for fx in reg.values():
            print(f"{fx.name:<20} {fx.description}")
        return EXIT_OK
    unknown = [n for n in args.names if n not in reg]
    if unknown:
        return _fail(f"unknown fixtures: {', '.join(unknown)}")
    outcomes = run_fixtures(args.names or None, args.seed)
    for o in outcomes:
        print(o.line())
    bad = sum(not o.passed for o in outcomes)
    print(f"{len(outcomes)} fixtures, {bad} failed")
    return EXIT_OK if not bad else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cqlab", description="Constraint qualification checks for F(x) in Gamma.")
    p.add_argument("--version", action="version", version=f"cqlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="run constraint-qualification checks on a problem file")
    a.add_argument("file")
    a.add_argument("--checks", help="comma-separated checks (default: all)")
    a.add_argument("--delta", help="multi-index block sizes, e.g. 1,1")
    a.add_argument("--directional", action="store_true")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--budget", type=int, default=20000, help="witness-search path budget")
    a.add_argument("--format", choices=("text", "json"), default="text")
    a.add_argument("--no-probe", action="store_true", help="skip the sampling probe")
    a.add_argument("--timing", action="store_true", help="print per-check timings (text only)")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("cones", help="print tangent and normal cones of Gamma at F(x̄)")
    c.add_argument("file")
    c.add_argument("--direction", help="direction v in the range space, e.g. 1,0")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(func=cmd_cones)

    t = sub.add_parser("table4", help="certifying conditions over the quartic-family grid")
    t.add_argument("--cells", nargs="*", help="cells a,b,c,d (default: all)")
    t.add_argument("--seed", type=int, default=0)
    t.set_defaults(func=cmd_table4)

    f = sub.add_parser("fixtures", help="list or run the shipped example problems")
    f.add_argument("action", choices=("list", "run"))
    f.add_argument("names", nargs="*")
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CqlabError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
