"""Command-line interface.

Exit codes: 0 on success, 1 for usage or parse errors, 2 for domain errors
(typically a matrix that fails the subgroup membership test).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import cuboid, polygon
from .cosets import FAMILIES, MembershipError, build_system
from .psl2 import parse_matrix
from .reduce import ExactPoint, act_point, evaluate_word, express, locate_point


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_group_args(sub):
    sub.add_argument("--group", required=True, choices=FAMILIES)
    sub.add_argument("--level", required=True, type=int)


def _build_parser() -> _Parser:
    parser = _Parser(prog="modpoly", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("graph", help="emit the bipartite cuboid graph")
    _add_group_args(p)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--output", default=None)

    p = subs.add_parser("polygon", help="emit the fundamental polygon")
    _add_group_args(p)
    p.add_argument("--format", choices=("json", "svg"), default="json")
    p.add_argument("--output", default=None)

    p = subs.add_parser("generators", help="emit the independent generators")
    _add_group_args(p)
    p.add_argument("--output", default=None)

    p = subs.add_parser("invariants", help="emit surface invariants")
    _add_group_args(p)
    p.add_argument("--output", default=None)

    p = subs.add_parser("express", help="write a subgroup element as a generator word")
    _add_group_args(p)
    p.add_argument("--matrix", required=True, help='entries "a,b,c,d"')
    p.add_argument("--trace", action="store_true",
                   help="use the geodesic tracer instead of coset rewriting")
    p.add_argument("--output", default=None)

    p = subs.add_parser("locate", help="reduce a point into the fundamental polygon")
    _add_group_args(p)
    p.add_argument("--x", required=True,
                   help="rational x, e.g. 3/7 (write --x=-3/7 for negatives)")
    p.add_argument("--y", required=True, help="rational y > 0, e.g. 5/2")
    p.add_argument("--output", default=None)

    p = subs.add_parser("bench", help="build-time scaling rows (level, index, seconds)")
    p.add_argument("--group", required=True, choices=FAMILIES)
    p.add_argument("--levels", required=True, help="comma-separated levels")
    p.add_argument("--output", default=None)

    return parser


def _check_level(level: int):
    if level < 1:
        raise UsageError(f"--level must be >= 1, got {level}")


def _emit(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w") as handle:
            handle.write(text)


def _dumps(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ": "), indent=2) + "\n"


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except MembershipError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "bench":
        return _cmd_bench(args)
    _check_level(args.level)
    system = build_system(args.group, args.level)

    if cmd == "graph":
        graph = cuboid.build_graph(system)
        text = cuboid.to_json(graph) if args.format == "json" else cuboid.to_dot(graph)
        _emit(text, args.output)
        return 0

    if cmd == "polygon":
        poly = polygon.build_polygon(system)
        text = polygon.to_json(poly) if args.format == "json" else polygon.to_svg(poly)
        _emit(text, args.output)
        return 0

    if cmd == "generators":
        poly = polygon.build_polygon(system)
        data = [{"matrix": list(g.tuple()), "order": order} for g, order in poly.generators]
        _emit(_dumps(data), args.output)
        return 0

    if cmd == "invariants":
        inv = cuboid.graph_invariants(cuboid.build_graph(system))
        data = {
            "index": inv.n,
            "e2": inv.e2,
            "e3": inv.e3,
            "cusps": inv.cusp_count,
            "cusp_widths": list(inv.cusp_widths),
            "betti": inv.betti,
            "genus": inv.genus,
            "generators": inv.n_generators,
        }
        _emit(_dumps(data), args.output)
        return 0

    if cmd == "express":
        try:
            g = parse_matrix(args.matrix)
        except ValueError as err:
            raise UsageError(str(err)) from None
        poly = polygon.build_polygon(system)
        word = express(poly, g, use_trace=args.trace)
        check = evaluate_word(poly.generators, word)
        if check != g:
            raise RuntimeError("internal error: word does not evaluate back")
        data = {"word": [[i, e] for i, e in word],
                "matrix": list(g.tuple()),
                "evaluates_to": list(check.tuple())}
        _emit(_dumps(data), args.output)
        return 0

    if cmd == "locate":
        x = _frac(args.x)
        y = _frac(args.y)
        if y <= 0:
            raise UsageError("--y must be positive (point must lie in the upper half-plane)")
        poly = polygon.build_polygon(system)
        z = ExactPoint(x, y)
        w, word = locate_point(poly, z)
        g = evaluate_word(poly.generators, word)
        if act_point(g, w) != z:
            raise RuntimeError("internal error: locate postcondition failed")
        data = {
            "input": [str(x), str(y)],
            "point": [str(w.x), str(w.y)],
            "word": [[i, e] for i, e in word],
            "element": list(g.tuple()),
        }
        _emit(_dumps(data), args.output)
        return 0

    raise UsageError(f"unknown command {cmd!r}")


def _cmd_bench(args) -> int:
    try:
        levels = [int(v) for v in args.levels.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --levels value {args.levels!r}") from None
    if not levels or any(v < 1 for v in levels):
        raise UsageError("--levels needs positive integers")
    lines = []
    for level in levels:
        start = time.perf_counter()
        system = build_system(args.group, level)
        polygon.build_polygon(system)
        elapsed = time.perf_counter() - start
        lines.append(f"{level}\t{system.n}\t{elapsed:.3f}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
