"""Command-line interface.

Exit codes: 0 success or the equation holds, 1 the equation fails,
2 usage or file-format error, 3 search budget refused, 4 a conjecture
counterexample was found.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence

from . import catalog, reductions
from .engine import ArityError, DomainError, FiniteMap
from .eqcompiler import compile_pair, programs_to_json, render_equation, specialize_single
from .search import DEFAULT_BUDGET, BudgetExceeded, SearchSpec, enumerate_solutions
from .verifier import check_point, check_samples, check_single

log = logging.getLogger("polygon_eqs")

EXIT_OK, EXIT_FAILS, EXIT_USAGE, EXIT_BUDGET, EXIT_CONJECTURE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _read_map(path: str) -> FiniteMap:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a map object with q, k_in, k_out, table")
    try:
        return FiniteMap.from_json(data)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text + "\n")
        return
    with open(out, "w") as fh:
        fh.write(text + "\n")
    log.info("wrote %s", out)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=False)


# subcommands

def cmd_compile(args) -> int:
    lhs, rhs = compile_pair(args.n, args.dual)
    if args.single:
        lhs, rhs = specialize_single(lhs), specialize_single(rhs)
    if args.format == "text":
        _write(render_equation(lhs, rhs), args.out)
    else:
        _write(programs_to_json(lhs, rhs), args.out)
    return EXIT_OK


def _parse_rational_samples(data) -> list[tuple[Fraction, ...]]:
    if not isinstance(data, list):
        raise UsageError("samples file must hold a list of tuples")
    try:
        return [tuple(Fraction(str(v)) for v in row) for row in data]
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad rational sample: {exc}") from exc


def cmd_verify(args) -> int:
    if (args.map is None) == (args.rational is None):
        raise UsageError("give exactly one of --map FILE or --rational NAME")
    extra = {}
    if args.rational is not None:
        if args.rational not in catalog.RATIONAL:
            raise UsageError(f"unknown rational map {args.rational!r}; known: {sorted(catalog.RATIONAL)}")
        t = catalog.RATIONAL[args.rational][0]()
        if args.samples:
            samples = _parse_rational_samples(_read_json(args.samples))
        else:
            samples = catalog.rational_samples(args.count, args.seed, _arity(args))
            extra["seed"] = args.seed
        verdict = check_point(args.n, args.dual, t, samples)
    else:
        t = _read_map(args.map)
        if args.samples:
            data = _read_json(args.samples)
            if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
                raise UsageError("samples file must hold a list of input tuples")
            verdict = check_samples(args.n, args.dual, t, data)
        else:
            verdict = check_single(args.n, args.dual, t)
    _write(_dumps({**verdict.to_json(), **extra}), None)
    return EXIT_OK if verdict.holds else EXIT_FAILS


def _arity(args) -> int:
    from .verifier import single_programs

    return len(single_programs(args.n, args.dual)[0].inputs)


def cmd_search(args) -> int:
    spec = SearchSpec(args.n, args.dual, args.q, args.limit,
                      "count" if args.count_only else "collect", tuple(args.filter), args.budget)
    try:
        result = enumerate_solutions(spec, jobs=args.jobs)
    except BudgetExceeded as exc:
        log.error("%s; pass --budget or a degenerate-<i> filter to shrink the space", exc)
        return EXIT_BUDGET
    log.info("%d solutions, %d nodes, %.2fs", result.count, result.nodes_visited, result.elapsed)
    _write(_dumps(result.to_json(timing=args.timing)), args.out)
    return EXIT_OK


def _reduce_target(args, t: FiniteMap) -> tuple[FiniteMap, tuple[int, bool]]:
    op = args.op
    if op == "cut-last":
        if args.n is None:
            raise UsageError("cut-last needs --n (the N of the result)")
        return reductions.project_cut_last_codomain(t, args.n), (args.n, False)
    if op == "cut-first":
        if args.n is None:
            raise UsageError("cut-first needs --n (the N of the result)")
        return reductions.project_cut_first_codomain(t, args.n, args.dual), (args.n, args.dual)
    if op == "restrict":
        if args.kind is None:
            raise UsageError("restrict needs --kind (an extension kind or 7.4..7.7)")
        out = reductions.restrict_degenerate(t, args.kind)
        tn, _ = reductions.extension_target(args.kind, out.k_in)
        return out, reductions.extension_source(args.kind, tn)
    if op in reductions.CONSTRUCTORS:
        src, tgt, fn, const = reductions.CONSTRUCTORS[op]
        if const:
            if args.u is None:
                raise UsageError(f"{op} needs --u")
            return fn(t, args.u), tgt
        return fn(t), tgt
    raise UsageError(f"unknown op {op!r}")


def cmd_reduce(args) -> int:
    maps = [_read_map(p) for p in args.inputs]
    if args.op == "dual_tetragon_from_pair":
        if len(maps) != 2:
            raise UsageError("dual_tetragon_from_pair needs --in twice")
        out, target = reductions.dual_tetragon_from_pair(*maps), (4, True)
    else:
        if len(maps) != 1:
            raise UsageError(f"{args.op} takes one --in")
        out, target = _reduce_target(args, maps[0])
    return _emit_checked(out, target, args)


def _emit_checked(out: FiniteMap, target: tuple[int, bool], args) -> int:
    _write(out.dumps(), args.out)
    if args.verify:
        v = check_single(target[0], target[1], out)
        log.info("result %s the %s%d-gon equation", "solves" if v.holds else "does not solve",
                 "dual " if target[1] else "", target[0])
        if not v.holds:
            sys.stderr.write(_dumps(v.to_json()) + "\n")
            return EXIT_FAILS
    return EXIT_OK


def cmd_extend(args) -> int:
    t = _read_map(args.inputs)
    out = reductions.extend_degenerate(t, args.thm, args.n)
    return _emit_checked(out, reductions.extension_target(args.thm, t.k_in), args)


def _one_conjecture(job):
    conj, n, q, proven = job
    return reductions.run_conjecture(conj, n, q, proven=proven)


def cmd_conjectures(args) -> int:
    jobs = []
    for conj in sorted(reductions.CONJECTURES):
        for n in reductions.PROVEN[conj] + (4,):
            if reductions.conjecture_source_n(conj, n) + 1 <= args.max_n:
                jobs.append((conj, n, args.q, n in reductions.PROVEN[conj]))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_one_conjecture, jobs))
    else:
        reports = []
        for job in jobs:
            log.info("conjecture %d, n=%d", job[0], job[1])
            reports.append(_one_conjecture(job))
    found = reductions.any_counterexample(reports)
    body = {"q": args.q, "max_n": args.max_n, "counterexample_found": found,
            "reports": [r.to_json() for r in reports]}
    _write(_dumps(body), args.out)
    errors = [r for r in reports if r.error]
    for r in errors:
        log.warning("conjecture %d n=%d not run: %s", r.conjecture, r.n, r.error)
    return EXIT_CONJECTURE if found else EXIT_OK


def cmd_catalog(args) -> int:
    if args.list:
        _write("\n".join(catalog.names()), None)
        return EXIT_OK
    if args.emit is None:
        raise UsageError("use --list or --emit NAME")
    try:
        t = catalog.emit(args.emit, args.q)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from exc
    _write(t.dumps(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polygon-eqs", description="Polygon equations: compile, verify, search.")
    p.add_argument("--log-level", default="WARNING", help="stderr log level (default WARNING)")
    sub = p.add_subparsers(dest="command", required=True)

    def nd(sp, required=True):
        sp.add_argument("--n", type=int, required=required)
        sp.add_argument("--dual", action="store_true")

    c = sub.add_parser("compile", help="print both sides of the (dual) N-gon equation")
    nd(c)
    c.add_argument("--single", action="store_true", help="drop map labels, keep positions")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--out")
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("verify", help="check a map against an equation")
    nd(v)
    v.add_argument("--map", help="FiniteMap JSON file")
    v.add_argument("--rational", help="built-in rational map name")
    v.add_argument("--samples", help="JSON list of input tuples (only these are checked)")
    v.add_argument("--count", type=int, default=100, help="random rational samples when --samples is absent")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("search", help="enumerate all solutions over a small carrier")
    nd(s)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--limit", type=int)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--filter", action="append", default=[],
                   help="surjective, involutive-after-P or degenerate-<i>; repeatable")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    s.add_argument("--timing", action="store_true", help="include wall time in the JSON")
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    r = sub.add_parser("reduce", help="projections, restrictions and constructors")
    r.add_argument("--op", required=True,
                   help="cut-last, cut-first, restrict, or a constructor name")
    r.add_argument("--in", dest="inputs", action="append", required=True)
    nd(r, required=False)
    r.add_argument("--kind", help="extension kind for restrict")
    r.add_argument("--u", type=int)
    r.add_argument("--verify", action="store_true")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    e = sub.add_parser("extend", help="degenerate extension by an ignored argument")
    e.add_argument("--thm", required=True,
                   help="7.4, 7.5, 7.6, 7.7 or a kind name: " + ", ".join(reductions.EXTENSIONS))
    e.add_argument("--in", dest="inputs", required=True)
    e.add_argument("--n", type=int, help="expected target N (checked)")
    e.add_argument("--verify", action="store_true")
    e.add_argument("--out")
    e.set_defaults(func=cmd_extend)

    k = sub.add_parser("conjectures", help="test the six conjectures empirically")
    k.add_argument("--q", type=int, default=2)
    k.add_argument("--max-n", type=int, default=9)
    k.add_argument("--jobs", type=int, default=1)
    k.add_argument("--out")
    k.set_defaults(func=cmd_conjectures)

    g = sub.add_parser("catalog", help="list or emit built-in solutions")
    g.add_argument("--list", action="store_true")
    g.add_argument("--emit")
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--out")
    g.set_defaults(func=cmd_catalog)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(stream=sys.stderr, level=args.log_level.upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except (ArityError, DomainError, ValueError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
