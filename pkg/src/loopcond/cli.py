"""Command-line front end.

Every command prints one JSON report on stdout and a one-line summary on
stderr. Exit codes: 0 clean run, 1 internal invariant failure, 2 input or
usage error, 3 budget exceeded.
"""
import argparse
import json
import sys
import time
from pathlib import Path

from . import _kernels
from .compose import TaylorSystem, h1_to_taylor, taylor_to_width3
from .core import LoopCondition, condition_of, is_trivial, parse_condition, parse_identities, relation_of, verify_witness
from .errors import BudgetExceeded, LoopCondError
from .freewnu import search_satisfying_term, wnu_arity, wnu_canonical, wnu_equal
from .gadgets import build_q2_gadget, build_q_gadget
from .grouporbit import CoreAlgebra, pseudo_satisfies, verify_pseudo_witness
from .hom import column_map, find_hom, implies_by_hom, is_hom, make_clique
from .indicator import DEFAULT_CELL_BUDGET, DEFAULT_MAX_SIZE, satisfies
from .io import algebra_from_json, group_from_json, relation_from_json, relation_to_json, write_json
from .terms import format_term, parse_term

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(LoopCondError):
    pass


def _text(arg: str) -> str:
    p = Path(arg)
    if p.is_file():
        return p.read_text(encoding="utf-8")
    return arg


def read_condition(arg: str) -> LoopCondition:
    lines = [l.split("#", 1)[0] for l in _text(arg).splitlines()]
    return parse_condition(" ".join(l for l in lines if l.strip()))


def _check(ok: bool, what: str):
    if not ok:
        raise AssertionError(f"certificate re-verification failed: {what}")


def cmd_trivial(args) -> dict:
    L = read_condition(args.condition)
    R, _ = relation_of(L)
    result = is_trivial(L)
    constant = [list(c) for c in L.columns if len(set(c)) == 1]
    return {"result": result, "certificate": {"constant_columns": constant},
            "statistics": {"rows": L.rows, "arity": L.arity, "variables": len(L.variables), "tuples": len(R)}}


def cmd_implies(args) -> dict:
    L, L2 = read_condition(args.cond_a), read_condition(args.cond_b)
    if L.rows != L2.rows:
        raise UsageError(f"width mismatch: {L.rows} vs {L2.rows}")
    stats = {}
    varmap = implies_by_hom(L, L2, stats)
    if varmap is None:
        return {"result": False, "certificate": None, "statistics": stats}
    R, idx = relation_of(L)
    R2, idx2 = relation_of(L2)
    h = [idx2[varmap[v]] for v in idx]
    _check(is_hom(R, R2, h), "homomorphism")
    return {"result": True,
            "certificate": {"hom": h, "variables": varmap, "column_map": column_map(L, L2, varmap)},
            "statistics": stats}


def cmd_satisfies(args) -> dict:
    A = algebra_from_json(_text(args.algebra))
    L = read_condition(args.condition)
    stats = {}
    if args.pseudo:
        G = group_from_json(_text(args.pseudo))
        C = CoreAlgebra(A, G)
        w = pseudo_satisfies(C, L, args.budget, args.max_size, stats=stats)
        if w is None:
            return {"result": None, "certificate": None, "statistics": stats}
        _check(verify_pseudo_witness(A, L, w.term, w.unary), "pseudo witness")
        cert = {"term": format_term(w.term), "unary": [list(u) for u in w.unary],
                "words": [list(x) for x in w.words]}
        return {"result": format_term(w.term), "certificate": cert, "statistics": stats}
    t = satisfies(A, L.plain(), args.budget, args.max_size, stats=stats)
    if t is None:
        return {"result": None, "certificate": None, "statistics": stats}
    _check(verify_witness(A, L.plain(), t), "witness term")
    return {"result": format_term(t), "certificate": {"term": format_term(t)}, "statistics": stats}


def cmd_construct(args) -> dict:
    if args.taylor3:
        T = TaylorSystem.from_identities(parse_identities(_text(args.taylor3)))
        out = taylor_to_width3(T)
        R, _ = relation_of(out.condition)
        target = make_clique(2 * T.arity, 3)
        h = find_hom(R, target)
        _check(h is not None, "width-3 relation maps into K_2n^3")
        doc = {"condition": str(out.condition), "arity": out.condition.arity,
               "variables": list(out.condition.variables), "witness": format_term(out.h.body),
               "substitutions": out.substitution_tables(), "hom_into_clique": list(h)}
        if args.out:
            Path(args.out).write_text(str(out.condition) + "\n", encoding="utf-8")
        return {"result": doc, "certificate": {"hom": list(h)}, "statistics": {"n": T.arity}}
    if args.h1taylor:
        out = h1_to_taylor(parse_identities(_text(args.h1taylor)), idempotent=not args.pseudo_markers)
        _check(out.taylor.rejects_projections(), "Taylor system non-trivial")
        doc = {"ell": out.ell, "factors": list(out.factors), "taylor": str(out.taylor.identities()),
               "phi": [i + 1 for i in out.phi], "witness": format_term(out.witness.body)}
        if args.out:
            Path(args.out).write_text(str(out.taylor.identities()) + "\n", encoding="utf-8")
        return {"result": doc, "certificate": {"rejects_projections": True}, "statistics": {"ell": out.ell}}
    if args.qgadget or args.q2gadget:
        rel_arg, k = args.qgadget or args.q2gadget
        R = relation_from_json(_text(rel_arg))
        build = build_q_gadget if args.qgadget else build_q2_gadget
        g = build(R, int(k), time_limit=args.time_limit)
        doc = g.to_json()
        if args.out:
            write_json(args.out, doc)
        return {"result": doc, "certificate": {"loops": g.loops()},
                "statistics": {"candidates": g.candidates, "tuples": len(g.relation)}}
    if args.clique:
        k, m = (int(v) for v in args.clique)
        K = make_clique(k, m)
        doc = relation_to_json(K)
        if args.out:
            write_json(args.out, doc)
        return {"result": doc, "certificate": None,
                "statistics": {"tuples": len(K), "condition": str(condition_of(K))}}
    raise UsageError("construct needs one of --taylor3, --h1taylor, --qgadget, --q2gadget, --clique")


def cmd_wnu(args) -> dict:
    if args.eq:
        u, v, m = parse_term(args.eq[0]), parse_term(args.eq[1]), int(args.eq[2])
        for t in (u, v):
            mt = wnu_arity(t)
            if mt is not None and mt != m:
                raise UsageError(f"term {format_term(t)} uses arity {mt + 1}, expected {m + 1}")
        return {"result": wnu_equal(u, v),
                "certificate": {"canonical": [format_term(wnu_canonical(u)), format_term(wnu_canonical(v))]},
                "statistics": {}}
    if args.search:
        L = read_condition(args.search[0])
        m, depth = int(args.search[1]), int(args.search[2])
        if L.rows != m:
            raise UsageError(f"condition has width {L.rows}, expected {m}")
        rep = search_satisfying_term(L, depth)
        doc = rep.to_json()
        return {"result": doc["found"], "certificate": doc,
                "statistics": {"checkedTerms": rep.checked_terms, "maxDepth": depth}}
    raise UsageError("wnu needs --eq or --search")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="loopcond", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("trivial", help="is a loop condition trivial")
    s.add_argument("condition", help="condition file (or literal condition text)")
    s.set_defaults(func=cmd_trivial)

    s = sub.add_parser("implies", help="hom certificate that condition A implies condition B")
    s.add_argument("cond_a")
    s.add_argument("cond_b")
    s.set_defaults(func=cmd_implies)

    s = sub.add_parser("satisfies", help="decide a (pseudo-)loop condition in a finite algebra")
    s.add_argument("algebra", help="algebra JSON file")
    s.add_argument("condition")
    s.add_argument("--pseudo", metavar="GROUP", help="group JSON file; decide the pseudo variant")
    s.add_argument("--budget", type=int, default=DEFAULT_CELL_BUDGET, help="max |A|^|V|*m")
    s.add_argument("--max-size", type=int, default=DEFAULT_MAX_SIZE, help="max closure size")
    s.set_defaults(func=cmd_satisfies)

    s = sub.add_parser("construct", help="run a construction")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--taylor3", metavar="SYSTEM", help="Taylor identities file -> width-3 condition")
    g.add_argument("--h1taylor", metavar="SYSTEM", help="h1 identities file -> Taylor identities")
    g.add_argument("--qgadget", nargs=2, metavar=("REL", "K"))
    g.add_argument("--q2gadget", nargs=2, metavar=("REL", "K"))
    g.add_argument("--clique", nargs=2, metavar=("K", "M"))
    s.add_argument("--pseudo-markers", action="store_true", help="keep unary markers in h1 output")
    s.add_argument("--time-limit", type=float, default=10.0, help="gadget search seconds")
    s.add_argument("--out", help="write the constructed object to this file")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("wnu", help="free weak near-unanimity algebra")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--eq", nargs=3, metavar=("T1", "T2", "M"))
    g.add_argument("--search", nargs=3, metavar=("COND", "M", "DEPTH"))
    s.set_defaults(func=cmd_wnu)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    argv = sys.argv[1:] if argv is None else list(argv)
    start = time.perf_counter()
    report = {"command": argv}
    code = EXIT_OK
    try:
        report.update(args.func(args))
    except BudgetExceeded as e:
        code = EXIT_BUDGET
        report.update({"error": str(e), "required": str(e.required), "limit": e.limit})
    except (LoopCondError, OSError, json.JSONDecodeError, ValueError) as e:
        code = EXIT_USAGE
        report["error"] = str(e)
    except AssertionError as e:
        code = EXIT_INTERNAL
        report["error"] = str(e)
    report.setdefault("statistics", {})
    report["statistics"]["elapsed"] = round(time.perf_counter() - start, 6)
    report["statistics"]["backend"] = _kernels.backend()
    print(json.dumps(report, default=str))
    summary = report.get("error") or f"{args.command}: result={json.dumps(report.get('result'), default=str)[:200]}"
    print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
