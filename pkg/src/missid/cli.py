"""``missid`` command-line tool.

Exit codes: 0 when the analysis ran (the verdict is in the payload), 1 for
usage, parse or graph errors, 2 for internal failures.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .fileformat import ParseError, dump, load
from .graph import GraphError, InvalidGraph, MixedGraph, UnknownVertex, VertexRole, validate, violations
from .identification import decide_full_law
from .moebius import full_law_parameterization, observed_law_parameterization, parameterize
from .odds_ratio import NotIdentifiedGraph
from .oracle import law_lines, search_counterexample, verify_identified
from .projection import latent_project, observed_law_graph
from .separation import is_m_separated


class UsageError(Exception):
    pass


def _emit(payload, out):
    out.write(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def _read(path) -> MixedGraph:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such file: {path}")
    return load(p)


def _valid(path):
    return validate(_read(path))


def _vertex_list(text):
    if text is None or text.strip() == "":
        return []
    return [v for v in (s.strip() for s in text.replace(",", " ").split()) if v]


def cmd_validate(args, out):
    g = _read(args.graph)
    found = violations(g)
    _emit(
        {
            "valid": not found,
            "violations": [{"kind": type(v).__name__, "message": str(v)} for v in found],
            "vertices": len(g.vertices),
            "directed": len(g.directed),
            "bidirected": len(g.bidirected),
        },
        out,
    )


def cmd_project(args, out):
    g = _read(args.graph)
    if args.observed:
        p = observed_law_graph(validate(g))
    else:
        keep = _vertex_list(args.keep) if args.keep is not None else [
            v for v in g.vertices if g.role(v) is not VertexRole.HIDDEN
        ]
        p = latent_project(g, keep)
    out.write(dump(p))


def _independence(g, a, b, z):
    a, b, z = _vertex_list(a), _vertex_list(b), _vertex_list(z)
    if not a or not b:
        raise UsageError("independence needs non-empty A and B")
    analysis = g.full_law_graph() if hasattr(g, "full_law_graph") else g
    for v in a + b + z:
        if v not in analysis.vertices:
            raise UnknownVertex(v)
    return {"A": a, "B": b, "Z": z, "separated": is_m_separated(analysis, set(a), set(b), set(z))}


def cmd_check(args, out):
    g = _valid(args.graph)
    if args.independence:
        _emit(_independence(g, *args.independence), out)
        return
    _emit(decide_full_law(g, order=_vertex_list(args.order) or None).to_json(), out)


def cmd_independence(args, out):
    _emit(_independence(_valid(args.graph), args.a, args.b, args.z), out)


def cmd_count(args, out):
    g = _read(args.graph)
    if not g.with_role(VertexRole.MISSING) and g.with_role(VertexRole.PROXY):
        # already an observed-law graph
        bound = parameterize(g, pin=True).count
        _emit({"full": None, "observed_bound": bound, "gap": None}, out)
        return
    g = validate(g)
    full = full_law_parameterization(g)
    obs = observed_law_parameterization(g)
    payload = {"full": full.count, "observed_bound": obs.count, "gap": full.count - obs.count}
    if args.entries:
        payload["full_entries"] = [e.label() for e in full.entries]
        payload["observed_entries"] = [e.label() for e in obs.entries]
    _emit(payload, out)


def cmd_verify(args, out):
    g = _valid(args.graph)
    report = verify_identified(g, trials=args.trials, seed=args.seed, tol=args.tol, hidden_card=args.hidden_card)
    payload = report.to_json()
    payload["seed"] = args.seed
    payload["all_passed"] = report.all_passed
    _emit(payload, out)


def cmd_counterexample(args, out):
    g = _valid(args.graph)
    outcome = search_counterexample(g, seed=args.seed, budget=args.budget, hidden_card=args.hidden_card)
    payload = outcome.to_json()
    payload["seed"] = args.seed
    payload["status"] = decide_full_law(g, with_certificate=False).status.value
    if args.dump and outcome.found:
        ce = outcome.counterexample
        text = ["# first full law", *law_lines(ce.first), "# second full law", *law_lines(ce.second)]
        Path(args.dump).write_text("\n".join(text) + "\n")
        payload["dump"] = str(args.dump)
    _emit(payload, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="missid", description="Full-law identification for missing-data graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="list every structural violation")
    p.add_argument("graph")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("project", help="latent projection, printed in graph format")
    p.add_argument("graph")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--keep", help="vertices to keep (comma or space separated); default: all non-hidden")
    group.add_argument("--observed", action="store_true", help="project onto the observed-law graph")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("check", help="identification verdict")
    p.add_argument("graph")
    p.add_argument("--order", help="indicator order for the recipe")
    p.add_argument("--independence", nargs=3, metavar=("A", "B", "Z"), help="m-separation query instead")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("independence", help="m-separation query on the full-law graph")
    p.add_argument("graph")
    p.add_argument("a", metavar="A")
    p.add_argument("b", metavar="B")
    p.add_argument("z", metavar="Z", nargs="?", default="")
    p.set_defaults(func=cmd_independence)

    p = sub.add_parser("count", help="Moebius parameter counts")
    p.add_argument("graph")
    p.add_argument("--entries", action="store_true", help="also list the parameters")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="reconstruct random laws of an identified graph")
    p.add_argument("graph")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--hidden-card", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("counterexample", help="search two full laws with one observed law")
    p.add_argument("graph")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", type=int, default=200)
    p.add_argument("--hidden-card", type=int, default=2)
    p.add_argument("--dump", help="write both laws here, one assignment per line")
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        args.func(args, out)
    except ParseError as exc:
        err.write(f"error: {args.graph}: {exc}\n")
        return 1
    except InvalidGraph as exc:
        err.write("error: invalid graph\n" + "".join(f"  {v}\n" for v in exc.violations))
        return 1
    except UnknownVertex as exc:
        err.write(f"error: unknown vertex {exc.args[0]}\n")
        return 1
    except (UsageError, NotIdentifiedGraph, GraphError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    except Exception as exc:  # noqa: BLE001
        err.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 2
    return 0


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
