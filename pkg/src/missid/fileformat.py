"""Reader and writer for the line-oriented ``.mdg`` graph format.

::

    # comment
    var X1 missing          # also creates indicator R1
    var A observed
    var U hidden 3          # optional cardinality (default 2)
    var S1 indicator X1     # optional: rename the indicator of X1
    var Xp1 proxy X1        # optional: declare the proxy explicitly
    edge X1 -> R1
    biedge A <-> X1

See ``docs/graph_format.md`` for the grammar.
"""
from __future__ import annotations

import re
from pathlib import Path

from .graph import GraphError, MixedGraph, Vertex, VertexRole, partner_ids

_ID = r"[A-Za-z_][A-Za-z0-9_'\[\],.]*"
_VAR = re.compile(rf"^var\s+({_ID})\s+(observed|missing|hidden|indicator|proxy)(?:\s+(\S+))?$")
_EDGE = re.compile(rf"^edge\s+({_ID})\s*->\s*({_ID})$")
_BIEDGE = re.compile(rf"^biedge\s+({_ID})\s*<->\s*({_ID})$")


class ParseError(GraphError, ValueError):
    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def parse(text: str) -> MixedGraph:
    """Parse graph text into an unvalidated :class:`MixedGraph`."""
    declared: dict[str, tuple[VertexRole, str | None, int]] = {}
    renames: dict[str, dict[VertexRole, str]] = {}
    order: list[str] = []
    edges: list[tuple[int, str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := _VAR.match(line):
            vid, kind, arg = m.groups()
            if vid in declared:
                raise ParseError(lineno, f"duplicate declaration of {vid}")
            if kind in ("indicator", "proxy"):
                if arg is None:
                    raise ParseError(lineno, f"{kind} {vid} needs the id of its missing variable")
                role = VertexRole.INDICATOR if kind == "indicator" else VertexRole.PROXY
                renames.setdefault(arg, {})[role] = vid
                declared[vid] = (role, arg, 2)
            elif kind == "hidden":
                try:
                    card = int(arg) if arg is not None else 2
                except ValueError:
                    raise ParseError(lineno, f"bad cardinality {arg!r}") from None
                declared[vid] = (VertexRole.HIDDEN, None, card)
            else:
                if arg is not None:
                    raise ParseError(lineno, f"unexpected token {arg!r}")
                role = VertexRole.OBSERVED if kind == "observed" else VertexRole.MISSING
                declared[vid] = (role, vid if kind == "missing" else None, 2)
            order.append(vid)
        elif m := _EDGE.match(line):
            edges.append((lineno, "->", *m.groups()))
        elif m := _BIEDGE.match(line):
            edges.append((lineno, "<->", *m.groups()))
        else:
            raise ParseError(lineno, f"cannot parse {raw.strip()!r}")
    if not declared:
        raise ParseError(0, "no variables declared")

    vertices: list[Vertex] = []
    for vid in order:
        role, pair, card = declared[vid]
        vertices.append(Vertex(vid, role, pair, card))
        if role is VertexRole.MISSING:
            default_r, _ = partner_ids(vid)
            if VertexRole.INDICATOR not in renames.get(vid, {}):
                if default_r in declared:
                    raise ParseError(0, f"implicit indicator {default_r} of {vid} clashes with a declared vertex")
                vertices.append(Vertex(default_r, VertexRole.INDICATOR, vid))
    known = {v.id for v in vertices}
    directed, bidirected = [], []
    for lineno, kind, a, b in edges:
        for x in (a, b):
            if x not in known:
                raise ParseError(lineno, f"unknown vertex {x}")
        if a == b:
            raise ParseError(lineno, f"self-loop at {a}")
        (directed if kind == "->" else bidirected).append((a, b))
    try:
        return MixedGraph(vertices, directed, bidirected, check=False)
    except GraphError as exc:
        raise ParseError(0, str(exc)) from None


def load(path) -> MixedGraph:
    return parse(Path(path).read_text())


def dump(g: MixedGraph) -> str:
    lines = []
    pairs = g.pairs()
    for v in g.vertices:
        vx = g.vertex(v)
        role = vx.role
        if role is VertexRole.OBSERVED:
            lines.append(f"var {v} observed")
        elif role is VertexRole.HIDDEN:
            lines.append(f"var {v} hidden" + (f" {vx.card}" if vx.card != 2 else ""))
        elif role is VertexRole.MISSING:
            lines.append(f"var {v} missing")
        elif role is VertexRole.INDICATOR:
            pair = pairs[vx.pair]
            if pair.missing is None or partner_ids(pair.missing)[0] != v:
                lines.append(f"var {v} indicator {vx.pair}")
        elif role is VertexRole.PROXY:
            lines.append(f"var {v} proxy {vx.pair}")
    # declarations that rename partners must follow their missing vertex
    lines.sort(key=lambda s: 1 if s.split()[2] in ("indicator", "proxy") else 0)
    lines += [f"edge {a} -> {b}" for a, b in sorted(g.directed)]
    lines += [f"biedge {a} <-> {b}" for a, b in sorted(g.bidirected)]
    return "\n".join(lines) + "\n"
