"""Latent projection of mixed graphs onto a subset of their vertices."""
from __future__ import annotations

from .graph import MissingDataGraph, MixedGraph, VertexRole


def _directed_targets(g, a, keep):
    """Kept vertices reachable from ``a`` by a directed path through non-kept vertices."""
    out = set()
    stack = list(g._ch[a])
    seen = set()
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        if v in keep:
            out.add(v)
        else:
            stack.extend(g._ch[v])
    return out


def _bidirected_targets(g, a, keep):
    """Kept vertices joined to ``a`` by a collider-free path with arrowheads at both ends.

    Such a path climbs from ``a`` against edge direction ("up"), optionally
    crosses one bidirected edge, then descends ("down") to the target. All
    intermediate vertices are outside ``keep``.
    """
    out = set()
    seen = set()
    stack = [(a, "up")]
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        v, phase = state
        at_start = v == a and phase == "up"
        if phase == "up":
            for p in g._pa[v]:
                if p not in keep:
                    stack.append((p, "up"))
            for s in g._sib[v]:
                if s in keep:
                    if s != a:
                        out.add(s)
                else:
                    stack.append((s, "down"))
            if not at_start:
                # v is the top of the trek: descend through its children
                for c in g._ch[v]:
                    if c in keep:
                        if c != a:
                            out.add(c)
                    else:
                        stack.append((c, "down"))
        else:
            for c in g._ch[v]:
                if c in keep:
                    if c != a:
                        out.add(c)
                else:
                    stack.append((c, "down"))
    return out


def latent_project(g: MixedGraph, keep) -> MixedGraph:
    """ADMG over ``keep`` obtained by projecting out every other vertex."""
    keep = g._check(keep)
    if keep == set(g.vertices):
        return g
    directed = set()
    bidirected = set()
    for a in keep:
        for b in _directed_targets(g, a, keep):
            directed.add((a, b))
        for b in _bidirected_targets(g, a, keep):
            bidirected.add((a, b) if a <= b else (b, a))
    vertices = [g.vertex(v) for v in g.vertices if v in keep]
    cls = MissingDataGraph if isinstance(g, MissingDataGraph) else MixedGraph
    return cls(vertices, directed, bidirected)


def observed_law_graph(g: MissingDataGraph) -> MixedGraph:
    """Project out potentially-missing and hidden vertices, keeping ``O``, ``R`` and proxies."""
    g = g.attach_proxies()
    keep = g.with_role(VertexRole.OBSERVED, VertexRole.INDICATOR, VertexRole.PROXY)
    p = latent_project(g, keep)
    # proxies lose their X^(1) parent here, so the result is no longer a valid missing-data graph
    return MixedGraph([p.vertex(v) for v in p.vertices], p.directed, p.bidirected)
