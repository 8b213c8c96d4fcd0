"""m-separation by reachability over (vertex, arrowhead) states."""
from __future__ import annotations

from .graph import GraphError, MixedGraph, UnknownVertex, VertexRole


class OverlappingSets(GraphError, ValueError):
    pass


class ProxyInQuery(GraphError, ValueError):
    pass


def _prepare(g: MixedGraph, A, B, Z):
    sets = []
    for s in (A, B, Z):
        s = frozenset([s]) if isinstance(s, str) else frozenset(s)
        for v in s:
            if v not in g:
                raise UnknownVertex(v)
            if g.role(v) is VertexRole.PROXY:
                raise ProxyInQuery(f"proxy {v!r} in separation query; elide proxies first")
        sets.append(s)
    A, B, Z = sets
    if A & B or A & Z or B & Z:
        raise OverlappingSets("A, B and Z must be pairwise disjoint")
    return A, B, Z


def reachable(g: MixedGraph, A, Z) -> set:
    """Vertices m-connected to some member of ``A`` given ``Z``.

    A state ``(v, head)`` records that the walk entered ``v`` with an
    arrowhead at ``v`` (``head=True``) or a tail. Leaving ``v`` along an
    edge that also has an arrowhead at ``v`` makes ``v`` a collider.
    """
    an_z = g.ancestors(Z) if Z else frozenset()
    pa, ch, sib = g._pa, g._ch, g._sib
    seen = set()
    stack = []
    out = set()
    for a in A:
        # leaving the start vertex is unconstrained
        for c in ch[a]:
            stack.append((c, True))
        for p in pa[a]:
            stack.append((p, False))
        for s in sib[a]:
            stack.append((s, True))
    while stack:
        state = stack.pop()
        if state in seen:
            continue
        seen.add(state)
        v, head = state
        out.add(v)
        if v in Z:
            if head:
                # collider in Z: continue only through arrowheads at v
                for p in pa[v]:
                    stack.append((p, False))
                for s in sib[v]:
                    stack.append((s, True))
            continue
        # v not in Z: any non-collider continuation
        for c in ch[v]:
            stack.append((c, True))
        if not head:
            for p in pa[v]:
                stack.append((p, False))
            for s in sib[v]:
                stack.append((s, True))
        elif v in an_z:
            for p in pa[v]:
                stack.append((p, False))
            for s in sib[v]:
                stack.append((s, True))
    return out


def is_m_separated(g: MixedGraph, A, B, Z=()) -> bool:
    """True iff every path between ``A`` and ``B`` is blocked by ``Z``."""
    A, B, Z = _prepare(g, A, B, Z)
    if not A or not B:
        return True
    return not (reachable(g, A, Z) & B)


def markov_blanket(g: MixedGraph, v) -> frozenset:
    """District of ``v`` plus the parents of that district, minus ``v``."""
    d = g.district(v)
    return (d | g.parents(d)) - {v}


def complete_markov_blanket(g: MixedGraph, v) -> frozenset:
    if v not in g:
        raise UnknownVertex(v)
    if g.role(v) is VertexRole.PROXY:
        raise ProxyInQuery(f"proxy {v!r} has no blanket in the proxy-elided graph")
    out = set(markov_blanket(g, v))
    for c in g.children(v):
        out.add(c)
        out |= markov_blanket(g, c)
    out.discard(v)
    return frozenset(out)
