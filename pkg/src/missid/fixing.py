"""Conditional ADMGs, the fixing operator and intrinsic sets."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, MixedGraph, UnknownVertex
from .tables import TabularKernel, ZeroProbabilityEvent


class NotRandom(GraphError, ValueError):
    pass


class NotFixable(GraphError, ValueError):
    pass


class InvalidSequence(GraphError, ValueError):
    def __init__(self, vertex, position):
        self.vertex = vertex
        self.position = position
        super().__init__(f"{vertex!r} (position {position}) is not fixable at that point")


class DivisionByZeroPropensity(ZeroProbabilityEvent):
    pass


class Cadmg:
    """A mixed graph whose vertices are split into random and fixed sets.

    Fixed vertices keep only their outgoing directed edges.
    """

    __slots__ = ("graph", "fixed")

    def __init__(self, graph: MixedGraph, fixed=()):
        self.graph = graph
        self.fixed = frozenset(fixed)
        for w in self.fixed:
            if w not in graph:
                raise UnknownVertex(w)
            if graph._pa[w] or graph._sib[w]:
                raise GraphError(f"fixed vertex {w!r} has incoming edges")

    @property
    def random(self) -> frozenset:
        return frozenset(v for v in self.graph.vertices if v not in self.fixed)

    def random_ordered(self):
        return tuple(v for v in self.graph.vertices if v not in self.fixed)

    def _require_random(self, v):
        if v not in self.graph:
            raise UnknownVertex(v)
        if v in self.fixed:
            raise NotRandom(f"{v!r} is already fixed")

    def district(self, v) -> frozenset:
        self._require_random(v)
        return self.graph.district(v, within=self.random)

    def districts(self) -> list[frozenset]:
        return self.graph.districts(within=self.random)

    def markov_blanket(self, v) -> frozenset:
        d = self.district(v)
        return (d | self.graph.parents(d)) - {v}

    def children_within(self, v, s) -> frozenset:
        return frozenset(c for c in self.graph._ch[v] if c in s)

    def __eq__(self, other):
        return isinstance(other, Cadmg) and self.graph == other.graph and self.fixed == other.fixed

    def __hash__(self):
        return hash((self.graph, self.fixed))

    def __repr__(self):
        return f"Cadmg({self.graph!r}, fixed={sorted(self.fixed)})"


def districts(g: Cadmg | MixedGraph) -> list[frozenset]:
    if isinstance(g, MixedGraph):
        g = Cadmg(g)
    return g.districts()


def is_fixable(g: Cadmg, v) -> bool:
    """No vertex is both a proper descendant of ``v`` and in its district."""
    g._require_random(v)
    desc = g.graph.descendants(v) - {v}
    return not (desc & g.district(v))


def fix_graph(g: Cadmg, v) -> Cadmg:
    if not is_fixable(g, v):
        raise NotFixable(f"{v!r} is not fixable")
    base = g.graph
    directed = [(a, b) for a, b in base.directed if b != v]
    bidirected = [(a, b) for a, b in base.bidirected if v not in (a, b)]
    graph = MixedGraph([base.vertex(x) for x in base.vertices], directed, bidirected, check=False)
    return Cadmg(graph, g.fixed | {v})


def fix_kernel(q: TabularKernel, g: Cadmg, v) -> TabularKernel:
    """Divide ``q`` by ``q(v | mb(v), W)``; ``v`` moves to the context."""
    if not is_fixable(g, v):
        raise NotFixable(f"{v!r} is not fixable")
    if set(q.random) != g.random or set(q.fixed) != g.fixed:
        raise ValueError("kernel signature does not match the CADMG")
    mb = g.markov_blanket(v)
    sum_out = [x for x in q.random if x not in mb and x != v]
    num = q.table.sum_out(sum_out)
    den = num.sum_out([v])
    if np.any(den.values == 0):
        raise DivisionByZeroPropensity(f"propensity of {v!r} has zero-probability context")
    prop = num / den
    if np.any(prop.values == 0):
        raise DivisionByZeroPropensity(f"propensity of {v!r} is zero somewhere")
    out = q.table / prop
    random = tuple(x for x in q.random if x != v)
    return TabularKernel(random, q.fixed + (v,), out, check=False)


def fix_sequence(q: TabularKernel, g: Cadmg, seq) -> tuple[TabularKernel, Cadmg]:
    for i, v in enumerate(seq):
        if v in g.fixed or v not in g.graph or not is_fixable(g, v):
            raise InvalidSequence(v, i)
        q = fix_kernel(q, g, v)
        g = fix_graph(g, v)
    return q, g


def graph_sequence(g: Cadmg, seq) -> Cadmg:
    for i, v in enumerate(seq):
        if v in g.fixed or v not in g.graph or not is_fixable(g, v):
            raise InvalidSequence(v, i)
        g = fix_graph(g, v)
    return g


@dataclass(frozen=True)
class IntrinsicSet:
    members: frozenset
    head: frozenset
    tail: frozenset
    sequence: tuple = field(compare=False)

    def __repr__(self):
        return f"IntrinsicSet({sorted(self.members)}, head={sorted(self.head)}, tail={sorted(self.tail)})"


def reachable_sets(g: MixedGraph | Cadmg) -> dict[frozenset, tuple]:
    """Every reachable subset of the random vertices with one valid fixing sequence."""
    c = g if isinstance(g, Cadmg) else Cadmg(g)
    start = c.random
    found = {start: ((), c)}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        seq, cg = found[s]
        for v in sorted(s):
            t = s - {v}
            if t in found or not is_fixable(cg, v):
                continue
            found[t] = (seq + (v,), fix_graph(cg, v))
            queue.append(t)
    return {s: seq for s, (seq, _) in found.items()}


def head_tail(g: MixedGraph, members, fixed_graph: Cadmg):
    """Head: members childless among ``members``. Tail: ``(S \\ H) ∪ pa(S)``, minus ``S`` heads."""
    s = frozenset(members)
    head = frozenset(v for v in s if not fixed_graph.children_within(v, s))
    tail = (s - head) | (fixed_graph.graph.parents(s) - s)
    return head, frozenset(tail)


def intrinsic_sets(g: MixedGraph | Cadmg) -> list[IntrinsicSet]:
    """Reachable sets that form a single district once their complement is fixed."""
    c = g if isinstance(g, Cadmg) else Cadmg(g)
    out = []
    for s, seq in reachable_sets(c).items():
        if not s:
            continue
        cg = graph_sequence(c, seq)
        v0 = next(iter(s))
        if cg.district(v0) != s:
            continue
        head, tail = head_tail(c.graph, s, cg)
        out.append(IntrinsicSet(s, head, tail, seq))
    out.sort(key=lambda i: (len(i.members), sorted(i.members)))
    return out


def is_reachable(g: MixedGraph | Cadmg, s) -> bool:
    return frozenset(s) in reachable_sets(g)
