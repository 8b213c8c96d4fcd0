"""Binary Moebius parameterization of nested Markov models.

Every intrinsic set ``S`` with head ``H`` and tail ``T`` contributes the
parameters ``q_S(H=0 | T=t)``, one per tail assignment ``t``. In the
observed-law graph a proxy ``X_i`` in the head with its indicator ``R_i``
in the tail only admits ``R_i = 1``, so that indicator is *pinned* and
does not double the entry's count.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fixing import Cadmg, fix_sequence, graph_sequence, intrinsic_sets, reachable_sets
from .graph import GraphError, MissingDataGraph, MixedGraph, VertexRole
from .projection import observed_law_graph
from .tables import Table, TabularKernel


class NonPositive(ValueError):
    pass


class InconsistentParameters(ValueError):
    pass


@dataclass(frozen=True)
class MoebiusEntry:
    members: frozenset
    head: frozenset
    tail: frozenset
    pinned: frozenset = frozenset()
    sequence: tuple = field(default=(), compare=False)

    @property
    def count(self) -> int:
        return 2 ** len(self.tail - self.pinned)

    def label(self):
        head = ", ".join(f"{v}=0" for v in sorted(self.head))
        tail = ", ".join(f"{v}=1" if v in self.pinned else v for v in sorted(self.tail))
        return f"q({head} | {tail})" if tail else f"q({head})"


@dataclass
class MoebiusParameterization:
    graph: MixedGraph
    entries: tuple
    values: dict | None = None

    @property
    def count(self) -> int:
        return sum(e.count for e in self.entries)

    def count_excluding(self, skip) -> int:
        """Count with entries lying entirely inside ``skip`` left out."""
        skip = frozenset(skip)
        return sum(e.count for e in self.entries if not e.members <= skip)

    @property
    def fingerprint(self) -> str:
        text = repr(sorted(self.graph.directed)) + repr(sorted(self.graph.bidirected))
        return hashlib.sha1(text.encode()).hexdigest()[:12]

    def entry(self, members) -> MoebiusEntry:
        members = frozenset(members)
        for e in self.entries:
            if e.members == members:
                return e
        raise KeyError(sorted(members))

    def table(self):
        return [(sorted(e.members), sorted(e.head), sorted(e.tail), e.count) for e in self.entries]


def _entries(graph: MixedGraph, pin=False):
    pairs = graph.pairs() if pin else {}
    out = []
    for s in intrinsic_sets(graph):
        pinned = set()
        if pin:
            for h in s.head:
                vh = graph.vertex(h)
                if vh.role is VertexRole.PROXY and vh.pair in pairs:
                    r = pairs[vh.pair].indicator
                    if r in s.tail:
                        pinned.add(r)
        out.append(MoebiusEntry(s.members, s.head, s.tail, frozenset(pinned), s.sequence))
    return tuple(out)


def parameterize(graph: MixedGraph, pin=False) -> MoebiusParameterization:
    """Moebius entries of an ADMG; ``pin`` applies the proxy restriction to an observed-law graph."""
    return MoebiusParameterization(graph, _entries(graph, pin))


def full_law_parameterization(g: MissingDataGraph) -> MoebiusParameterization:
    graph = g.full_law_graph()
    return MoebiusParameterization(graph, _entries(graph))


def observed_law_parameterization(g: MissingDataGraph) -> MoebiusParameterization:
    """Entries of the observed-law ADMG; an upper bound on observed-law dimension."""
    graph = observed_law_graph(g)
    return MoebiusParameterization(graph, _entries(graph, pin=True))


def isolated_vertices(graph: MixedGraph) -> frozenset:
    """Vertices touched by no edge other than the proxy-defining ones."""
    busy = set()
    for a, b in graph.directed:
        if not graph.is_deterministic(a, b):
            busy |= {a, b}
    for a, b in graph.bidirected:
        busy |= {a, b}
    return frozenset(v for v in graph.vertices if v not in busy)


def count_bidirected_chain(k: int, enumerate_check=True) -> int:
    if k < 1:
        raise NonPositive(f"chain length must be positive, got {k}")
    value = k * (k + 1) // 2
    if enumerate_check:
        from .graph import Vertex

        vs = [f"V{i}" for i in range(1, k + 1)]
        chain = MixedGraph([Vertex(v, VertexRole.OBSERVED) for v in vs], (), zip(vs, vs[1:]))
        enumerated = parameterize(chain).count
        if enumerated != value:
            raise AssertionError(f"chain enumeration gave {enumerated}, expected {value}")
    return value


# -- numeric side ---------------------------------------------------------


def extract_parameters(joint: Table, graph: MixedGraph) -> MoebiusParameterization:
    """Read ``q_S(H=0 | T)`` off a joint table for every intrinsic set.

    Fixed vertices outside the tail are set to state 0; under the nested
    Markov property the value does not depend on them.
    """
    p = parameterize(graph)
    base = Cadmg(graph)
    q0 = TabularKernel.joint(joint.transpose(graph.vertices))
    values = {}
    for e in p.entries:
        q, _ = fix_sequence(q0, base, e.sequence)
        rest = tuple(q.random)
        cond = tuple(v for v in rest if v not in e.head) + q.fixed
        t = q.table.conditional(cond) if cond else q.table
        t = t.reduce({v: 0 for v in e.head})
        t = t.reduce({v: 0 for v in t.variables if v not in e.tail})
        values[e.members] = t.transpose(tuple(sorted(e.tail)))
    p.values = values
    return p


def moebius_invert(p: MoebiusParameterization, graph: MixedGraph | None = None, tol=1e-12) -> Table:
    """Joint distribution whose intrinsic kernels reproduce the parameter values.

    Recursion over reachable sets: a set's kernel is the product of its
    districts' kernels; a district's kernel at ``x`` is obtained by
    inclusion-exclusion over the head coordinates equal to one, using the
    stored parameter for the full head and smaller reachable sets otherwise.
    """
    graph = graph if graph is not None else p.graph
    if p.values is None:
        raise InconsistentParameters("parameterization carries no values")
    order = graph.vertices
    base = Cadmg(graph)
    reach = reachable_sets(base)
    by_members = {e.members: e for e in p.entries}

    @lru_cache(maxsize=None)
    def districts_of(s):
        cg = graph_sequence(base, reach[s])
        return tuple(cg.graph.districts(within=s))

    memo = {}

    def eval_set(s, x):
        if not s:
            return 1
        key = (s, x)
        if key in memo:
            return memo[key]
        val = 1
        for d in districts_of(s):
            val = val * eval_district(d, x)
        memo[key] = val
        return val

    def eval_district(d, x):
        e = by_members[d]
        xd = dict(zip(order, x))
        zeros = [h for h in e.head if xd[h] == 0]
        ones = sorted(h for h in e.head if xd[h] == 1)
        theta = p.values[d]
        rest = d - e.head
        total = 0
        for k in range(len(ones) + 1):
            for extra in itertools.combinations(ones, k):
                sign = -1 if k % 2 else 1
                if k == len(ones):
                    t_assign = tuple(xd[v] for v in theta.variables)
                    term = theta.values[t_assign] * eval_set(rest, x)
                else:
                    xm = dict(xd)
                    for h in extra:
                        xm[h] = 0
                    c = frozenset(zeros) | frozenset(extra)
                    term = eval_set(c | rest, tuple(xm[v] for v in order))
                total = total + sign * term
        return total

    exact = any(t.exact for t in p.values.values())
    arr = np.empty((2,) * len(order), dtype=object if exact else float)
    full = frozenset(order)
    for x in itertools.product((0, 1), repeat=len(order)):
        arr[x] = eval_set(full, x)
    flat = np.ravel(arr)
    if any(v < -tol for v in flat):
        raise InconsistentParameters("parameters yield negative probability mass")
    return Table(order, arr)
