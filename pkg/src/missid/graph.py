"""Mixed graphs whose vertices carry missing-data roles.

A graph holds directed and bidirected edges over string-named vertices.
Every vertex has a :class:`VertexRole`; potentially-missing variables,
their missingness indicators and their proxies share a *pair key* (the id
of the potentially-missing vertex), so that the triple can be recovered
under any naming scheme.
"""
from __future__ import annotations

import enum
import re
from collections.abc import Iterable
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter
from typing import NamedTuple


class GraphError(Exception):
    """Base class for structural problems with a graph."""


class UnknownVertex(GraphError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class CycleDetected(GraphError):
    pass


class IllegalEdge(GraphError):
    pass


class MalformedProxy(GraphError):
    pass


class UnpairedVertex(GraphError):
    pass


class InvalidGraph(GraphError):
    """Raised by :func:`validate`; ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))

    @property
    def kinds(self):
        return {type(v) for v in self.violations}


class VertexRole(enum.Enum):
    OBSERVED = "observed"
    MISSING = "missing"
    INDICATOR = "indicator"
    PROXY = "proxy"
    HIDDEN = "hidden"


@dataclass(frozen=True)
class Vertex:
    id: str
    role: VertexRole
    pair: str | None = None
    card: int = 2


class Pair(NamedTuple):
    """Members of one missing variable's triple (any of them may be absent)."""

    key: str
    missing: str | None
    indicator: str | None
    proxy: str | None


def partner_ids(missing_id):
    """Default ids ``(indicator, proxy)`` for a potentially-missing vertex.

    ``X1`` maps to ``("R1", "Xp1")``; any other name ``v`` maps to
    ``("R_v", "v_p")``.
    """
    m = re.fullmatch(r"X(\w+)", missing_id)
    if m:
        return f"R{m.group(1)}", f"Xp{m.group(1)}"
    return f"R_{missing_id}", f"{missing_id}_p"


def _as_set(vertices):
    if isinstance(vertices, str):
        return frozenset([vertices])
    return frozenset(vertices)


def _biedge(a, b):
    return (a, b) if a <= b else (b, a)


class MixedGraph:
    """Directed + bidirected graph over role-annotated vertices.

    Instances are treated as immutable; every transformation returns a new
    graph. Equality is id-exact (see :func:`is_isomorphic` for the
    relabeling-tolerant comparison).
    """

    def __init__(self, vertices: Iterable[Vertex], directed=(), bidirected=(), check=True):
        self._vertices: dict[str, Vertex] = {}
        for v in vertices:
            if v.id in self._vertices:
                raise GraphError(f"duplicate vertex {v.id!r}")
            self._vertices[v.id] = v
        self.directed = frozenset((a, b) for a, b in directed)
        self.bidirected = frozenset(_biedge(a, b) for a, b in bidirected)
        for a, b in self.directed | self.bidirected:
            for x in (a, b):
                if x not in self._vertices:
                    raise UnknownVertex(x)
            if a == b:
                raise IllegalEdge(f"self-loop at {a!r}")

        self._pa = {v: set() for v in self._vertices}
        self._ch = {v: set() for v in self._vertices}
        self._sib = {v: set() for v in self._vertices}
        for a, b in self.directed:
            self._pa[b].add(a)
            self._ch[a].add(b)
        for a, b in self.bidirected:
            self._sib[a].add(b)
            self._sib[b].add(a)
        if check:
            self.topological_order()

    # -- basic accessors -------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(self._vertices)

    def vertex(self, v) -> Vertex:
        try:
            return self._vertices[v]
        except KeyError:
            raise UnknownVertex(v) from None

    def role(self, v) -> VertexRole:
        return self.vertex(v).role

    def __contains__(self, v):
        return v in self._vertices

    def __len__(self):
        return len(self._vertices)

    def with_role(self, *roles) -> tuple[str, ...]:
        return tuple(v.id for v in self._vertices.values() if v.role in roles)

    def _check(self, vertices):
        s = _as_set(vertices)
        for v in s:
            if v not in self._vertices:
                raise UnknownVertex(v)
        return s

    def parents(self, vertices) -> frozenset:
        out = set()
        for v in self._check(vertices):
            out |= self._pa[v]
        return frozenset(out)

    def children(self, vertices) -> frozenset:
        out = set()
        for v in self._check(vertices):
            out |= self._ch[v]
        return frozenset(out)

    def siblings(self, vertices) -> frozenset:
        out = set()
        for v in self._check(vertices):
            out |= self._sib[v]
        return frozenset(out)

    def _closure(self, start, step):
        seen = set(start)
        stack = list(start)
        while stack:
            for w in step[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    def ancestors(self, vertices) -> frozenset:
        """Reflexive ancestors of a vertex set."""
        return self._closure(self._check(vertices), self._pa)

    def descendants(self, vertices) -> frozenset:
        """Reflexive descendants of a vertex set."""
        return self._closure(self._check(vertices), self._ch)

    def district(self, v, within=None) -> frozenset:
        """Bidirected-connected component of ``v``, optionally inside ``within``."""
        self._check(v)
        allowed = self._vertices.keys() if within is None else within
        seen = {v}
        stack = [v]
        while stack:
            for w in self._sib[stack.pop()]:
                if w in allowed and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return frozenset(seen)

    def districts(self, within=None) -> list[frozenset]:
        remaining = list(self._vertices if within is None else [v for v in self._vertices if v in within])
        out = []
        done = set()
        for v in remaining:
            if v not in done:
                d = self.district(v, within=within)
                done |= d
                out.append(d)
        return out

    def topological_order(self) -> tuple[str, ...]:
        ts = TopologicalSorter({v: sorted(self._pa[v]) for v in self._vertices})
        try:
            order = tuple(ts.static_order())
        except CycleError as exc:
            raise CycleDetected(f"directed cycle through {exc.args[1]}") from None
        # stable w.r.t. declaration order among unconstrained vertices
        rank = {v: i for i, v in enumerate(self._vertices)}
        out, placed = [], set()
        pending = sorted(self._vertices, key=rank.get)
        while pending:
            for v in pending:
                if self._pa[v] <= placed:
                    out.append(v)
                    placed.add(v)
                    pending.remove(v)
                    break
        assert len(out) == len(order)
        return tuple(out)

    # -- pairing ---------------------------------------------------------

    def pairs(self) -> dict[str, Pair]:
        """Pair key -> members, in declaration order of first appearance."""
        slots: dict[str, dict] = {}
        for v in self._vertices.values():
            if v.pair is None:
                continue
            slot = slots.setdefault(v.pair, {})
            if v.role is VertexRole.MISSING:
                slot["missing"] = v.id
            elif v.role is VertexRole.INDICATOR:
                slot["indicator"] = v.id
            elif v.role is VertexRole.PROXY:
                slot["proxy"] = v.id
        return {
            k: Pair(k, s.get("missing"), s.get("indicator"), s.get("proxy"))
            for k, s in slots.items()
        }

    def pair_of(self, v) -> Pair:
        key = self.vertex(v).pair
        if key is None:
            raise UnpairedVertex(f"{v!r} belongs to no missing-variable pair")
        return self.pairs()[key]

    def is_deterministic(self, a, b) -> bool:
        """True for the edges that define a proxy (``R_i -> X_i``, ``X_i^(1) -> X_i``)."""
        if (a, b) not in self.directed:
            return False
        head, tail = self.vertex(b), self.vertex(a)
        return (
            head.role is VertexRole.PROXY
            and tail.pair == head.pair
            and tail.role in (VertexRole.INDICATOR, VertexRole.MISSING)
        )

    # -- constructors ----------------------------------------------------

    def replace(self, vertices=None, directed=None, bidirected=None, check=True):
        cls = MixedGraph if type(self) is MissingDataGraph else type(self)
        return cls(
            self._vertices.values() if vertices is None else vertices,
            self.directed if directed is None else directed,
            self.bidirected if bidirected is None else bidirected,
            check=check,
        )

    def subgraph(self, keep) -> MixedGraph:
        keep = self._check(keep)
        return MixedGraph(
            [v for v in self._vertices.values() if v.id in keep],
            [(a, b) for a, b in self.directed if a in keep and b in keep],
            [(a, b) for a, b in self.bidirected if a in keep and b in keep],
        )

    def is_dag(self):
        return not self.bidirected

    # -- comparison ------------------------------------------------------

    def _key(self):
        return (frozenset(self._vertices.values()), self.directed, self.bidirected)

    def __eq__(self, other):
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        parts = [f"{a}->{b}" for a, b in sorted(self.directed)]
        parts += [f"{a}<->{b}" for a, b in sorted(self.bidirected)]
        return f"{type(self).__name__}({', '.join(self._vertices)}; {', '.join(parts)})"


class MissingDataGraph(MixedGraph):
    """A :class:`MixedGraph` that passed :func:`validate`."""

    def elide_proxies(self) -> MissingDataGraph:
        """Drop proxy vertices and their deterministic edges."""
        proxies = set(self.with_role(VertexRole.PROXY))
        if not proxies:
            return self
        return MissingDataGraph(
            [v for v in self._vertices.values() if v.id not in proxies],
            [(a, b) for a, b in self.directed if b not in proxies],
            self.bidirected,
        )

    def attach_proxies(self) -> MissingDataGraph:
        """Add any missing proxy vertex ``X_i`` with parents ``R_i`` and ``X_i^(1)``."""
        vertices = list(self._vertices.values())
        directed = set(self.directed)
        taken = set(self._vertices)
        for key, pair in self.pairs().items():
            if pair.proxy is not None:
                continue
            pid = partner_ids(pair.missing)[1]
            while pid in taken:
                pid += "'"
            taken.add(pid)
            vertices.append(Vertex(pid, VertexRole.PROXY, key))
            directed |= {(pair.missing, pid), (pair.indicator, pid)}
        return MissingDataGraph(vertices, directed, self.bidirected)

    def full_law_graph(self) -> MixedGraph:
        """Proxy-free ADMG over ``O``, ``X^(1)`` and ``R`` (hidden vertices projected out)."""
        from .projection import latent_project

        g = self.elide_proxies()
        keep = [v for v in g.vertices if g.role(v) is not VertexRole.HIDDEN]
        return latent_project(g, keep)

    @property
    def indicators(self):
        return self.with_role(VertexRole.INDICATOR)

    @property
    def missing(self):
        return self.with_role(VertexRole.MISSING)

    @property
    def observed(self):
        return self.with_role(VertexRole.OBSERVED)


def violations(g: MixedGraph) -> list[GraphError]:
    """Every missing-data constraint ``g`` breaks (empty when valid)."""
    found: list[GraphError] = []
    try:
        g.topological_order()
    except CycleDetected as exc:
        found.append(exc)

    R, X1, O, P, U = (
        VertexRole.INDICATOR,
        VertexRole.MISSING,
        VertexRole.OBSERVED,
        VertexRole.PROXY,
        VertexRole.HIDDEN,
    )
    for a, b in sorted(g.directed):
        ra, rb = g.role(a), g.role(b)
        if ra is R and rb is not R and not (rb is P and g.is_deterministic(a, b)):
            found.append(IllegalEdge(f"indicator {a!r} may not point to {rb.value} vertex {b!r}"))
        if ra is P:
            found.append(MalformedProxy(f"proxy {a!r} has outgoing edge to {b!r}"))

    for key, pair in g.pairs().items():
        if pair.missing is None or pair.indicator is None:
            found.append(UnpairedVertex(f"pair {key!r} needs both a missing vertex and an indicator"))
    seen_roles: dict[tuple[str, VertexRole], str] = {}
    for v in g._vertices.values():
        if v.role in (X1, R, P):
            if v.pair is None:
                found.append(UnpairedVertex(f"{v.id!r} has no pair key"))
                continue
            prev = seen_roles.setdefault((v.pair, v.role), v.id)
            if prev != v.id:
                found.append(UnpairedVertex(f"pair {v.pair!r} has two {v.role.value} vertices"))
        elif v.pair is not None:
            found.append(UnpairedVertex(f"{v.role.value} vertex {v.id!r} cannot carry a pair key"))
        if v.role is not U and v.card != 2:
            found.append(GraphError(f"{v.id!r}: only hidden vertices may be non-binary"))
        if v.role is U and v.card < 2:
            found.append(GraphError(f"hidden vertex {v.id!r} needs cardinality >= 2"))

    pairs = g.pairs()
    for p in g.with_role(P):
        pair = pairs[g.vertex(p).pair] if g.vertex(p).pair in pairs else None
        expected = {pair.missing, pair.indicator} if pair else set()
        if g.parents(p) != expected or None in expected:
            found.append(MalformedProxy(f"proxy {p!r} must have exactly the parents {sorted(x for x in expected if x)}"))
        if g.siblings(p):
            found.append(MalformedProxy(f"proxy {p!r} has bidirected edges"))
    return found


def validate(g: MixedGraph) -> MissingDataGraph:
    """Check the missing-data restrictions; raise :class:`InvalidGraph` listing all failures."""
    found = violations(g)
    if found:
        raise InvalidGraph(found)
    if isinstance(g, MissingDataGraph):
        return g
    return MissingDataGraph(g._vertices.values(), g.directed, g.bidirected)


def elide_proxies(g: MissingDataGraph) -> MissingDataGraph:
    return g.elide_proxies()


def parents(g, vertices):
    return g.parents(vertices)


def children(g, vertices):
    return g.children(vertices)


def ancestors(g, vertices):
    return g.ancestors(vertices)


def descendants(g, vertices):
    return g.descendants(vertices)


def make_graph(
    observed=(),
    missing=(),
    hidden=(),
    edges=(),
    biedges=(),
    proxies=False,
    hidden_card=2,
) -> MissingDataGraph:
    """Build and validate a missing-data graph from plain lists.

    Each id in ``missing`` implicitly creates its indicator (see
    :func:`partner_ids`); edge lists refer to vertices by id and may use
    ``"A -> B"`` / ``"A <-> B"`` strings or tuples.
    """
    vertices = [Vertex(v, VertexRole.OBSERVED) for v in observed]
    for m in missing:
        r, _ = partner_ids(m)
        vertices += [Vertex(m, VertexRole.MISSING, m), Vertex(r, VertexRole.INDICATOR, m)]
    vertices += [Vertex(h, VertexRole.HIDDEN, card=hidden_card) for h in hidden]

    def split(e, sep):
        if isinstance(e, str):
            a, b = e.split(sep)
            return a.strip(), b.strip()
        return tuple(e)

    g = MixedGraph(
        vertices,
        [split(e, "->") for e in edges],
        [split(e, "<->") for e in biedges],
        check=False,
    )
    g = validate(g)
    return g.attach_proxies() if proxies else g


def is_isomorphic(g1: MixedGraph, g2: MixedGraph) -> bool:
    """Equality up to a relabeling that preserves roles, pairs and edge kinds."""
    import networkx as nx
    from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match

    def encode(g):
        h = nx.MultiDiGraph()
        for v in g.vertices:
            h.add_node(v, role=g.role(v).value)
        for a, b in g.directed:
            h.add_edge(a, b, kind="dir")
        for a, b in g.bidirected:
            h.add_edge(a, b, kind="bi")
            h.add_edge(b, a, kind="bi")
        for pair in g.pairs().values():
            members = [m for m in (pair.missing, pair.indicator, pair.proxy) if m]
            for a in members:
                for b in members:
                    if a != b:
                        h.add_edge(a, b, kind="pair")
        return h

    return nx.is_isomorphic(
        encode(g1),
        encode(g2),
        node_match=categorical_node_match("role", None),
        edge_match=categorical_edge_match("kind", None),
    )
