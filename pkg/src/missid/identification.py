"""Colluding paths and the full-law identification criterion.

A colluding path joins ``X_i^(1)`` to ``R_i`` with every interior vertex a
collider. Since indicators never point into ``X^(1)``, such a path always
reads ``X_i (-> or <->) w_1 <-> ... <-> w_k (<- or <->) R_i``. The full law
is identified exactly when no pair has one.
"""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field

from .graph import GraphError, MissingDataGraph, VertexRole
from .separation import is_m_separated


class UnknownPair(GraphError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class PathKind(enum.Enum):
    SELF_CENSORING = "self-censoring"
    COLLUDER = "colluder"
    GENERAL = "general"


class Status(enum.Enum):
    IDENTIFIED = "identified"
    NOT_IDENTIFIED = "not identified"


@dataclass(frozen=True)
class ColludingPath:
    pair: str
    vertices: tuple
    edges: tuple  # "->", "<-" or "<->" between consecutive vertices

    @property
    def span(self) -> int:
        return len(self.vertices) - 2

    @property
    def form(self) -> str:
        starts_directed = self.edges[0] == "->"
        ends_directed = self.edges[-1] == "<-"
        if self.span == 0:
            return "b" if starts_directed else "a"
        return {(False, False): "a", (True, False): "b", (False, True): "c", (True, True): "d"}[
            (starts_directed, ends_directed)
        ]

    @property
    def kind(self) -> PathKind:
        if self.span == 0:
            return PathKind.SELF_CENSORING
        if self.span == 1 and self.form == "d":
            return PathKind.COLLUDER
        return PathKind.GENERAL

    def describe(self) -> str:
        parts = [self.vertices[0]]
        for e, v in zip(self.edges, self.vertices[1:]):
            parts += [e, v]
        return " ".join(parts)

    def to_json(self):
        return {
            "pair": self.pair,
            "path": self.describe(),
            "vertices": list(self.vertices),
            "edges": list(self.edges),
            "kind": self.kind.value,
            "form": self.form,
            "span": self.span,
        }


def _analysis_graph(g):
    if isinstance(g, MissingDataGraph):
        return g.full_law_graph()
    return g


def _endpoints(g, pair):
    pairs = g.pairs()
    if pair not in pairs:
        # accept the id of either member
        for key, p in pairs.items():
            if pair in (p.missing, p.indicator):
                pair = key
                break
        else:
            raise UnknownPair(f"no missing-variable pair {pair!r}")
    p = pairs[pair]
    if p.missing is None or p.indicator is None:
        raise UnknownPair(f"pair {pair!r} is incomplete")
    return pair, p.missing, p.indicator


def _first_steps(g, x):
    """``(vertex, edge)`` options for the first hop out of ``X_i``."""
    out = [(c, "->") for c in g._ch[x]] + [(s, "<->") for s in g._sib[x]]
    return out


def _last_steps(g, r):
    """``(vertex, edge)`` options for the hop into ``R_i``, seen from the vertex side."""
    return [(c, "<-") for c in g._ch[r]] + [(s, "<->") for s in g._sib[r]]


def find_colluding_paths(g, pair) -> list[ColludingPath]:
    """Every simple colluding path for ``pair`` (exponential; for small graphs)."""
    g = _analysis_graph(g)
    pair, x, r = _endpoints(g, pair)
    last = {}
    for v, e in _last_steps(g, r):
        last.setdefault(v, []).append(e)
    found = []
    for w1, e1 in _first_steps(g, x):
        if w1 == r:
            found.append(ColludingPath(pair, (x, r), (e1,)))
            continue
        # depth-first over bidirected edges avoiding both endpoints
        stack = [(w1, (x, w1), (e1,))]
        while stack:
            v, verts, edges = stack.pop()
            for e_last in last.get(v, ()):
                found.append(ColludingPath(pair, verts + (r,), edges + (e_last,)))
            for s in sorted(g._sib[v]):
                if s not in verts and s != r:
                    stack.append((s, verts + (s,), edges + ("<->",)))
    found.sort(key=lambda p: (len(p.vertices), p.vertices, p.edges))
    return found


def shortest_colluding_path(g, pair) -> ColludingPath | None:
    """Shortest colluding path, ties broken by lexicographic vertex ids.

    Breadth-first search over the bidirected graph with both endpoints
    removed, from the first-hop vertices to the last-hop vertices.
    """
    g = _analysis_graph(g)
    pair, x, r = _endpoints(g, pair)
    first = {}
    for v, e in _first_steps(g, x):
        first.setdefault(v, []).append(e)
    last = {}
    for v, e in _last_steps(g, r):
        last.setdefault(v, []).append(e)
    pick = lambda options: "->" if "->" in options else ("<-" if "<-" in options else "<->")  # noqa: E731
    if r in first:
        return ColludingPath(pair, (x, r), (pick(first[r]),))
    # distance to the nearest last-hop vertex, through interior vertices only
    interior = set(g.vertices) - {x, r}
    dist = {v: 0 for v in last if v in interior}
    queue = deque(dist)
    while queue:
        v = queue.popleft()
        for s in g._sib[v]:
            if s in interior and s not in dist:
                dist[s] = dist[v] + 1
                queue.append(s)
    starts = [v for v in first if v in dist]
    if not starts:
        return None
    best = min(dist[v] for v in starts)
    v = min(s for s in starts if dist[s] == best)
    verts, edges = [x, v], [pick(first[v])]
    while dist[v] > 0:
        v_next = min(s for s in g._sib[v] if dist.get(s) == dist[v] - 1)
        verts.append(v_next)
        edges.append("<->")
        v = v_next
    verts.append(r)
    edges.append(pick(last[v]))
    return ColludingPath(pair, tuple(verts), tuple(edges))


def has_colluding_path(g, pair) -> bool:
    return shortest_colluding_path(g, pair) is not None


def icin_check(g) -> list[tuple[str, bool]]:
    """Per pair: does ``R_i ⫫ X_i^(1) | everything else`` hold by m-separation?"""
    a = _analysis_graph(g)
    out = []
    for key, p in a.pairs().items():
        if p.missing is None or p.indicator is None:
            continue
        rest = set(a.vertices) - {p.missing, p.indicator}
        out.append((key, is_m_separated(a, {p.indicator}, {p.missing}, rest)))
    return out


def dag_predicate(g) -> bool:
    """No ``X_i -> R_i`` edge and no ``X_j -> R_i <- R_j`` structure."""
    a = _analysis_graph(g)
    if a.bidirected:
        raise ValueError("predicate only applies to DAGs")
    for p in a.pairs().values():
        x, r = p.missing, p.indicator
        if (x, r) in a.directed:
            return False
        for c in a._ch[r]:
            if (x, c) in a.directed:
                return False
    return True


@dataclass
class IdentificationVerdict:
    status: Status
    witness: ColludingPath | None = None
    witnesses: dict = field(default_factory=dict)
    certificate: tuple | None = None
    recipe: str | None = None
    icin: list = field(default_factory=list)

    @property
    def identified(self) -> bool:
        return self.status is Status.IDENTIFIED

    def __post_init__(self):
        if self.status is Status.NOT_IDENTIFIED and self.witness is None:
            raise ValueError("a non-identified verdict needs a witness")
        if self.status is Status.IDENTIFIED and (self.witness is not None or self.recipe is None):
            raise ValueError("an identified verdict carries a recipe and no witness")

    def to_json(self):
        out = {
            "status": self.status.value,
            "witness_path": self.witness.to_json() if self.witness else None,
            "certificate": None,
            "icin_table": {k: v for k, v in self.icin},
            "recipe": self.recipe,
            "target_law": "identified" if self.identified else "undetermined",
        }
        if self.certificate is not None:
            out["certificate"] = {"full": self.certificate[0], "observed_bound": self.certificate[1]}
        return out


def certificate(g: MissingDataGraph) -> tuple[int, int]:
    """Moebius parameter counts ``(full law, observed-law upper bound)``."""
    from .moebius import full_law_parameterization, observed_law_parameterization

    return full_law_parameterization(g).count, observed_law_parameterization(g).count


def decide_full_law(g: MissingDataGraph, order=None, with_certificate=True) -> IdentificationVerdict:
    a = _analysis_graph(g)
    witnesses = {}
    for key, p in a.pairs().items():
        path = shortest_colluding_path(a, key)
        if path is not None:
            witnesses[key] = path
    icin = icin_check(a)
    if witnesses:
        witness = min(witnesses.values(), key=lambda p: (len(p.vertices), p.vertices))
        cert = certificate(g) if with_certificate and isinstance(g, MissingDataGraph) else None
        return IdentificationVerdict(Status.NOT_IDENTIFIED, witness, witnesses, cert, None, icin)
    from .odds_ratio import recipe_text

    return IdentificationVerdict(Status.IDENTIFIED, recipe=recipe_text(a, order), icin=icin)
