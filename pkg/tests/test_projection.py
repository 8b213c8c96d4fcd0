import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import disjoint_triples, random_mixed_graph

from missid.graph import MixedGraph, Vertex, VertexRole, make_graph
from missid.projection import latent_project, observed_law_graph
from missid.separation import is_m_separated

seeds = st.integers(0, 2**32 - 1)


def _non_hidden(g):
    return [v for v in g.vertices if g.role(v) is not VertexRole.HIDDEN]


def test_fig2a_projects_to_fig2b(fixture_graph):
    for src, dst in (("fig2a", "fig2b"), ("fig2a_dashed", "fig2b_dashed")):
        g = fixture_graph(src)
        assert latent_project(g, _non_hidden(g)) == fixture_graph(dst)


def test_dashed_edges_add_r1_r3(fixture_graph):
    plain = latent_project(fixture_graph("fig2a"), _non_hidden(fixture_graph("fig2a")))
    dashed = latent_project(fixture_graph("fig2a_dashed"), _non_hidden(fixture_graph("fig2a_dashed")))
    assert dashed.bidirected - plain.bidirected == {("R1", "R3")}
    assert dashed.directed == plain.directed


def test_keeping_everything_is_identity(fixture_graph):
    g = fixture_graph("fig2b")
    assert latent_project(g, g.vertices) == g


def test_canonical_confounder():
    g = MixedGraph(
        [Vertex("A", VertexRole.OBSERVED), Vertex("B", VertexRole.OBSERVED), Vertex("U", VertexRole.HIDDEN)],
        [("U", "A"), ("U", "B")],
    )
    p = latent_project(g, {"A", "B"})
    assert not p.directed and p.bidirected == {("A", "B")}


def test_directed_path_through_hidden():
    g = MixedGraph(
        [Vertex(v, VertexRole.OBSERVED) for v in "ABC"],
        [("A", "B"), ("B", "C")],
    )
    p = latent_project(g, {"A", "C"})
    assert p.directed == {("A", "C")} and not p.bidirected


def test_observed_law_graph_fig5a(fixture_graph):
    p = observed_law_graph(fixture_graph("fig5a"))
    assert p == fixture_graph("fig5c", validated=False)
    assert p.is_deterministic("R1", "Xp1")


def test_observed_law_graph_fig5d_and_fig5e(fixture_graph):
    target = fixture_graph("fig5f", validated=False)
    assert observed_law_graph(fixture_graph("fig5d")) == target
    assert observed_law_graph(fixture_graph("fig5e")) == target


def test_observed_law_graph_without_missing_variables():
    g = make_graph(observed=["A", "B"], edges=["A -> B"])
    p = observed_law_graph(g)
    assert set(p.vertices) == {"A", "B"} and p.directed == {("A", "B")}


def _random_keep(rng, g, low=1):
    vs = list(g.vertices)
    k = int(rng.integers(low, len(vs) + 1))
    return set(rng.choice(vs, size=k, replace=False).tolist())


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_projection_in_stages(seed):
    rng = np.random.default_rng(seed)
    g = random_mixed_graph(rng, int(rng.integers(2, 7)))
    keep1 = _random_keep(rng, g)
    keep2 = set(rng.choice(sorted(keep1), size=int(rng.integers(1, len(keep1) + 1)), replace=False).tolist())
    assert latent_project(latent_project(g, keep1), keep2) == latent_project(g, keep2)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_projection_preserves_separation(seed):
    rng = np.random.default_rng(seed)
    g = random_mixed_graph(rng, int(rng.integers(2, 7)))
    keep = _random_keep(rng, g, low=2)
    p = latent_project(g, keep)
    p.topological_order()  # raises on a directed cycle
    for A, B, Z in disjoint_triples(sorted(keep)):
        assert is_m_separated(p, A, B, Z) == is_m_separated(g, A, B, Z)
