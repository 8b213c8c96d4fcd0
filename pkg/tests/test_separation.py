import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import disjoint_triples, open_table, random_mixed_graph, separated_by_moralization, separated_by_paths

from missid.graph import MixedGraph, UnknownVertex, Vertex, VertexRole, make_graph
from missid.separation import OverlappingSets, ProxyInQuery, complete_markov_blanket, is_m_separated

seeds = st.integers(0, 2**32 - 1)


def test_fig1a_examples(fixture_graph):
    g = fixture_graph("fig1a")
    assert is_m_separated(g, {"R1"}, {"R3"}, {"X3", "R2"})
    assert not is_m_separated(g, {"R2"}, {"R1"}, {"X1", "R3"})


def test_fig2b_example(fixture_graph):
    assert is_m_separated(fixture_graph("fig2b"), {"R3"}, {"R1"}, {"R2", "X1", "X2"})


def test_edgeless_graph():
    g = MixedGraph([Vertex(v, VertexRole.OBSERVED) for v in "ABCD"])
    for A, B, Z in disjoint_triples(g.vertices):
        assert is_m_separated(g, A, B, Z)


def test_collider_forms():
    g = make_graph(observed=["A", "B", "C", "D"], edges=["A -> C", "C -> D"], biedges=["B <-> C"])
    assert is_m_separated(g, {"A"}, {"B"})
    assert not is_m_separated(g, {"A"}, {"B"}, {"C"})
    assert not is_m_separated(g, {"A"}, {"B"}, {"D"})


def test_overlapping_sets_rejected():
    g = make_graph(observed=["A", "B"])
    with pytest.raises(OverlappingSets):
        is_m_separated(g, {"A"}, {"A", "B"})


def test_unknown_vertex_rejected():
    g = make_graph(observed=["A", "B"])
    with pytest.raises(UnknownVertex):
        is_m_separated(g, {"A"}, {"Q"})


def test_proxies_rejected():
    g = make_graph(missing=["X1"], proxies=True)
    with pytest.raises(ProxyInQuery):
        is_m_separated(g, {"Xp1"}, {"X1"})


def test_complete_markov_blanket_examples(fixture_graph):
    chain = make_graph(observed=["A", "B", "C"], edges=["A -> B", "B -> C"])
    assert complete_markov_blanket(chain, "A") == {"B"}
    assert "X1" in complete_markov_blanket(fixture_graph("fig5a"), "R1")
    assert complete_markov_blanket(fixture_graph("fig1a"), "R3") == {"X1", "R2"}


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_agrees_with_path_enumeration_and_moralization(seed):
    rng = np.random.default_rng(seed)
    g = random_mixed_graph(rng, int(rng.integers(2, 6)))
    table, bit = open_table(g)
    for A, B, Z in disjoint_triples(g.vertices):
        got = is_m_separated(g, A, B, Z)
        assert got == separated_by_paths(table, bit, A, B, Z)
        assert got == separated_by_moralization(g, A, B, Z)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_symmetry_and_decomposition(seed):
    rng = np.random.default_rng(seed)
    g = random_mixed_graph(rng, int(rng.integers(3, 6)))
    for A, B, Z in disjoint_triples(g.vertices):
        sep = is_m_separated(g, A, B, Z)
        assert sep == is_m_separated(g, B, A, Z)
        if sep:
            for a in A:
                assert is_m_separated(g, {a}, B, Z)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_complete_markov_blanket_is_sound(seed):
    rng = np.random.default_rng(seed)
    g = random_mixed_graph(rng, int(rng.integers(2, 7)))
    for v in g.vertices:
        mb = complete_markov_blanket(g, v)
        rest = set(g.vertices) - mb - {v}
        if rest:
            assert is_m_separated(g, {v}, rest, mb)
