import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import random_missing_graph

from missid.catalog import colluding_form, fixture_names, fixture_text, load_fixture
from missid.fileformat import ParseError, dump, parse
from missid.graph import VertexRole


def test_every_fixture_parses():
    names = fixture_names()
    assert {"fig1a", "fig2b_dashed", "fig5f", "fig6a_s0", "fig6d_s4"} <= set(names)
    for n in names:
        parse(fixture_text(n))


def test_implicit_indicator():
    g = parse("var X1 missing\nvar A observed\nedge A -> R1\n")
    assert g.role("R1") is VertexRole.INDICATOR
    assert g.pairs()["X1"].indicator == "R1"


def test_renamed_indicator_and_hidden_cardinality():
    g = parse("var Y missing\nvar S indicator Y\nvar U hidden 3\nedge U -> S\n")
    assert g.pairs()["Y"].indicator == "S"
    assert "R_Y" not in g.vertices
    assert g.vertex("U").card == 3


def test_comments_and_blank_lines():
    g = parse("# header\n\nvar X1 missing   # trailing\nbiedge X1 <-> R1\n")
    assert g.bidirected == {("R1", "X1")}


def test_unknown_vertex_reports_line():
    with pytest.raises(ParseError, match=r"line 3: unknown vertex Q"):
        parse("var X1 missing\n\nedge X1 -> Q\n")


def test_empty_file_is_an_error():
    with pytest.raises(ParseError, match="no variables"):
        parse("# nothing here\n")


def test_garbage_line():
    with pytest.raises(ParseError, match="line 2"):
        parse("var X1 missing\nedge X1 => R1\n")


def test_duplicate_declaration():
    with pytest.raises(ParseError, match="duplicate"):
        parse("var A observed\nvar A observed\n")


@pytest.mark.parametrize("name", ["fig1a", "fig2b_dashed", "fig5d"])
def test_dump_round_trip_fixture(name):
    g = load_fixture(name)
    assert parse(dump(g)) == g


def test_dump_round_trip_with_proxies():
    g = colluding_form("d", 3).attach_proxies()
    assert parse(dump(g)) == g


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dump_round_trip_random(seed):
    g = random_missing_graph(np.random.default_rng(seed))
    assert parse(dump(g)) == g
