import itertools
from fractions import Fraction

import numpy as np
import pytest

from missid.graph import is_isomorphic, make_graph
from missid.odds_ratio import NotIdentifiedGraph, mechanism_of
from missid.oracle import (
    canonical_latent_dag,
    ci_holds,
    find_counterexample,
    law_lines,
    markov_violations,
    observe,
    random_full_law,
    random_model,
    search_counterexample,
    verify_identified,
)
from missid.projection import latent_project
from missid.tables import MISSING_STATE, Table


def test_canonical_dag_of_fig5a(fixture_graph):
    assert is_isomorphic(canonical_latent_dag(fixture_graph("fig5a")), fixture_graph("fig5b"))


def test_canonical_dag_leaves_dags_alone(fixture_graph):
    g = fixture_graph("fig1a")
    assert canonical_latent_dag(g) is g


@pytest.mark.parametrize("name", ["fig2b", "fig2b_dashed", "fig5d", "fig5e"])
def test_canonical_dag_projects_back(fixture_graph, name):
    g = fixture_graph(name)
    assert latent_project(canonical_latent_dag(g), g.vertices) == g


def test_random_law_is_deterministic(fixture_graph):
    g = fixture_graph("fig2b")
    a, b = random_full_law(g, 9), random_full_law(g, 9)
    assert a.max_abs_diff(b) == 0
    assert random_full_law(g, 10).max_abs_diff(a) > 0


def test_random_law_respects_positivity_floor(fixture_graph):
    for name in ("fig1a", "fig2b", "fig5d"):
        model = random_model(fixture_graph(name), 2, hidden_card=3)
        mech = mechanism_of(model.full_law(), model.layout)
        assert np.min(mech.values) >= 0.05 ** len(model.layout.indicators)


def test_hidden_card_must_be_at_least_two(fixture_graph):
    with pytest.raises(ValueError):
        random_model(fixture_graph("fig5a"), 0, hidden_card=1)


def test_confounded_pair_algebra(fixture_graph):
    model = random_model(fixture_graph("fig5a"), 4, exact=True)
    (u,) = model.hidden
    a = model.cpts[u].values[0]
    b, c = model.cpts["R1"].transpose((u, "R1")).values[:, 0]
    d, e = model.cpts["X1"].transpose((u, "X1")).values[:, 0]
    law = model.full_law()
    assert law[{"R1": 0, "X1": 0}] == a * b * d + (1 - a) * c * e
    assert law[{"R1": 1, "X1": 0}] == a * (1 - b) * d + (1 - a) * (1 - c) * e
    assert law[{"R1": 0, "X1": 1}] == a * b * (1 - d) + (1 - a) * c * (1 - e)
    obs = observe(law, model.layout)
    assert obs[{"R1": 0, "Xp1": MISSING_STATE}] == a * b + (1 - a) * c


def test_fig1a_laws_satisfy_the_graph(fixture_graph):
    g = fixture_graph("fig1a")
    law = random_full_law(g, 3, exact=True)
    assert markov_violations(law, g.full_law_graph()) == []
    assert ci_holds(law, ("R1",), ("R3",), ("X3", "R2"))
    assert not ci_holds(law, ("R2",), ("R1",), ("X1", "R3"))


def test_observe_preserves_mass_and_determinism(fixture_graph):
    g = fixture_graph("fig2b")
    model = random_model(g, 7, exact=True)
    obs = observe(model.full_law(), model.layout)
    assert obs.total() == 1
    for r, x in zip(model.layout.indicators, model.layout.proxies):
        for state in (0, 1):
            assert obs.reduce({r: 0, x: state}).total() == 0
        assert obs.reduce({r: 1, x: MISSING_STATE}).total() == 0


def test_law_lines_format():
    t = Table(("A", "B"), np.array([[Fraction(1, 4)] * 2] * 2, dtype=object))
    assert law_lines(t) == ["# A B", "00 1/4", "01 1/4", "10 1/4", "11 1/4"]


@pytest.mark.parametrize("name", ["fig1a", "fig1a_dashed", "fig2b"])
def test_verify_identified(fixture_graph, name):
    report = verify_identified(fixture_graph(name), trials=200, seed=0)
    assert report.all_passed and report.max_error < 1e-8
    assert report.to_json()["recipe_text"]


def test_verify_refuses_non_identified(fixture_graph):
    with pytest.raises(NotIdentifiedGraph):
        verify_identified(fixture_graph("fig5a"), trials=1)


def _revalidate(g, ce):
    full = g.full_law_graph()
    for law in (ce.first, ce.second):
        assert markov_violations(law, full) == []
    o1, o2 = observe(ce.first, ce.layout), observe(ce.second, ce.layout)
    assert all(x == y for x, y in zip(np.ravel(o1.values), np.ravel(o2.values)))
    assert ce.first.max_abs_diff(ce.second) > 0.01


@pytest.mark.parametrize("name", ["fig5a", "colluder_dag", "sc_dag", "fig5d", "fig5e"])
def test_counterexamples_revalidate(fixture_graph, name):
    g = fixture_graph(name)
    ce = find_counterexample(g, seed=0, budget=200)
    assert ce is not None and ce.exact
    _revalidate(g, ce)


def test_fig5a_uses_the_analytic_family(fixture_graph):
    assert find_counterexample(fixture_graph("fig5a"), seed=3).strategy == "confounded-pair"


def test_search_is_reproducible(fixture_graph):
    g = fixture_graph("fig5d")
    a = search_counterexample(g, seed=5)
    b = search_counterexample(g, seed=5)
    assert a.to_json(True) == b.to_json(True)


def test_budget_exhausted_is_reported():
    g = make_graph(missing=["X1"], edges=["X1 -> R1"])
    out = search_counterexample(g, seed=0, budget=0)
    assert not out.found and out.to_json()["reason"] == "BudgetExhausted"


@pytest.mark.slow
def test_identified_graph_yields_no_pair(fixture_graph):
    out = search_counterexample(fixture_graph("fig1a"), seed=0, budget=10_000)
    assert not out.found and out.attempts == 10_000


def test_markov_violations_detects_dependence():
    g = make_graph(observed=["A", "B"])
    arr = np.array([[0.4, 0.1], [0.1, 0.4]])
    assert markov_violations(Table(("A", "B"), arr), g) == [("A", "B", ())]
    assert list(itertools.chain(*markov_violations(Table(("A", "B"), np.full((2, 2), 0.25)), g))) == []
