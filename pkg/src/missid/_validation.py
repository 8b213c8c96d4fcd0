"""Input coercion shared by the estimator and the CLI."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .fileformat import load, parse
from .graph import MissingDataGraph, MixedGraph, validate
from .odds_ratio import LawLayout
from .tables import Table


def check_graph(graph) -> MissingDataGraph:
    """Accept a validated graph, an unvalidated one, graph text or a path."""
    if isinstance(graph, MissingDataGraph):
        return graph
    if isinstance(graph, MixedGraph):
        return validate(graph)
    if isinstance(graph, Path) or (isinstance(graph, str) and "\n" not in graph and graph.endswith(".mdg")):
        return validate(load(graph))
    if isinstance(graph, str):
        return validate(parse(graph))
    raise TypeError(f"cannot interpret {type(graph).__name__} as a graph")


def check_observed_law(law, layout: LawLayout, tol=1e-9) -> Table:
    """Observed law as a :class:`Table` in ``layout.observed_vars`` order.

    A bare array must already be laid out as ``O``, ``R``, proxies with
    shapes 2, 2 and 3.
    """
    if isinstance(law, Table):
        missing = set(layout.observed_vars) - set(law.variables)
        if missing:
            raise ValueError(f"observed law lacks variables {sorted(missing)}")
        t = law.transpose(layout.observed_vars)
    else:
        arr = np.asarray(law)
        if arr.dtype != object:
            arr = arr.astype(float)
        t = Table(layout.observed_vars, arr)
    expected = (2,) * (len(layout.observed) + len(layout.indicators)) + (3,) * len(layout.proxies)
    if t.shape != expected:
        raise ValueError(f"observed law has shape {t.shape}, expected {expected}")
    vals = np.asarray(t.values, dtype=float)
    if np.any(vals < -tol):
        raise ValueError("observed law has negative entries")
    if abs(vals.sum() - 1) > tol:
        raise ValueError(f"observed law sums to {vals.sum()}, not 1")
    return t
