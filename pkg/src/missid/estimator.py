"""scikit-learn style wrapper: fit on an observed law, transform to the full law."""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_graph, check_observed_law
from .identification import decide_full_law
from .odds_ratio import LawLayout, NotIdentifiedGraph, reconstruct_mechanism, recover_full_law, recover_target_law


class FullLawEstimator(BaseEstimator):
    """Recover the full law of an identified missing-data graph.

    Parameters
    ----------
    graph : MissingDataGraph, graph text or path to a ``.mdg`` file
    order : optional indicator order for the odds-ratio factorization

    Attributes set by ``fit``: ``verdict_``, ``layout_``, ``mechanism_``,
    ``full_law_`` and ``target_law_``.
    """

    def __init__(self, graph=None, order=None):
        self.graph = graph
        self.order = order

    def fit(self, X, y=None):
        g = check_graph(self.graph)
        self.verdict_ = decide_full_law(g, order=self.order, with_certificate=False)
        if not self.verdict_.identified:
            raise NotIdentifiedGraph(f"colluding path {self.verdict_.witness.describe()}")
        self.layout_ = LawLayout.of(g.full_law_graph(), self.order)
        observed = check_observed_law(X, self.layout_)
        self.mechanism_ = reconstruct_mechanism(observed, g, order=self.order, check=False)
        self.full_law_ = recover_full_law(observed, self.mechanism_)
        self.target_law_ = recover_target_law(observed, self.mechanism_)
        return self

    def transform(self, X=None):
        """The fitted full law as an array over ``O``, ``X^(1)``, ``R``; ``X`` refits when given."""
        if X is not None:
            self.fit(X)
        check_is_fitted(self, "full_law_")
        return self.full_law_.values

    def fit_transform(self, X, y=None):
        return self.fit(X).transform()
