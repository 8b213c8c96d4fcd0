"""Odds-ratio factorization of missingness mechanisms and full-law recovery.

All odds ratios use ``R = 1`` as the reference level. For a positive
mechanism ``p(r | c)`` write, for every non-empty set ``A`` of indicators,

    g_A(c) = prod_{B ⊆ A} p(R_B=0, R_{-B}=1 | c) ** (-1) ** |A \\ B|

so that ``p(r | c) = p(R=1 | c) * prod_{∅≠A ⊆ zeros(r)} g_A(c)``. Singletons
give the univariate odds, pairs the pairwise odds ratios and larger sets
the interaction terms. When no pair has a colluding path each ``g_A`` is
free of ``X_A^(1)``, which yields the constructive formula in
:func:`reconstruct_mechanism`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .graph import GraphError, MissingDataGraph, MixedGraph, VertexRole
from .tables import MISSING_STATE, Table, ZeroProbabilityEvent


class NotIdentifiedGraph(GraphError, ValueError):
    pass


class PositivityViolation(ZeroProbabilityEvent):
    pass


def _subsets(items, min_size=1):
    items = tuple(items)
    for k in range(min_size, len(items) + 1):
        yield from itertools.combinations(items, k)


def _ref(indicators, zeros):
    zeros = set(zeros)
    return {r: 0 if r in zeros else 1 for r in indicators}


def pairwise_or(law: Table, a, b, context=None) -> Table:
    """``OR(A, B | C)`` with reference ``A = B = 1``, as a table over ``A``, ``B`` and ``C``.

    ``law`` is any table proportional to the joint of ``A``, ``B`` and the
    remaining variables ``C``; ``context`` optionally fixes some of ``C``.
    """
    t = law.reduce(context) if context else law
    rest = tuple(v for v in t.variables if v not in (a, b))
    t = t.transpose((a, b) + rest)
    v = t.values
    num = v * v[1:2, 1:2]
    den = v[1:2, :] * v[:, 1:2]
    if np.any(den == 0):
        raise ZeroProbabilityEvent(f"odds ratio of {a}, {b} conditions on a null event")
    return Table(t.variables, num / den)


def interaction_terms(mech: Table, indicators) -> dict[tuple, Table]:
    """``g_A`` for every non-empty ``A``, each a table over the context."""
    cells = {}
    for zeros in _subsets(indicators, 0):
        cells[frozenset(zeros)] = mech.reduce(_ref(indicators, zeros))
    for cell in cells.values():
        if np.any(cell.values == 0):
            raise ZeroProbabilityEvent("mechanism is not strictly positive")
    out = {}
    for a in _subsets(indicators):
        val = _ones_like(cells[frozenset()])
        for b in _subsets(a, 0):
            cell = cells[frozenset(b)]
            val = val / cell if (len(a) - len(b)) % 2 else val * cell
        out[a] = val
    return out


def _ones_like(t: Table) -> Table:
    one = np.ones(t.shape, dtype=t.values.dtype)
    if t.exact:
        one = one.astype(object)
    return Table(t.variables, one)


def interaction_via(mech: Table, indicators, members, i, j) -> Table:
    """Interaction over ``members`` written as a ratio of ``OR(R_i, R_j | ...)`` terms."""
    others = [m for m in members if m not in (i, j)]
    rest = [r for r in indicators if r not in members]
    val = None
    for c in _subsets(others, 0):
        ctx = {**{r: 1 for r in rest}, **{m: (0 if m in c else 1) for m in others}}
        orr = pairwise_or(mech, i, j, ctx).reduce({i: 0, j: 0})
        if val is None:
            val = _ones_like(orr)
        val = val / orr if (len(others) - len(c)) % 2 else val * orr
    return val


@dataclass
class OddsRatioFactorization:
    order: tuple
    context: tuple
    pieces: dict  # R_k -> table over (R_k, context): p(R_k | R_-k = 1, c)
    pairwise: dict  # (R_k, R_l) -> table over (R_k, R_l, context)
    interactions: dict  # tuple of >= 3 indicators -> table over those + context
    sequential: dict  # R_k -> OR(R_k, R_<k | R_>k = 1, c) over (R_k, R_<k, context)
    normalizer: Table
    terms: dict = field(repr=False)  # g_A tables over the context

    def recompose(self) -> Table:
        """Mechanism rebuilt from pieces, pairwise odds ratios, interactions and ``Z``."""
        t = _unnormalized(self.order, self.context, self.pieces, [*self.pairwise.values(), *self.interactions.values()])
        return (t / self.normalizer).transpose(self.order + self.context)

    def recompose_sequential(self) -> Table:
        """Mechanism rebuilt from pieces and the order-dependent odds ratios."""
        t = _unnormalized(self.order, self.context, self.pieces, list(self.sequential.values()))
        z = t.sum_out(self.order)
        return (t / z).transpose(self.order + self.context)


def _unnormalized(order, context, pieces, factors):
    t = None
    for r in order:
        t = pieces[r] if t is None else t * pieces[r]
    for f in factors:
        t = t * f
    return t.transpose(order + context)


def _lift(g_val: Table, members, exact) -> Table:
    """Table over ``members`` + context equal to ``g_val`` at all-zeros and 1 elsewhere."""
    shape = (2,) * len(members) + g_val.shape
    arr = np.ones(shape, dtype=object if exact else float)
    arr[(0,) * len(members)] = g_val.values
    return Table(tuple(members) + g_val.variables, arr)


def factorize(mech: Table, order, context=None) -> OddsRatioFactorization:
    """Decompose ``p(R | c)`` into univariate pieces, odds ratios and interactions."""
    order = tuple(order)
    context = tuple(context) if context is not None else tuple(v for v in mech.variables if v not in order)
    mech = mech.transpose(order + context)
    exact = mech.exact
    terms = interaction_terms(mech, order)

    pieces = {}
    for r in order:
        others = {o: 1 for o in order if o != r}
        slice_ = mech.reduce(others)
        pieces[r] = (slice_ / slice_.sum_out([r])).transpose((r,) + context)
    pairwise = {a: _lift(terms[a], a, exact) for a in terms if len(a) == 2}
    interactions = {a: _lift(terms[a], a, exact) for a in terms if len(a) >= 3}
    sequential = {}
    for k, r in enumerate(order[1:], 1):
        prev, after = order[:k], order[k + 1:]
        t = mech.reduce({o: 1 for o in after}).transpose((r,) + prev + context)
        v = t.values
        ref_prev = (slice(None),) + (slice(1, 2),) * len(prev)
        ref_k = (slice(1, 2),)
        val = v / v[ref_k] * v[(slice(1, 2),) + (slice(1, 2),) * len(prev)] / v[ref_prev]
        sequential[r] = Table(t.variables, val)
    unnorm = _unnormalized(order, context, pieces, [*pairwise.values(), *interactions.values()])
    z = unnorm.sum_out(order)
    return OddsRatioFactorization(order, context, pieces, pairwise, interactions, sequential, z, terms)


# -- laws ------------------------------------------------------------------


@dataclass
class LawLayout:
    """Variable bookkeeping shared by full and observed law tables."""

    observed: tuple
    missing: tuple
    indicators: tuple
    proxies: tuple

    @classmethod
    def of(cls, g: MixedGraph, order=None):
        pairs = [p for p in g.pairs().values() if p.missing is not None and p.indicator is not None]
        if order is not None:
            rank = {r: i for i, r in enumerate(order)}
            pairs.sort(key=lambda p: rank.get(p.indicator, len(rank)))
        else:
            topo = {v: i for i, v in enumerate(g.topological_order())}
            pairs.sort(key=lambda p: topo[p.indicator])
        from .graph import partner_ids

        proxies = tuple(p.proxy or partner_ids(p.missing)[1] for p in pairs)
        return cls(
            tuple(g.with_role(VertexRole.OBSERVED)),
            tuple(p.missing for p in pairs),
            tuple(p.indicator for p in pairs),
            proxies,
        )

    @property
    def full_vars(self):
        return self.observed + self.missing + self.indicators

    @property
    def observed_vars(self):
        return self.observed + self.indicators + self.proxies

    @property
    def context(self):
        return self.observed + self.missing


def mechanism_of(full: Table, layout: LawLayout) -> Table:
    """``p(R | X^(1), O)`` from a full-law table."""
    full = full.transpose(layout.full_vars)
    m = full / full.marginal(layout.context)
    return m.transpose(layout.indicators + layout.context)


def _complete_cases(observed: Table, layout: LawLayout) -> Table:
    """``p(O, X^(1)=x, R=1)`` read off the ``R = 1`` stratum, indexed by ``X^(1)`` ids."""
    t = observed.reduce({r: 1 for r in layout.indicators})
    t = t.transpose(layout.observed + layout.proxies)
    idx = (slice(None),) * len(layout.observed) + (slice(0, 2),) * len(layout.proxies)
    return Table(layout.observed + layout.missing, t.values[idx])


def reconstruct_terms(observed: Table, layout: LawLayout) -> dict[tuple, Table]:
    """``g_A`` for every non-empty ``A`` from observed-law quantities only.

    Uses the free-of-``X_A`` property inductively:
    ``p(R_A=0, R_-A=1, x_-A) = g_A(x_-A) * sum_{x_A} p(x, R=1) prod_{∅≠B⊊A} g_B(x_-B)``.
    """
    cc = _complete_cases(observed, layout)
    idx = {r: k for k, r in enumerate(layout.indicators)}
    terms = {}
    for a in _subsets(layout.indicators):
        miss_a = [layout.missing[idx[r]] for r in a]
        prox_a = {layout.proxies[idx[r]]: MISSING_STATE for r in a}
        cell = observed.reduce({**_ref(layout.indicators, a), **prox_a})
        cell = Table(cell.variables, cell.values[tuple(slice(0, 2) for _ in cell.variables)])
        rename = dict(zip(layout.proxies, layout.missing))
        keep = layout.observed + tuple(m for m in layout.missing if m not in miss_a)
        cell = Table([rename.get(v, v) for v in cell.variables], cell.values).transpose(keep)
        weighted = cc
        for b in _subsets(a):
            if b != a:
                weighted = weighted * terms[b]
        denom = weighted.sum_out(miss_a).transpose(keep)
        if np.any(denom.values == 0):
            raise ZeroProbabilityEvent(f"complete-case mass vanishes while solving for {a}")
        terms[a] = cell / denom
    return terms


def mechanism_from_terms(terms, layout: LawLayout, exact=False) -> Table:
    shape = (2,) * len(layout.indicators) + (2,) * len(layout.context)
    arr = np.empty(shape, dtype=object if exact else float)
    ctx = layout.context
    for r in itertools.product((0, 1), repeat=len(layout.indicators)):
        zeros = [ind for ind, bit in zip(layout.indicators, r) if bit == 0]
        val = Table(ctx, np.ones((2,) * len(ctx), dtype=object if exact else float))
        for a in _subsets(zeros):
            val = val * terms[tuple(a)]
        vals = val.transpose(ctx).values
        arr[r] = vals if vals.ndim else vals[()]
    t = Table(layout.indicators + ctx, arr)
    return t / t.sum_out(layout.indicators)


@dataclass
class Mechanism:
    layout: LawLayout
    table: Table  # over indicators + context
    factorization: OddsRatioFactorization | None = None
    recipe: str = ""

    @property
    def indicators(self):
        return self.layout.indicators


def reconstruct_mechanism(observed: Table, g: MissingDataGraph, order=None, check=True) -> Mechanism:
    """Missingness mechanism of an identified graph, computed from its observed law."""
    if check:
        from .identification import decide_full_law

        verdict = decide_full_law(g, with_certificate=False)
        if not verdict.identified:
            raise NotIdentifiedGraph(f"colluding path {verdict.witness.describe()}")
    g = g.full_law_graph() if isinstance(g, MissingDataGraph) else g
    layout = LawLayout.of(g, order)
    if not layout.indicators:
        ctx = layout.context
        t = Table(ctx, np.ones((2,) * len(ctx), dtype=observed.values.dtype))
        return Mechanism(layout, t, None, recipe_text(g, order))
    terms = reconstruct_terms(observed, layout)
    table = mechanism_from_terms(terms, layout, exact=observed.exact)
    fact = factorize(table, layout.indicators, layout.context)
    return Mechanism(layout, table, fact, recipe_text(g, order))


def recover_full_law(observed: Table, mechanism: Mechanism) -> Table:
    """``p(O, X^(1), R) = p(O, X^(1), R=1) / p(R=1 | O, X^(1)) * p(R | O, X^(1))``."""
    layout = mechanism.layout
    cc = _complete_cases(observed, layout)
    if not layout.indicators:
        return cc.transpose(layout.full_vars)
    m = mechanism.table
    p_all_one = m.reduce({r: 1 for r in layout.indicators})
    if np.any(p_all_one.values == 0):
        raise PositivityViolation("p(R=1 | X, O) vanishes somewhere")
    return (cc / p_all_one * m).transpose(layout.full_vars)


def recover_target_law(observed: Table, mechanism: Mechanism) -> Table:
    return recover_full_law(observed, mechanism).sum_out(mechanism.layout.indicators)


def recipe_text(g: MixedGraph, order=None) -> str:
    """Human-readable identifying functional for an identified graph."""
    g = g.full_law_graph() if isinstance(g, MissingDataGraph) else g
    layout = LawLayout.of(g, order)
    ctx = ", ".join(layout.context) or "∅"
    if not layout.indicators:
        return f"no indicators: the full law p({ctx}) is the observed law"
    lines = [f"indicator order: {', '.join(layout.indicators)}"]
    lines.append(
        f"p(R | {ctx}) = (1/Z) * prod_k p(R_k | R_-k=1, {ctx}) * prod_(k>1) OR(R_k, R_<k | R_>k=1, {ctx})"
    )
    for r, x in zip(layout.indicators, layout.missing):
        others = [m for m in layout.context if m != x]
        lines.append(
            f"p({r} | R_-{r}=1, {ctx}) = p({r} | R_-{r}=1, {', '.join(others) or '∅'})"
            f"  [{r} ⫫ {x} | rest by m-separation]"
        )
    lines.append(
        "each odds-ratio term g_A (A a set of indicators) is free of X_A and solves "
        "p(R_A=0, R_-A=1, X_-A) = g_A(X_-A) * sum_{X_A} p(X, R=1) * prod_{B ⊊ A} g_B"
    )
    lines.append("Z = sum_r of the product above")
    lines.append("full law: p(X, R) = p(X, R=1) * p(R | X) / p(R=1 | X); target law: sum over R")
    return "\n".join(lines)
