"""Brute-force ground truth on binary instances.

Laws are generated from an explicit hidden-variable DAG (one hidden vertex
per bidirected edge), pushed through the proxy determinism to get observed
laws, and compared against reconstructions. For non-identified graphs a
search looks for two full laws with the same observed law.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import MissingDataGraph, MixedGraph, Vertex, VertexRole
from .odds_ratio import (
    LawLayout,
    NotIdentifiedGraph,
    mechanism_of,
    reconstruct_mechanism,
    recover_full_law,
    recover_target_law,
)
from .separation import is_m_separated
from .tables import MISSING_STATE, Table

LOW, HIGH = 0.05, 0.95
GRID = 1000


class BudgetExhausted(RuntimeError):
    pass


def canonical_latent_dag(g: MixedGraph) -> MixedGraph:
    """Replace every bidirected edge ``A <-> B`` by ``A <- U[A,B] -> B``."""
    if not g.bidirected:
        return g
    vertices = [g.vertex(v) for v in g.vertices]
    taken = set(g.vertices)
    directed = set(g.directed)
    for a, b in sorted(g.bidirected):
        u = f"U[{a},{b}]"
        while u in taken:
            u += "'"
        taken.add(u)
        vertices.append(Vertex(u, VertexRole.HIDDEN, None, 2))
        directed |= {(u, a), (u, b)}
    cls = type(g) if isinstance(g, MissingDataGraph) else MixedGraph
    return cls(vertices, directed, ())


# -- latent models -----------------------------------------------------------


@dataclass
class LatentModel:
    """Conditional tables of a hidden-variable DAG over binary/finite states."""

    dag: MixedGraph
    cpts: dict  # vertex -> Table over parents + (vertex,)
    layout: LawLayout
    hidden_card: int = 2

    @property
    def exact(self):
        return any(t.exact for t in self.cpts.values())

    @property
    def hidden(self):
        return tuple(self.dag.with_role(VertexRole.HIDDEN))

    def joint(self, skip=None) -> Table:
        t = None
        for v in self.dag.topological_order():
            if v == skip:
                continue
            t = self.cpts[v] if t is None else t * self.cpts[v]
        return t

    def full_law(self) -> Table:
        return self.joint().sum_out(self.hidden).transpose(self.layout.full_vars)

    def replace(self, vertex, table) -> LatentModel:
        cpts = dict(self.cpts)
        cpts[vertex] = table
        return LatentModel(self.dag, cpts, self.layout, self.hidden_card)

    def to_float(self) -> LatentModel:
        return LatentModel(self.dag, {v: t.to_float() for v, t in self.cpts.items()}, self.layout, self.hidden_card)


def _draw(rng, exact):
    if exact:
        return Fraction(int(rng.integers(int(LOW * GRID), int(HIGH * GRID) + 1)), GRID)
    return float(rng.uniform(LOW, HIGH))


def random_model(g: MixedGraph, seed, trial=0, hidden_card=2, exact=False, order=None) -> LatentModel:
    """Random conditional tables for the canonical latent DAG of ``g``.

    Binary entries ``p(v=0 | pa)`` are uniform on ``[0.05, 0.95]`` (on a
    1/1000 grid in exact mode). Hidden vertices take ``hidden_card`` states
    with clamped weights normalized to one.
    """
    if hidden_card < 2:
        raise ValueError("hidden_card must be at least 2")
    base = g.elide_proxies() if isinstance(g, MissingDataGraph) else g
    layout = LawLayout.of(base, order)
    dag = canonical_latent_dag(base)
    cards = {v: (hidden_card if dag.role(v) is VertexRole.HIDDEN else 2) for v in dag.vertices}
    rng = np.random.default_rng([int(seed), int(trial)])
    cpts = {}
    for v in dag.topological_order():
        pa = tuple(sorted(dag.parents(v)))
        shape = tuple(cards[p] for p in pa) + (cards[v],)
        arr = np.empty(shape, dtype=object if exact else float)
        for idx in itertools.product(*(range(cards[p]) for p in pa)):
            if cards[v] == 2:
                p0 = _draw(rng, exact)
                arr[idx + (0,)] = p0
                arr[idx + (1,)] = 1 - p0
            else:
                w = [_draw(rng, exact) for _ in range(cards[v])]
                s = sum(w)
                for k in range(cards[v]):
                    arr[idx + (k,)] = w[k] / s
        cpts[v] = Table(pa + (v,), arr)
    return LatentModel(dag, cpts, layout, hidden_card)


def random_full_law(g: MixedGraph, seed, hidden_card=2, trial=0, exact=False, order=None) -> Table:
    return random_model(g, seed, trial, hidden_card, exact, order).full_law()


def observe(full: Table, layout: LawLayout) -> Table:
    """Observed law over ``O``, ``R`` and proxies; a proxy takes state 2 (``?``) when its indicator is 0."""
    full = full.transpose(layout.full_vars)
    K = len(layout.indicators)
    shape = (2,) * len(layout.observed) + (2,) * K + (3,) * K
    arr = np.zeros(shape, dtype=full.values.dtype)
    if full.exact:
        arr[...] = Fraction(0)
    for r in itertools.product((0, 1), repeat=K):
        sub = full.reduce(dict(zip(layout.indicators, r)))
        hidden = [x for x, bit in zip(layout.missing, r) if bit == 0]
        sub = sub.sum_out(hidden)
        sub = sub.transpose(layout.observed + tuple(x for x, bit in zip(layout.missing, r) if bit))
        idx = (slice(None),) * len(layout.observed) + r + tuple(slice(0, 2) if bit else MISSING_STATE for bit in r)
        arr[idx] = sub.values if sub.values.ndim else sub.values[()]
    return Table(layout.observed_vars, arr)


# -- exact conditional independence -------------------------------------------


def ci_holds(law: Table, a, b, z=(), tol=0.0) -> bool:
    """``A ⫫ B | Z`` in ``law`` via ``p(a,b,z) p(z) = p(a,z) p(b,z)``."""
    a, b, z = tuple(a), tuple(b), tuple(z)
    pabz = law.marginal(a + b + z)
    paz = law.marginal(a + z)
    pbz = law.marginal(b + z)
    pz = law.marginal(z) if z else Table.scalar(law.total())
    lhs = (pabz * pz).transpose(a + b + z)
    rhs = (paz * pbz).transpose(a + b + z)
    diff = lhs.values - rhs.values
    if law.exact and tol == 0:
        return all(d == 0 for d in np.ravel(diff))
    return float(np.max(np.abs(diff.astype(float)))) <= tol


def markov_violations(law: Table, g: MixedGraph, tol=0.0, max_cond=None) -> list:
    """Pairwise m-separations of ``g`` that fail in ``law``."""
    vs = [v for v in law.variables]
    bad = []
    for a, b in itertools.combinations(vs, 2):
        rest = [v for v in vs if v not in (a, b)]
        for k in range(len(rest) + 1 if max_cond is None else min(max_cond, len(rest)) + 1):
            for z in itertools.combinations(rest, k):
                if is_m_separated(g, {a}, {b}, set(z)) and not ci_holds(law, (a,), (b,), z, tol):
                    bad.append((a, b, z))
    return bad


# -- verification of identified graphs ---------------------------------------


@dataclass
class VerifyReport:
    trials: int
    passes: int
    max_error: float
    max_mechanism_error: float
    max_target_error: float
    tol: float
    recipe: str
    per_trial: list = field(default_factory=list, repr=False)

    @property
    def all_passed(self):
        return self.passes == self.trials

    def to_json(self):
        return {
            "trials": self.trials,
            "passes": self.passes,
            "max_error": self.max_error,
            "max_mechanism_error": self.max_mechanism_error,
            "max_target_error": self.max_target_error,
            "tol": self.tol,
            "recipe_text": self.recipe,
        }


def verify_identified(g: MissingDataGraph, trials=200, seed=0, tol=1e-8, hidden_card=2, order=None) -> VerifyReport:
    from .identification import decide_full_law

    verdict = decide_full_law(g, order=order, with_certificate=False)
    if not verdict.identified:
        raise NotIdentifiedGraph(f"colluding path {verdict.witness.describe()}")
    passes = 0
    worst = worst_m = worst_t = 0.0
    per = []
    for t in range(trials):
        model = random_model(g, seed, t, hidden_card, order=order)
        full = model.full_law()
        obs = observe(full, model.layout)
        mech = reconstruct_mechanism(obs, g, order=order, check=False)
        true_mech = mechanism_of(full, model.layout)
        e_m = mech.table.max_abs_diff(true_mech)
        e_f = recover_full_law(obs, mech).max_abs_diff(full)
        e_t = recover_target_law(obs, mech).max_abs_diff(full.sum_out(model.layout.indicators))
        ok = max(e_m, e_f, e_t) < tol
        passes += ok
        worst, worst_m, worst_t = max(worst, e_f), max(worst_m, e_m), max(worst_t, e_t)
        per.append({"trial": t, "full_error": e_f, "mechanism_error": e_m, "passed": bool(ok)})
    return VerifyReport(trials, passes, worst, worst_m, worst_t, tol, verdict.recipe, per)


# -- counterexample search ----------------------------------------------------


@dataclass
class Counterexample:
    first: Table
    second: Table
    layout: LawLayout
    strategy: str
    observed_gap: float
    full_distance: float
    exact: bool
    models: tuple = field(default=(), repr=False)

    def to_json(self, dump_laws=False):
        out = {
            "found": True,
            "strategy": self.strategy,
            "exact": self.exact,
            "observed_gap": self.observed_gap,
            "full_distance": self.full_distance,
        }
        if dump_laws:
            out["laws"] = [law_lines(self.first), law_lines(self.second)]
        return out


def law_lines(t: Table) -> list[str]:
    """One ``bits value`` line per assignment; header lists the variables."""
    lines = ["# " + " ".join(t.variables)]
    for idx, val in t.items():
        bits = "".join("?" if s == MISSING_STATE else str(s) for s in idx)
        lines.append(f"{bits} {val}")
    return lines


def _directions(cpt: Table):
    """Basis of normalization-preserving perturbations of one conditional table."""
    *pa_cards, k = cpt.shape
    for idx in itertools.product(*(range(c) for c in pa_cards)):
        for w in range(k - 1):
            e = np.zeros(cpt.shape, dtype=cpt.values.dtype)
            if cpt.exact:
                e[...] = Fraction(0)
            e[idx + (w,)] = 1
            e[idx + (k - 1,)] = -1
            yield Table(cpt.variables, e)


def _effects(model: LatentModel, vertex):
    """Columns: change of full and observed law per unit step along each direction."""
    rest = model.joint(skip=vertex)
    full_cols, obs_cols, dirs = [], [], []
    for e in _directions(model.cpts[vertex]):
        d_full = (rest * e).sum_out(model.hidden).transpose(model.layout.full_vars)
        full_cols.append(np.ravel(d_full.values))
        obs_cols.append(np.ravel(observe(d_full, model.layout).values))
        dirs.append(e)
    return np.array(full_cols, dtype=object if model.exact else float).T, np.array(
        obs_cols, dtype=object if model.exact else float
    ).T, dirs


def _rref_nullspace(m):
    """Exact null space of a Fraction matrix (list of basis vectors)."""
    rows = [list(r) for r in m]
    ncol = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / Fraction(rows[r][c])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncol) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncol
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][f]
        basis.append(v)
    return basis


def _solve_exact(a, b):
    """One exact solution of ``a x = b`` or None if inconsistent."""
    aug = np.concatenate([a, b.reshape(-1, 1)], axis=1)
    rows = [list(r) for r in aug]
    ncol = a.shape[1]
    pivots = []
    r = 0
    for c in range(ncol):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / Fraction(rows[r][c])
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][-1] != 0:
            return None
    x = [Fraction(0)] * ncol
    for i, pc in enumerate(pivots):
        x[pc] = rows[i][-1]
    return x


def _step_limit(cpt: Table, delta: Table, lo=Fraction(1, 20), hi=Fraction(19, 20)):
    """Largest ``t >= 0`` keeping ``cpt + t * delta`` inside ``[lo, hi]``."""
    best = None
    for (idx, c), (_, d) in zip(cpt.items(), delta.items()):
        if d > 0:
            lim = (hi - c) / d
        elif d < 0:
            lim = (lo - c) / d
        else:
            continue
        best = lim if best is None else min(best, lim)
    return best if best is not None else 0


def _finish(model1, model2, strategy, min_distance, exact):
    f1, f2 = model1.full_law(), model2.full_law()
    dist = f1.max_abs_diff(f2)
    if dist <= min_distance:
        return None
    o1, o2 = observe(f1, model1.layout), observe(f2, model2.layout)
    gap = o1.max_abs_diff(o2)
    if exact and not all(x == y for x, y in zip(np.ravel(o1.values), np.ravel(o2.values))):
        return None
    return Counterexample(f1, f2, model1.layout, strategy, gap, dist, exact, (model1, model2))


def _single_table(model: LatentModel, vertex, min_distance, float_model=None):
    fm = float_model or model.to_float()
    F, M, _ = _effects(fm, vertex)
    if M.size == 0:
        return None
    # float screen: does a null direction of M move the full law?
    _, s, vt = np.linalg.svd(M)
    rank = int(np.sum(s > 1e-10 * max(1.0, s[0] if s.size else 1.0)))
    null = vt[rank:].T
    if null.shape[1] == 0 or np.max(np.abs(F @ null)) < 1e-9:
        return None
    F, M, dirs = _effects(model, vertex)
    for v in _rref_nullspace(M):
        change = F.dot(np.array(v, dtype=object))
        if all(c == 0 for c in change):
            continue
        delta = None
        for coef, d in zip(v, dirs):
            if coef != 0:
                delta = d * coef if delta is None else delta + d * coef
        for sign in (1, -1):
            step = _step_limit(model.cpts[vertex], delta * sign)
            if step <= 0:
                continue
            new = model.cpts[vertex] + delta * (sign * step)
            found = _finish(model, model.replace(vertex, new), f"null-space:{vertex}", min_distance, True)
            if found:
                return found
    return None


def _two_table(model: LatentModel, w1, w2, rng, min_distance):
    """Perturb ``w1`` at random, then re-solve ``w2`` so the observed law is unchanged."""
    target = observe(model.full_law(), model.layout)
    cpt1 = model.cpts[w1]
    delta = None
    for d in _directions(cpt1):
        coef = Fraction(int(rng.integers(-3, 4)), 20)
        delta = d * coef if delta is None else delta + d * coef
    if delta is None or all(x == 0 for x in np.ravel(delta.values)):
        return None
    new1 = cpt1 + delta
    if any(not (LOW / 2 <= x <= 1 - LOW / 2) for x in np.ravel(new1.values)):
        return None
    m1 = model.replace(w1, new1)
    _, M, dirs = _effects(m1, w2)
    resid = np.ravel((target.values - observe(m1.full_law(), m1.layout).values))
    x = _solve_exact(M, np.array(resid, dtype=object))
    if x is None:
        return None
    new2 = m1.cpts[w2]
    for coef, d in zip(x, dirs):
        if coef != 0:
            new2 = new2 + d * coef
    if any(not (0 < v < 1) for v in np.ravel(new2.values)):
        return None
    return _finish(model, m1.replace(w2, new2), f"two-table:{w1},{w2}", min_distance, True)


def _confounded_pair_family(model: LatentModel, rng, min_distance):
    """Hidden ``U`` over ``X <- U -> R``: move ``(b, c)`` keeping ``ab + (1-a)c``, then re-solve ``e``."""
    (x,), (r,) = model.layout.missing, model.layout.indicators
    (u,) = model.hidden
    if model.hidden_card != 2:
        return None
    a = model.cpts[u].values[0]
    b, c = model.cpts[r].transpose((u, r)).values[:, 0]
    d, e = model.cpts[x].transpose((u, x)).values[:, 0]
    k = a / (1 - a)
    # feasible shifts t keep b + t and c - k t inside [LOW, HIGH]
    lo, hi = Fraction(1, 20), Fraction(19, 20)
    up = min(hi - b, (c - lo) / k)
    down = min(b - lo, (hi - c) / k)
    # p(R=1, X=0) = a(1-b)d + (1-a)(1-c)e must not move
    mass = a * (1 - b) * d + (1 - a) * (1 - c) * e
    first = Fraction(int(rng.integers(50, 95)), 100)
    for frac in (first, first / 2):
        shift = frac * up if up >= down else -frac * down
        if shift == 0:
            return None
        b2, c2 = b + shift, c - k * shift
        for d2 in (d, 1 - d, Fraction(1, 2), lo, hi):
            e2 = (mass - a * (1 - b2) * d2) / ((1 - a) * (1 - c2))
            if not 0 < e2 < 1:
                continue
            cr = np.array([[b2, 1 - b2], [c2, 1 - c2]], dtype=object)
            cx = np.array([[d2, 1 - d2], [e2, 1 - e2]], dtype=object)
            m2 = model.replace(r, Table((u, r), cr)).replace(x, Table((u, x), cx))
            found = _finish(model, m2, "confounded-pair", min_distance, True)
            if found:
                return found
    return None


def _is_confounded_pair(g: MixedGraph):
    a = g.full_law_graph() if isinstance(g, MissingDataGraph) else g
    pairs = list(a.pairs().values())
    if len(pairs) != 1 or a.directed or len(a.vertices) != 2:
        return False
    p = pairs[0]
    return a.bidirected == frozenset({tuple(sorted((p.missing, p.indicator)))})


@dataclass
class SearchOutcome:
    counterexample: Counterexample | None
    attempts: int
    budget: int

    @property
    def found(self):
        return self.counterexample is not None

    def to_json(self, dump_laws=False):
        if self.counterexample is not None:
            out = self.counterexample.to_json(dump_laws)
        else:
            out = {"found": False, "reason": "BudgetExhausted"}
        out["attempts"] = self.attempts
        out["budget"] = self.budget
        return out


def search_counterexample(g: MissingDataGraph, seed=0, budget=200, min_distance=0.01, hidden_card=2) -> SearchOutcome:
    """Look for two full laws Markov to ``g`` with identical observed laws.

    Each candidate (one strategy applied to one random base model) costs
    one unit of ``budget``. Every returned pair agrees exactly on the
    observed law (rational arithmetic).
    """
    base = g.full_law_graph() if isinstance(g, MissingDataGraph) else g
    used = 0
    trial = 0
    confounded = _is_confounded_pair(g)
    while used < budget:
        rng = np.random.default_rng([int(seed), trial, 7])
        model = random_model(base, seed, trial, hidden_card, exact=True)
        fmodel = model.to_float()
        trial += 1
        candidates = []
        if confounded:
            candidates.append(lambda: _confounded_pair_family(model, rng, min_distance))
        for v in model.dag.topological_order():
            candidates.append(lambda v=v: _single_table(model, v, min_distance, fmodel))
        for w1, w2 in itertools.permutations(model.dag.topological_order(), 2):
            candidates.append(lambda w1=w1, w2=w2: _two_table(model, w1, w2, rng, min_distance))
        for cand in candidates:
            if used >= budget:
                break
            used += 1
            found = cand()
            if found is not None:
                return SearchOutcome(found, used, budget)
    return SearchOutcome(None, used, budget)


def find_counterexample(g: MissingDataGraph, seed=0, budget=200, min_distance=0.01, hidden_card=2):
    """The pair ``(first, second)`` of full laws, or None when the budget runs out."""
    out = search_counterexample(g, seed, budget, min_distance, hidden_card)
    if out.counterexample is None:
        return None
    return out.counterexample
