"""Named-axis probability tables.

A :class:`Table` is a dense ndarray whose axes are labelled by variable
ids. Binary variables use states ``0``/``1``; proxies use a third state
(index :data:`MISSING_STATE`) for ``?``. Values may be floats or, in exact
mode, :class:`fractions.Fraction` objects held in an ``object`` array.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

MISSING_STATE = 2


class ZeroProbabilityEvent(ZeroDivisionError):
    """A conditional was requested on an event of probability zero."""


class Table:
    __slots__ = ("variables", "values")

    def __init__(self, variables, values):
        self.variables = tuple(variables)
        self.values = np.asarray(values) if not isinstance(values, np.ndarray) else values
        if self.values.ndim != len(self.variables):
            raise ValueError(f"{len(self.variables)} variables but array has {self.values.ndim} axes")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable in table")

    # -- construction ----------------------------------------------------

    @classmethod
    def scalar(cls, value):
        return cls((), np.array(value, dtype=object if isinstance(value, Fraction) else float))

    @classmethod
    def from_function(cls, variables, cards, fn, exact=False):
        arr = np.empty(tuple(cards), dtype=object if exact else float)
        for idx in itertools.product(*(range(c) for c in cards)):
            arr[idx] = fn(dict(zip(variables, idx)))
        return cls(variables, arr)

    @property
    def exact(self):
        return self.values.dtype == object

    @property
    def shape(self):
        return self.values.shape

    def card(self, v):
        return self.values.shape[self.variables.index(v)]

    def cards(self):
        return dict(zip(self.variables, self.values.shape))

    def copy(self):
        return Table(self.variables, self.values.copy())

    def to_float(self):
        return Table(self.variables, self.values.astype(float))

    def to_exact(self):
        if self.exact:
            return self
        vec = np.vectorize(lambda x: Fraction(x).limit_denominator(10**12), otypes=[object])
        return Table(self.variables, vec(self.values))

    # -- axis manipulation -----------------------------------------------

    def _axes(self, vs):
        return tuple(self.variables.index(v) for v in vs)

    def transpose(self, order):
        order = tuple(order)
        if order == self.variables:
            return self
        if set(order) != set(self.variables):
            raise ValueError(f"cannot reorder {self.variables} as {order}")
        return Table(order, np.transpose(self.values, self._axes(order)))

    def sum_out(self, vs):
        vs = [v for v in vs if v in self.variables]
        if not vs:
            return self
        keep = tuple(v for v in self.variables if v not in vs)
        return Table(keep, self.values.sum(axis=self._axes(vs)))

    def marginal(self, keep):
        keep = tuple(keep)
        missing = [v for v in keep if v not in self.variables]
        if missing:
            raise KeyError(missing[0])
        out = self.sum_out([v for v in self.variables if v not in keep])
        return out.transpose(keep)

    def reduce(self, assignment):
        """Slice out the given ``{var: state}`` entries, dropping those axes."""
        index = []
        keep = []
        for v in self.variables:
            if v in assignment:
                index.append(assignment[v])
            else:
                index.append(slice(None))
                keep.append(v)
        return Table(keep, self.values[tuple(index)])

    def expand(self, variables, cards):
        """Broadcast onto ``variables`` (a superset), repeating along new axes."""
        variables = tuple(variables)
        extra = [v for v in self.variables if v not in variables]
        if extra:
            raise ValueError(f"cannot expand: {extra} not in target")
        src = self.transpose([v for v in variables if v in self.variables])
        shape = tuple(cards[v] if v not in self.variables else src.card(v) for v in variables)
        view = src.values.reshape(tuple(src.card(v) if v in self.variables else 1 for v in variables))
        return Table(variables, np.broadcast_to(view, shape).copy())

    def _align(self, other):
        if not isinstance(other, Table):
            return self.variables, self.values, other
        variables = self.variables + tuple(v for v in other.variables if v not in self.variables)
        cards = {**other.cards(), **self.cards()}
        a = self.expand(variables, cards).values if variables != self.variables else self.values
        b = other.expand(variables, cards).values
        return variables, a, b

    def __mul__(self, other):
        variables, a, b = self._align(other)
        return Table(variables, a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        variables, a, b = self._align(other)
        b_arr = np.asarray(b)
        if np.any(b_arr == 0):
            raise ZeroProbabilityEvent("division by a zero-probability event")
        return Table(variables, a / b)

    def __add__(self, other):
        variables, a, b = self._align(other)
        return Table(variables, a + b)

    def __sub__(self, other):
        variables, a, b = self._align(other)
        return Table(variables, a - b)

    def __pow__(self, k):
        return Table(self.variables, self.values ** k)

    def total(self):
        return self.values.sum()

    def conditional(self, given):
        """``p(rest | given)`` as a table over all variables."""
        return self / self.marginal(tuple(given))

    def max_abs_diff(self, other):
        other = other.transpose(self.variables)
        return float(np.max(np.abs((self.values - other.values).astype(float)))) if self.values.size else 0.0

    def items(self):
        for idx in itertools.product(*(range(c) for c in self.values.shape)):
            yield idx, self.values[idx]

    def __getitem__(self, assignment):
        if isinstance(assignment, dict):
            return self.values[tuple(assignment[v] for v in self.variables)]
        return self.values[assignment]

    def __repr__(self):
        return f"Table({self.variables}, shape={self.values.shape})"


class TabularKernel:
    """A kernel ``q(random | fixed)`` stored as a table over both sets."""

    def __init__(self, random, fixed, table: Table, check=True, tol=1e-9):
        self.random = tuple(random)
        self.fixed = tuple(fixed)
        self.table = table.transpose(self.random + self.fixed)
        if check:
            sums = self.table.sum_out(self.random).values
            vals = self.table.values
            if self.table.exact:
                ok = all(s == 1 for s in np.ravel(sums)) and all(v >= 0 for v in np.ravel(vals))
            else:
                ok = np.allclose(sums.astype(float), 1.0, atol=tol) and np.all(vals >= -tol)
            if not ok:
                raise ValueError("kernel is not normalized over its random variables")

    @classmethod
    def joint(cls, table: Table):
        return cls(table.variables, (), table)

    @property
    def variables(self):
        return self.random + self.fixed

    def max_abs_diff(self, other: TabularKernel):
        if set(self.random) != set(other.random) or set(self.fixed) != set(other.fixed):
            raise ValueError("kernels have different signatures")
        return self.table.max_abs_diff(other.table)

    def __repr__(self):
        return f"TabularKernel(random={self.random}, fixed={self.fixed})"


def binary_assignments(variables):
    for bits in itertools.product((0, 1), repeat=len(variables)):
        yield dict(zip(variables, bits))
