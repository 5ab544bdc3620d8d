"""Fincke-Pohst enumeration with exact integer pruning.

All GS quantities of a block are rescaled to a common denominator once, so
the inner loop runs on Python ints only: centres are ``num / den`` with an
integer ``num`` per level, and partial squared lengths are integers scaled
by a single factor ``Q``.  No floating point is involved anywhere.
"""
from __future__ import annotations

import os
from fractions import Fraction
from math import isqrt, lcm
from typing import Callable, Sequence

from .errors import BudgetExceeded

DEFAULT_NODE_BUDGET = 10**7


def node_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get("LATDIST_BUDGET_NODES")
    return int(env) if env else DEFAULT_NODE_BUDGET


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class Enumerator:
    """Enumerate integer ``x`` minimising/under-bounding ``sum_i r_i (x_i - c_i(x))^2``.

    ``mu`` and ``r`` are the block-local GS data (``mu[i][j]`` for ``j < i``).
    ``tau`` (optional) are the GS coordinates of a target; ``base`` is the
    squared distance of the target to the span, added to every length.
    ``free_from``: levels ``>= free_from`` must not all be zero (``0`` gives the
    usual nonzero-vector constraint, ``None`` means no constraint, as in CVP).
    ``symmetric``: only one of ``x``/``-x`` is produced (the one whose highest
    nonzero coordinate is positive).
    """

    def __init__(self, mu: Sequence[Sequence[Fraction]], r: Sequence[Fraction],
                 tau: Sequence[Fraction] | None = None, base: Fraction = Fraction(0),
                 free_from: int | None = 0, symmetric: bool = True,
                 budget: int | None = None):
        m = len(r)
        self.m = m
        self.base = Fraction(base)
        tau = [Fraction(0)] * m if tau is None else [Fraction(t) for t in tau]
        self.has_target = any(tau)
        self.free_from = free_from
        self.symmetric = symmetric and not self.has_target
        self.cap = node_budget(budget)
        self.nodes = 0

        den = []
        for i in range(m):
            d = tau[i].denominator
            for j in range(i + 1, m):
                d = lcm(d, mu[j][i].denominator)
            den.append(d)
        self.den = den
        self.coef = [[(mu[j][i] * den[i]).numerator if j > i else 0 for j in range(m)]
                     for i in range(m)]
        self.tnum = [(tau[i] * den[i]).numerator for i in range(m)]
        weights = [Fraction(r[i]) / (den[i] * den[i]) for i in range(m)]
        q = 1
        for w in weights:
            q = lcm(q, w.denominator)
        self.Q = q
        self.w = [(w * q).numerator for w in weights]

    def to_int(self, radius_sq: Fraction) -> int:
        """Largest integer bound equivalent to ``length <= radius_sq``."""
        v = (Fraction(radius_sq) - self.base) * self.Q
        return v.numerator // v.denominator

    def to_rat(self, total: int) -> Fraction:
        return self.base + Fraction(total, self.Q)

    def run(self, radius_sq: Fraction, visit: Callable[[tuple, int], int | None]) -> None:
        """Depth-first search; ``visit(x, total)`` may return a new integer bound."""
        self.bound = self.to_int(radius_sq)
        if self.bound < 0 or self.m == 0:
            return
        self._visit = visit
        x = [0] * self.m
        self._dfs(self.m - 1, 0, x, True, True)

    def _dfs(self, i: int, partial: int, x: list, all_zero: bool, con_zero: bool) -> None:
        coef_i = self.coef[i]
        num = self.tnum[i]
        for j in range(i + 1, self.m):
            if x[j]:
                num -= coef_i[j] * x[j]
        den = self.den[i]
        w = self.w[i]
        rem = self.bound - partial
        if rem < 0:
            return
        s = isqrt(rem // w)
        lo = _ceil_div(num - s, den)
        hi = (num + s) // den
        if self.symmetric and all_zero and lo < 0:
            lo = 0
        if lo > hi:
            return
        ff = self.free_from
        constrained = ff is not None and i >= ff
        # zig-zag from the centre so the radius shrinks early
        for v in sorted(range(lo, hi + 1), key=lambda v: (abs(v * den - num), v)):
            self.nodes += 1
            if self.nodes > self.cap:
                raise BudgetExceeded(self.nodes, self.cap)
            diff = v * den - num
            cost = diff * diff * w
            if partial + cost > self.bound:
                break
            x[i] = v
            nz_con = con_zero and v == 0 if constrained else con_zero
            if i == ff and nz_con:
                continue
            if i == 0:
                nb = self._visit(tuple(x), partial + cost)
                if nb is not None:
                    self.bound = nb
            else:
                self._dfs(i - 1, partial + cost, x, all_zero and v == 0, nz_con)
        x[i] = 0


def shortest(mu, r, free_from: int = 0, budget: int | None = None,
             radius_sq: Fraction | None = None):
    """All minimal-length vectors subject to the ``free_from`` constraint.

    Returns ``(norm_sq, [x, ...])`` with ``x`` in block coordinates, one per
    +/- pair.  ``radius_sq`` defaults to the shortest admissible basis vector.
    """
    m = len(r)
    if radius_sq is None:
        radius_sq = min(_basis_norm_sq(mu, r, j) for j in range(free_from, m))
    en = Enumerator(mu, r, free_from=free_from, symmetric=True, budget=budget)
    best: list = []
    state = {"total": None}

    def visit(x, total):
        if state["total"] is None or total < state["total"]:
            state["total"] = total
            best.clear()
            best.append(x)
            return total
        if total == state["total"]:
            best.append(x)
        return None

    en.run(radius_sq, visit)
    if state["total"] is None:
        return None, []
    return en.to_rat(state["total"]), best


def closest(mu, r, tau, base, budget: int | None = None):
    """Exact CVP in GS coordinates; returns ``(dist_sq, x)``."""
    m = len(r)
    # Babai nearest plane gives the initial radius
    x = [0] * m
    total = Fraction(base)
    for i in range(m - 1, -1, -1):
        c = Fraction(tau[i]) - sum((mu[j][i] * x[j] for j in range(i + 1, m) if x[j]), Fraction(0))
        x[i] = round(c)
        total += r[i] * (x[i] - c) ** 2
    en = Enumerator(mu, r, tau=tau, base=base, free_from=None, symmetric=False, budget=budget)
    state = {"total": None, "x": tuple(x)}

    def visit(xv, t):
        if state["total"] is None or t < state["total"]:
            state["total"] = t
            state["x"] = xv
            return t
        return None

    en.run(total, visit)
    if state["total"] is None:  # pragma: no cover - Babai point always lies inside its own radius
        return total, tuple(x)
    return en.to_rat(state["total"]), state["x"]


def within(mu, r, radius_sq, budget: int | None = None):
    """All nonzero vectors (one per +/- pair) with length <= radius_sq."""
    en = Enumerator(mu, r, free_from=0, symmetric=True, budget=budget)
    out = []

    def visit(x, total):
        out.append((en.to_rat(total), x))
        return None

    en.run(radius_sq, visit)
    return out


def _basis_norm_sq(mu, r, j) -> Fraction:
    return r[j] + sum((mu[j][l] ** 2 * r[l] for l in range(j) if mu[j][l]), Fraction(0))
