"""Lattices, duals and brute-force enumeration oracles.

The oracles are exact: every comparison of lengths is made on exact squared
norms, and enumeration runs on an LLL-reduced (delta = 3/4) copy of the basis.
They are meant for desk-scale dimensions (roughly n <= 12).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from . import _enumeration as enum
from ._gso import GSState
from .errors import RankDeficient, ViolationFound
from .exactmat import (RatMatrix, as_rat, determinant, dot, gram, gso_from_gram,
                       inverse, pseudo_inverse)


class LatticeHandle:
    """A lattice given by a basis (columns) with lazily cached derived data.

    Bases may be ``m x d`` with ``d <= m`` independent columns; the lattice
    is then treated inside its own span.
    """

    def __init__(self, basis, budget: int | None = None):
        self.basis = basis if isinstance(basis, RatMatrix) else RatMatrix(basis)
        if self.basis.cols > self.basis.rows:
            raise RankDeficient("more basis vectors than ambient dimensions")
        self.budget = budget
        self.gso  # rank check

    @classmethod
    def from_columns(cls, cols, budget: int | None = None) -> "LatticeHandle":
        return cls(RatMatrix.from_columns(cols), budget=budget)

    def __repr__(self) -> str:
        return f"LatticeHandle({self.basis!r})"

    @property
    def dim(self) -> int:
        return self.basis.cols

    @property
    def ambient(self) -> int:
        return self.basis.rows

    @property
    def full_rank(self) -> bool:
        return self.basis.is_square

    @cached_property
    def gram(self) -> RatMatrix:
        return gram(self.basis)

    @cached_property
    def gso(self):
        return gso_from_gram(self.gram)

    @cached_property
    def dual(self) -> RatMatrix:
        return dual_basis(self)

    @cached_property
    def det_sq(self) -> Fraction:
        out = Fraction(1)
        for r in self.gso.gs_norm_sq:
            out *= r
        return out

    @cached_property
    def det(self) -> Fraction:
        """``|det B|``; only defined for full-rank square bases."""
        if not self.full_rank:
            raise ValueError("determinant of a non-full-rank lattice is not rational in general")
        return abs(determinant(self.basis))

    @cached_property
    def _reduced(self):
        st = GSState(self.gram)
        st.lll()
        return st.transform(), st.gram(), [row[:] for row in st.mu], st.r[:]

    def minima(self, budget: int | None = None) -> "SuccessiveMinima":
        """Cached successive minima (see :func:`successive_minima`)."""
        cache = self.__dict__.setdefault("_minima", None)
        if cache is None:
            cache = successive_minima(self, budget)
            self._minima = cache
        return cache

    def dual_handle(self) -> "LatticeHandle":
        return LatticeHandle(self.dual, budget=self.budget)

    def vector(self, coeffs: Sequence[int]) -> tuple:
        return self.basis.apply(coeffs)

    def scaled(self, alpha) -> "LatticeHandle":
        return LatticeHandle(self.basis * as_rat(alpha), budget=self.budget)


def as_handle(L) -> LatticeHandle:
    return L if isinstance(L, LatticeHandle) else LatticeHandle(L)


@dataclass(frozen=True)
class SuccessiveMinima:
    lambda_sq: tuple
    witnesses: tuple      # lattice vectors
    coefficients: tuple   # integer coordinates w.r.t. the input basis


@dataclass(frozen=True)
class TransferenceReport:
    n: int
    lambda_sq: tuple
    dual_lambda_sq: tuple
    products_sq: tuple    # lambda_i^2 * lambda*_{n-i+1}^2

    @property
    def ok(self) -> bool:
        return all(1 <= p <= self.n ** 2 for p in self.products_sq)


def dual_basis(L) -> RatMatrix:
    """``B^{-T}`` for full rank; ``B (B^T B)^{-1}`` inside the span otherwise."""
    L = as_handle(L)
    if L.full_rank:
        return inverse(L.basis).T
    return L.basis @ inverse(L.gram)


def _sign_normalise(c: Sequence[int]) -> tuple:
    for v in c:
        if v:
            return tuple(c) if v > 0 else tuple(-x for x in c)
    return tuple(c)


def _mat_vec_int(cols: Sequence[Sequence[int]], x: Sequence[int]) -> list[int]:
    out = [0] * len(cols[0])
    for c, xv in zip(cols, x):
        if xv:
            for i, v in enumerate(c):
                if v:
                    out[i] += xv * v
    return out


def saturating_transform(Y: Sequence[Sequence[int]], d: int) -> list[list[int]]:
    """Unimodular ``V`` (columns) whose first ``len(Y)`` columns span ``span_Q(Y) cap Z^d``.

    Integer row reduction of the columns ``Y``; each row operation is undone
    on ``V`` as a column operation so that ``V @ Y_reduced == Y`` throughout.
    """
    k = len(Y)
    Ycur = [list(map(int, y)) for y in Y]
    V = [[int(i == c) for i in range(d)] for c in range(d)]
    for c in range(k):
        col = Ycur[c]
        while True:
            nz = [i for i in range(c, d) if col[i]]
            if not nz:
                raise RankDeficient("witness vectors are dependent")
            if len(nz) == 1:
                break
            a = min(nz, key=lambda i: (abs(col[i]), i))
            for b in nz:
                if b == a:
                    continue
                q = col[b] // col[a]
                if q:
                    for y in Ycur:
                        y[b] -= q * y[a]
                    V[a] = [va + q * vb for va, vb in zip(V[a], V[b])]
        a = nz[0]
        if a != c:
            for y in Ycur:
                y[a], y[c] = y[c], y[a]
            V[a], V[c] = V[c], V[a]
    return V


def minima_from_gram(G: RatMatrix, budget: int | None = None, count: int | None = None):
    """Successive minima of the lattice with Gram matrix ``G``.

    Returns ``(lambda_sq, coeffs)``; coefficients are w.r.t. the basis behind
    ``G`` and sign-normalised (first nonzero entry positive).
    """
    d = G.rows
    count = d if count is None else count
    base = GSState(G)
    base.lll()
    U0 = base.U
    Gred = base.gram()
    lam: list[Fraction] = []
    found_red: list[list[int]] = []
    found: list[tuple] = []
    for k in range(count):
        st = GSState(Gred)
        if k:
            st.apply_block(0, saturating_transform(found_red, d))
            st.lll(0, k)
            st.lll(k, d)
        nsq, xs = enum.shortest(st.mu, st.r, free_from=k, budget=budget)
        cands = []
        for x in xs:
            y = _mat_vec_int(st.U, x)
            c = _sign_normalise(_mat_vec_int(U0, y))
            cands.append((c, y))
        c, y = min(cands)
        if c != _sign_normalise(_mat_vec_int(U0, y)):  # pragma: no cover
            raise AssertionError
        # keep y consistent with the sign of c
        if _mat_vec_int(U0, y) != list(c):
            y = [-v for v in y]
        lam.append(nsq)
        found_red.append(y)
        found.append(c)
    return tuple(lam), tuple(found)


def svp_from_gram(G: RatMatrix, budget: int | None = None):
    lam, coeffs = minima_from_gram(G, budget=budget, count=1)
    return lam[0], coeffs[0]


def shortest_vector(L, budget: int | None = None):
    """Exact shortest nonzero vector; ties go to the lexicographically smallest
    sign-normalised coefficient vector."""
    L = as_handle(L)
    nsq, c = svp_from_gram(L.gram, budget=_budget(L, budget))
    return L.vector(c), nsq


def successive_minima(L, budget: int | None = None) -> SuccessiveMinima:
    L = as_handle(L)
    lam, coeffs = minima_from_gram(L.gram, budget=_budget(L, budget))
    return SuccessiveMinima(lam, tuple(L.vector(c) for c in coeffs), coeffs)


def _budget(L: LatticeHandle, budget):
    return budget if budget is not None else L.budget


def closest_vector(L, t: Sequence, budget: int | None = None):
    """Exact closest lattice vector and squared distance.

    ``t`` may live in a larger ambient space than the basis; the basis is then
    embedded by zero padding.
    """
    L = as_handle(L)
    t = tuple(as_rat(v) for v in t)
    m = L.ambient
    if len(t) < m:
        raise ValueError("target has fewer coordinates than the lattice")
    U0, Gred, mu, r = L._reduced
    Bred = L.basis @ U0
    cols = Bred.columns()
    d = len(cols)
    proj = [Fraction(0)] * d  # <t, b~_i>
    tau = [Fraction(0)] * d
    for i in range(d):
        s = dot(t[:m], cols[i])
        for j in range(i):
            if mu[i][j]:
                s -= mu[i][j] * proj[j]
        proj[i] = s
        tau[i] = s / r[i]
    base = dot(t, t) - sum((tau[i] * proj[i] for i in range(d)), Fraction(0))
    dist_sq, x = enum.closest(mu, r, tau, base, budget=_budget(L, budget))
    v = Bred.apply(x)
    v = v + (Fraction(0),) * (len(t) - m)
    return v, dist_sq


def is_member(L, v: Sequence) -> bool:
    L = as_handle(L)
    v = tuple(as_rat(x) for x in v)
    if len(v) != L.ambient:
        return False
    x = pseudo_inverse(L.basis).apply(v)
    if any(c.denominator != 1 for c in x):
        return False
    return L.basis.apply(x) == v


def transference_check(L, budget: int | None = None) -> TransferenceReport:
    L = as_handle(L)
    n = L.dim
    lam = L.minima(budget).lambda_sq
    dlam = L.dual_handle().minima(budget).lambda_sq
    prods = tuple(lam[i] * dlam[n - 1 - i] for i in range(n))
    rep = TransferenceReport(n, lam, dlam, prods)
    for i, p in enumerate(prods):
        if not (1 <= p <= n * n):
            raise ViolationFound(f"transference violated at index {i}: product^2 = {p}", index=i)
    return rep


def same_lattice(B1: RatMatrix, B2: RatMatrix) -> bool:
    """Exact check that two bases generate the same lattice."""
    if B1.shape != B2.shape:
        return False
    P = pseudo_inverse(B1)
    W = P @ B2
    if B1 @ W != B2 or not W.is_integral():
        return False
    return abs(determinant(W)) == 1
