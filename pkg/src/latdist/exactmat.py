"""Exact rational dense linear algebra.

Bases are stored column-wise: column ``j`` of a :class:`RatMatrix` is the
basis vector ``b_j``.  Everything structural (Gram-Schmidt, inverses,
determinants) is exact over :class:`fractions.Fraction`; only operator norms
and condition numbers drop to floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

from .errors import RankDeficient, Singular

Rat = Fraction


def as_rat(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings.  Floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not matrix entries")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class RatMatrix:
    """Immutable dense matrix of Fractions (row-major storage)."""

    __slots__ = ("_rows", "_shape", "__dict__")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(as_rat(x) for x in row) for row in rows)
        ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged matrix")
        self._rows = data
        self._shape = (len(data), ncols)

    @classmethod
    def _raw(cls, rows: tuple) -> "RatMatrix":
        m = object.__new__(cls)
        m._rows = rows
        m._shape = (len(rows), len(rows[0]) if rows else 0)
        return m

    @classmethod
    def from_columns(cls, cols: Iterable[Iterable]) -> "RatMatrix":
        cols = [tuple(as_rat(x) for x in c) for c in cols]
        if not cols:
            raise ValueError("need at least one column")
        return cls._raw(tuple(zip(*cols)))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, values: Sequence) -> "RatMatrix":
        vals = [as_rat(v) for v in values]
        n = len(vals)
        zero = Fraction(0)
        return cls._raw(tuple(tuple(vals[i] if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        zero = Fraction(0)
        return cls._raw(tuple((zero,) * cols for _ in range(rows)))

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def rows(self) -> int:
        return self._shape[0]

    @property
    def cols(self) -> int:
        return self._shape[1]

    @property
    def is_square(self) -> bool:
        return self._shape[0] == self._shape[1]

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def col(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple]:
        return [tuple(c) for c in zip(*self._rows)]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self._rows]

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self._rows], dtype=float)

    @cached_property
    def T(self) -> "RatMatrix":
        return RatMatrix._raw(tuple(zip(*self._rows)))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if not isinstance(other, RatMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = list(zip(*other._rows))
        return RatMatrix._raw(tuple(
            tuple(sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in ocols)
            for r in self._rows))

    def apply(self, v: Sequence) -> tuple:
        """Matrix-vector product with an exact vector."""
        v = [as_rat(x) for x in v]
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self._rows)

    def __mul__(self, s) -> "RatMatrix":
        s = as_rat(s)
        return RatMatrix._raw(tuple(tuple(x * s for x in r) for r in self._rows))

    __rmul__ = __mul__

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix._raw(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return RatMatrix._raw(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix._raw(tuple(tuple(-x for x in r) for r in self._rows))

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"RatMatrix([{body}])"

    def select_columns(self, idx: Sequence[int]) -> "RatMatrix":
        return RatMatrix._raw(tuple(tuple(r[j] for j in idx) for r in self._rows))

    def hstack(self, other: "RatMatrix") -> "RatMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch")
        return RatMatrix._raw(tuple(a + b for a, b in zip(self._rows, other._rows)))

    def pad_rows(self, extra: int) -> "RatMatrix":
        """Append ``extra`` zero rows (embed columns into a larger ambient space)."""
        zero = Fraction(0)
        return RatMatrix._raw(self._rows + tuple((zero,) * self.cols for _ in range(extra)))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self._rows for x in r)


def gram(B: RatMatrix) -> RatMatrix:
    """Exact Gram matrix ``B^T B`` of the columns."""
    cols = B.columns()
    n = len(cols)
    g = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        ci = cols[i]
        for j in range(i, n):
            s = sum((a * b for a, b in zip(ci, cols[j]) if a and b), Fraction(0))
            g[i][j] = g[j][i] = s
    return RatMatrix._raw(tuple(tuple(r) for r in g))


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v) if a and b), Fraction(0))


@dataclass(frozen=True)
class GramSchmidtData:
    """Exact GSO: ``mu[i][j]`` for ``j < i`` and squared norms of the b~_i."""

    mu: tuple
    gs_norm_sq: tuple
    n: int

    def projected_gram(self, start: int, stop: int | None = None) -> RatMatrix:
        """Gram matrix of ``pi_start(b_start), ..., pi_start(b_{stop-1})``."""
        stop = self.n if stop is None else stop
        mu, r = self.mu, self.gs_norm_sq
        idx = range(start, stop)
        g = []
        for a in idx:
            row = []
            for b in idx:
                lo = min(a, b)
                s = Fraction(0)
                for l in range(start, lo + 1):
                    ma = Fraction(1) if l == a else mu[a][l]
                    mb = Fraction(1) if l == b else mu[b][l]
                    if ma and mb:
                        s += ma * mb * r[l]
                row.append(s)
            g.append(tuple(row))
        return RatMatrix._raw(tuple(g))


def gso_from_gram(G: RatMatrix) -> GramSchmidtData:
    """LDL^T factorisation of a Gram matrix; raises RankDeficient on a zero pivot."""
    n = G.rows
    mu = [[Fraction(0)] * n for _ in range(n)]
    r = [Fraction(0)] * n
    for i in range(n):
        gi = G.row(i)
        for j in range(i):
            s = gi[j]
            mi, mj = mu[i], mu[j]
            for k in range(j):
                if mj[k] and mi[k]:
                    s -= mj[k] * mi[k] * r[k]
            mu[i][j] = s / r[j]
        s = gi[i]
        mi = mu[i]
        for k in range(i):
            if mi[k]:
                s -= mi[k] * mi[k] * r[k]
        if s <= 0:
            raise RankDeficient(f"basis vector {i} lies in the span of the previous ones")
        r[i] = s
        mu[i][i] = Fraction(1)
    return GramSchmidtData(tuple(tuple(m) for m in mu), tuple(r), n)


def gram_schmidt(B: RatMatrix) -> GramSchmidtData:
    """Exact Gram-Schmidt data of the columns of ``B``.

    ``mu[i][i]`` is stored as 1 for convenience; entries above the diagonal
    are zero.  Works for any ``m x d`` basis with independent columns.
    """
    return gso_from_gram(gram(B))


def gs_vectors(B: RatMatrix, gs: GramSchmidtData | None = None) -> list[tuple]:
    """The orthogonal vectors b~_i themselves (exact)."""
    gs = gs or gram_schmidt(B)
    cols = B.columns()
    out: list[tuple] = []
    for i, b in enumerate(cols):
        v = list(b)
        for j in range(i):
            m = gs.mu[i][j]
            if m:
                v = [x - m * y for x, y in zip(v, out[j])]
        out.append(tuple(v))
    return out


@dataclass(frozen=True)
class DRPrime:
    d_sq: tuple
    r_prime: RatMatrix


def dr_decompose(B: RatMatrix) -> DRPrime:
    """``R = D R'`` factor of the QR decomposition, kept in Q via ``D^2``."""
    gs = gram_schmidt(B)
    n = gs.n
    rp = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rp[i][i] = Fraction(1)
        for j in range(i + 1, n):
            rp[i][j] = gs.mu[j][i]
    return DRPrime(gs.gs_norm_sq, RatMatrix(rp))


def _eliminate(B: RatMatrix):
    """Gauss-Jordan on ``[B | I]``; returns (determinant, inverse or None)."""
    n = B.rows
    if not B.is_square:
        raise ValueError("square matrix required")
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(B.tolist())]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0), None
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        piv = a[c][c]
        det *= piv
        inv = 1 / piv
        rowc = [x * inv for x in a[c]]
        a[c] = rowc
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                ai = a[i]
                a[i] = [x - f * y if y else x for x, y in zip(ai, rowc)]
    return det, RatMatrix._raw(tuple(tuple(r[n:]) for r in a))


def determinant(B: RatMatrix) -> Fraction:
    if not B.is_square:
        raise ValueError("square matrix required")
    n = B.rows
    if B.is_integral():
        return Fraction(_bareiss([[int(x) for x in r] for r in B.tolist()]))
    a = B.tolist()
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        piv = a[c][c]
        det *= piv
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / piv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def _bareiss(a: list[list[int]]) -> int:
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1] if n else 1


def inverse(B: RatMatrix) -> RatMatrix:
    det, inv = _eliminate(B)
    if inv is None:
        raise Singular("matrix is singular")
    return inv


def solve(B: RatMatrix, v: Sequence) -> tuple | None:
    """Exact coordinates ``x`` with ``B x = v``, or None if ``v`` is outside the column span.

    ``B`` may be rectangular with independent columns.
    """
    v = tuple(as_rat(x) for x in v)
    if B.is_square:
        return inverse(B).apply(v)
    G = gram(B)
    rhs = B.T.apply(v)
    x = inverse(G).apply(rhs)
    if B.apply(x) != v:
        return None
    return x


def pseudo_inverse(B: RatMatrix) -> RatMatrix:
    """``(B^T B)^{-1} B^T`` -- the exact left inverse of a full-column-rank basis."""
    if B.is_square:
        return inverse(B)
    return inverse(gram(B)) @ B.T


def is_unimodular(U: RatMatrix) -> bool:
    if not U.is_square or not U.is_integral():
        return False
    return abs(determinant(U)) == 1


def is_unipotent(A: RatMatrix, integral: bool = False) -> bool:
    if not A.is_square:
        return False
    n = A.rows
    for i in range(n):
        if A[i, i] != 1:
            return False
        for j in range(i):
            if A[i, j] != 0:
                return False
    return A.is_integral() if integral else True


def inf_norm(B: RatMatrix) -> Fraction:
    return max(abs(x) for r in B.tolist() for x in r)


def _lambda_max(sym: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(sym)[-1])


def _is_scalar(G: RatMatrix) -> bool:
    n = G.rows
    d = G[0, 0]
    return all(G[i, j] == (d if i == j else 0) for i in range(n) for j in range(n))


def operator_norm(T: RatMatrix) -> float:
    """Largest singular value: exact ``T^T T`` then a float symmetric eigensolve."""
    G = gram(T)
    if _is_scalar(G):
        return float(np.sqrt(float(G[0, 0])))
    return float(np.sqrt(max(_lambda_max(G.to_float()), 0.0)))


def condition_number(T: RatMatrix) -> float:
    """``||T|| * ||T^-1||``.

    The smallest singular value is taken as ``1/||T^-1||`` with ``T^-1`` exact,
    so both factors come from well-conditioned top eigenvalues.
    """
    if not T.is_square:
        raise ValueError("square matrix required")
    inv = inverse(T)
    if _is_scalar(gram(T)):
        return 1.0
    return operator_norm(T) * operator_norm(inv)


def integer_matrix(U: RatMatrix) -> list[list[int]]:
    if not U.is_integral():
        raise ValueError("matrix has non-integer entries")
    return [[int(x) for x in r] for r in U.tolist()]


def content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
