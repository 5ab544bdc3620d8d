"""Mutable Gram-Schmidt state driven by unimodular column operations.

Reductions never touch the basis vectors themselves: they act on the Gram
matrix ``G = B^T B`` and record the integer transform ``U`` so that the
reduced basis is ``B @ U``.  ``mu``/``r`` are kept exact; LLL uses the
classical incremental update formulas, anything else calls :meth:`refresh`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import RankDeficient
from .exactmat import RatMatrix

HALF = Fraction(1, 2)


class GSState:
    def __init__(self, G: RatMatrix):
        n = G.rows
        self.n = n
        self.G = [list(G.row(i)) for i in range(n)]
        # U[c] is column c of the transform
        self.U = [[int(i == c) for i in range(n)] for c in range(n)]
        self.refresh()

    # -- bookkeeping -------------------------------------------------------
    def refresh(self) -> None:
        n, G = self.n, self.G
        mu = [[Fraction(0)] * n for _ in range(n)]
        r = [Fraction(0)] * n
        for i in range(n):
            gi, mi = G[i], mu[i]
            for j in range(i):
                s = gi[j]
                mj = mu[j]
                for k in range(j):
                    if mj[k] and mi[k]:
                        s -= mj[k] * mi[k] * r[k]
                mi[j] = s / r[j]
            s = gi[i]
            for k in range(i):
                if mi[k]:
                    s -= mi[k] * mi[k] * r[k]
            if s <= 0:
                raise RankDeficient(f"vector {i} is dependent on the previous ones")
            r[i] = s
            mi[i] = Fraction(1)
        self.mu, self.r = mu, r

    def transform(self) -> RatMatrix:
        return RatMatrix.from_columns(self.U)

    def gram(self) -> RatMatrix:
        return RatMatrix(self.G)

    def block_mu(self, s: int, e: int) -> list[list[Fraction]]:
        return [[self.mu[s + a][s + b] for b in range(e - s)] for a in range(e - s)]

    def block_r(self, s: int, e: int) -> list[Fraction]:
        return self.r[s:e]

    def projected_gram(self, s: int, e: int) -> list[list[Fraction]]:
        mu, r = self.mu, self.r
        m = e - s
        out = [[Fraction(0)] * m for _ in range(m)]
        for a in range(m):
            for b in range(a, m):
                ia, ib = s + a, s + b
                acc = Fraction(0)
                for l in range(s, ia + 1):
                    x, y = mu[ia][l], mu[ib][l]
                    if x and y:
                        acc += x * y * r[l]
                out[a][b] = out[b][a] = acc
        return out

    # -- elementary operations --------------------------------------------
    def sub(self, k: int, j: int, q: int) -> None:
        """``b_k <- b_k - q b_j``."""
        if not q:
            return
        n, G = self.n, self.G
        gkk = G[k][k] - 2 * q * G[j][k] + q * q * G[j][j]
        gj = G[j]
        for l in range(n):
            if l != k:
                G[k][l] -= q * gj[l]
                G[l][k] = G[k][l]
        G[k][k] = gkk
        uk, uj = self.U[k], self.U[j]
        for i in range(n):
            if uj[i]:
                uk[i] -= q * uj[i]
        mk, mj = self.mu[k], self.mu[j]
        for l in range(j):
            if mj[l]:
                mk[l] -= q * mj[l]
        mk[j] -= q

    def size_reduce_vector(self, k: int, start: int = 0) -> bool:
        changed = False
        for j in range(k - 1, start - 1, -1):
            m = self.mu[k][j]
            if abs(m) > HALF:
                self.sub(k, j, round(m))
                changed = True
        return changed

    def size_reduce(self, start: int = 0, stop: int | None = None) -> bool:
        stop = self.n if stop is None else stop
        changed = False
        for k in range(start + 1, stop):
            changed |= self.size_reduce_vector(k, start)
        return changed

    def swap(self, k: int) -> None:
        """Exchange ``b_{k-1}`` and ``b_k`` with incremental GS update."""
        n, G, mu, r = self.n, self.G, self.mu, self.r
        G[k - 1], G[k] = G[k], G[k - 1]
        for row in G:
            row[k - 1], row[k] = row[k], row[k - 1]
        self.U[k - 1], self.U[k] = self.U[k], self.U[k - 1]

        m = mu[k][k - 1]
        big_b = r[k] + m * m * r[k - 1]
        m_new = m * r[k - 1] / big_b
        r[k] = r[k - 1] * r[k] / big_b
        r[k - 1] = big_b
        for l in range(k - 1):
            mu[k - 1][l], mu[k][l] = mu[k][l], mu[k - 1][l]
        mu[k][k - 1] = m_new
        for i in range(k + 1, n):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + m_new * mu[i][k]

    def lll(self, start: int = 0, stop: int | None = None, delta: Fraction = Fraction(3, 4)) -> bool:
        """LLL on the projected block ``[start, stop)``; True if any swap happened."""
        stop = self.n if stop is None else stop
        swapped = False
        k = start + 1
        while k < stop:
            m = self.mu[k][k - 1]
            if abs(m) > HALF:
                self.sub(k, k - 1, round(m))
            m = self.mu[k][k - 1]
            if self.r[k] < (delta - m * m) * self.r[k - 1]:
                self.swap(k)
                swapped = True
                k = max(k - 1, start + 1)
            else:
                self.size_reduce_vector(k, start)
                k += 1
        return swapped

    def apply_block(self, s: int, V: Sequence[Sequence[int]]) -> None:
        """Replace columns ``s..s+m-1`` by ``old_block @ V`` (``V`` given as columns)."""
        m = len(V)
        G, U = self.G, self.U
        old_u = [U[s + a][:] for a in range(m)]
        for c in range(m):
            col = V[c]
            nu = [0] * self.n
            for a in range(m):
                if col[a]:
                    ua = old_u[a]
                    for i in range(self.n):
                        if ua[i]:
                            nu[i] += col[a] * ua[i]
            U[s + c] = nu
        # G' = W^T G W with W the identity except on the block
        n = self.n
        rows = [G[s + a][:] for a in range(m)]
        new_rows = []
        for c in range(m):
            col = V[c]
            acc = [Fraction(0)] * n
            for a in range(m):
                if col[a]:
                    ra = rows[a]
                    for l in range(n):
                        if ra[l]:
                            acc[l] += col[a] * ra[l]
            new_rows.append(acc)
        inner = [[sum((V[c][a] * new_rows[d][s + a] for a in range(m) if V[c][a]), Fraction(0))
                  for d in range(m)] for c in range(m)]
        for c in range(m):
            G[s + c] = new_rows[c]
            for l in range(n):
                G[l][s + c] = new_rows[c][l]
        for c in range(m):
            for d in range(m):
                G[s + c][s + d] = inner[c][d]
        self.refresh()


def complete_to_unimodular(x: Sequence[int], position: int = 0) -> list[list[int]]:
    """Unimodular matrix (as a list of columns) whose column ``position`` is ``x``.

    ``x`` must be primitive.  Built from elementary integer operations that
    reduce ``x`` to a unit vector; their inverses accumulate into the result.
    """
    m = len(x)
    y = [int(v) for v in x]
    V = [[int(i == c) for i in range(m)] for c in range(m)]  # columns
    while True:
        nz = [i for i in range(m) if y[i]]
        if not nz:
            raise ValueError("zero vector cannot be completed")
        if len(nz) == 1:
            break
        a = min(nz, key=lambda i: (abs(y[i]), i))
        for b in nz:
            if b == a:
                continue
            q = y[b] // y[a]
            if q:
                y[b] -= q * y[a]
                # keep V y == x: column a absorbs +q * column b
                V[a] = [va + q * vb for va, vb in zip(V[a], V[b])]
    a = nz[0]
    if abs(y[a]) != 1:
        raise ValueError("vector is not primitive")
    if y[a] < 0:
        y[a] = 1
        V[a] = [-v for v in V[a]]
    # now V e_a == x; move that column to ``position``
    cols = [V[a]] + [V[c] for c in range(m) if c != a]
    if position:
        first = cols.pop(0)
        cols.insert(position, first)
    return cols


def int_inverse_transpose(cols: Sequence[Sequence[int]]) -> list[list[int]]:
    """Columns of ``V^{-T}`` for a unimodular ``V`` given by columns."""
    from .exactmat import inverse

    V = RatMatrix.from_columns(cols)
    inv_t = inverse(V).T
    return [[int(v) for v in c] for c in inv_t.columns()]
