"""Shared fixtures and independent brute-force oracles for the test suite.

The oracles avoid the package's own enumeration: a textbook LLL shrinks the
basis, then the coefficient box implied by the pseudo-inverse is scanned in full.
"""
import math
import random
from fractions import Fraction

import numpy as np
import pytest
import sympy

from latdist.exactmat import RatMatrix

ACCEPTANCE_LINES = []


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- helpers -----------------------------------------------------------------

def rand_int_matrix(rng: random.Random, n: int, bound: int, rows: int | None = None) -> RatMatrix:
    rows = n if rows is None else rows
    while True:
        M = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(rows)]
        if sympy.Matrix(M).rank() == n:
            return RatMatrix(M)


def to_sympy(B: RatMatrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row]
                         for row in B.tolist()])


def norm_sq(v) -> Fraction:
    return sum((Fraction(x) * Fraction(x) for x in v), Fraction(0))


def textbook_lll(cols, delta=Fraction(3, 4)):
    """Plain LLL on column vectors (recomputes Gram-Schmidt each step)."""
    b = [[Fraction(x) for x in c] for c in cols]
    k = 1
    while k < len(b):
        gs, mu = plain_gs(b)
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                gs, mu = plain_gs(b)
        if norm_sq(gs[k]) >= (delta - mu[k][k - 1] ** 2) * norm_sq(gs[k - 1]):
            k += 1
        else:
            b[k - 1], b[k] = b[k], b[k - 1]
            k = max(k - 1, 1)
    return b


def _int_gram(cols):
    G = [[sum((x * y for x, y in zip(a, c)), Fraction(0)) for c in cols] for a in cols]
    den = math.lcm(*(g.denominator for row in G for g in row))
    return np.array([[int(g * den) for g in row] for row in G], dtype=object), den


def _box_points(widths, centre=None):
    centre = centre or [0] * len(widths)
    axes = [np.arange(c - w, c + w + 1, dtype=np.int64) for c, w in zip(centre, widths)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, len(widths))


def _widths(cols, radius: float, slack: int = 0):
    P = np.linalg.pinv(np.array([[float(x) for x in c] for c in cols]).T)
    return [int(math.floor(np.linalg.norm(P[i]) * radius * (1 + 1e-9) + 1e-9)) + slack
            for i in range(len(cols))]


def _quad(X, Gi):
    X = X.astype(object)
    return np.einsum("ki,ij,kj->k", X, Gi, X)


def brute_vectors(B: RatMatrix, radius_sq: Fraction):
    """All nonzero lattice vectors (as (norm_sq, coeffs in the LLL basis)) within radius."""
    cols = textbook_lll(B.columns())
    Gi, den = _int_gram(cols)
    X = _box_points(_widths(cols, math.sqrt(radius_sq)))
    q = _quad(X, Gi)
    keep = [i for i in range(len(X)) if 0 < q[i] <= radius_sq * den]
    return [(Fraction(int(q[i]), den), tuple(int(v) for v in X[i])) for i in keep], cols


def brute_lambda1_sq(B: RatMatrix) -> Fraction:
    cols = textbook_lll(B.columns())
    r = norm_sq(cols[0])
    vecs, _ = brute_vectors(B, r)
    return min(q for q, _ in vecs)


def brute_minima_sq(B: RatMatrix) -> list[Fraction]:
    cols = textbook_lll(B.columns())
    r = max(norm_sq(c) for c in cols)
    vecs, _ = brute_vectors(B, r)
    vecs.sort()
    kept, lam = [], []
    for q, x in vecs:
        if np.linalg.matrix_rank(np.array(kept + [x], dtype=float)) > len(kept):
            kept.append(x)
            lam.append(q)
            if len(kept) == B.cols:
                break
    return lam


def brute_dist_sq(B: RatMatrix, t) -> Fraction:
    t = [Fraction(v) for v in t]
    cols = textbook_lll(B.columns())
    cols = [list(c) + [Fraction(0)] * (len(t) - len(c)) for c in cols]
    Bf = np.array([[float(x) for x in c] for c in cols]).T
    x0 = np.linalg.lstsq(Bf, np.array([float(v) for v in t]), rcond=None)[0]
    start = [int(round(v)) for v in x0]
    guess = norm_sq([tv - sum(c[k] * s for c, s in zip(cols, start)) for k, tv in enumerate(t)])
    X = _box_points(_widths(cols, math.sqrt(guess), slack=1), start).astype(object)
    Gi, den = _int_gram(cols)
    # |t - Bx|^2 = |t|^2 - 2 x.(B^T t) + x^T G x, everything scaled by a common denominator
    bt = [sum((a * b for a, b in zip(c, t)), Fraction(0)) for c in cols]
    den2 = math.lcm(den, norm_sq(t).denominator, *(v.denominator for v in bt))
    Gs = Gi * (den2 // den)
    bts = np.array([int(v * den2) for v in bt], dtype=object)
    q = int(norm_sq(t) * den2) - 2 * X.dot(bts) + np.einsum("ki,ij,kj->k", X, Gs, X)
    return min(guess, Fraction(int(q.min()), den2))


@pytest.fixture
def rng():
    return random.Random(12345)


# -- independent reduction checkers -------------------------------------------

def plain_gs(cols):
    """Textbook Gram-Schmidt on a list of column vectors; returns (gs, mu)."""
    gs, mu = [], []
    for i, b in enumerate(cols):
        b = [Fraction(x) for x in b]
        row = []
        v = list(b)
        for j in range(i):
            m = sum((x * y for x, y in zip(b, gs[j])), Fraction(0)) / norm_sq(gs[j])
            row.append(m)
            v = [a - m * c for a, c in zip(v, gs[j])]
        gs.append(v)
        mu.append(row)
    return gs, mu


def projected_block(B: RatMatrix, s: int, e: int) -> RatMatrix:
    """Projections of b_s..b_{e-1} orthogonally to b_0..b_{s-1}."""
    cols = B.columns()
    gs, _ = plain_gs(cols)
    out = []
    for b in cols[s:e]:
        v = [Fraction(x) for x in b]
        for j in range(s):
            m = sum((x * y for x, y in zip(b, gs[j])), Fraction(0)) / norm_sq(gs[j])
            v = [a - m * c for a, c in zip(v, gs[j])]
        out.append(v)
    return RatMatrix.from_columns(out)


def span_dual(P: RatMatrix) -> RatMatrix:
    Ps = to_sympy(P)
    D = Ps * (Ps.T * Ps).inv()
    return RatMatrix([[Fraction(int(x.p), int(x.q)) for x in D.row(i)] for i in range(D.rows)])


def indep_size_reduced(B) -> bool:
    _, mu = plain_gs(B.columns())
    return all(abs(m) <= Fraction(1, 2) for row in mu for m in row)


def indep_lll(B, delta=Fraction(3, 4)) -> bool:
    gs, mu = plain_gs(B.columns())
    r = [norm_sq(v) for v in gs]
    if not indep_size_reduced(B):
        return False
    return all(delta * r[i - 1] <= r[i] + mu[i][i - 1] ** 2 * r[i - 1] for i in range(1, len(r)))


def indep_hkz_block(B, s, e) -> bool:
    gs, _ = plain_gs(B.columns())
    for i in range(s, e):
        P = projected_block(B, i, e)
        if norm_sq(gs[i]) != brute_lambda1_sq(P):
            return False
    return True


def indep_dsvp_block(B, s, e, eps) -> bool:
    gs, _ = plain_gs(B.columns())
    D = span_dual(projected_block(B, s, e))
    return 1 / norm_sq(gs[e - 1]) <= (1 + eps) ** 2 * brute_lambda1_sq(D)


def indep_unimodular(U: RatMatrix) -> bool:
    M = to_sympy(U)
    return all(x.is_integer for x in M) and abs(M.det()) == 1
