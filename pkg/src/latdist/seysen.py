"""Seysen's condition measures and the unipotent conditioning algorithm."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log2, sqrt

from .errors import NotUnipotent, ViolationFound
from .exactmat import (RatMatrix, dr_decompose, gram, inf_norm, inverse, is_unipotent)
from .lattice import LatticeHandle
from .reduce import ReducedBasis, eta_sq, pad_and_slide


@dataclass(frozen=True)
class SeysenReport:
    s_value: float          # S of the conditioned matrix, read as a basis
    s_prime_value: Fraction  # S' of A @ U
    transform: RatMatrix    # integer unipotent U
    matrix: RatMatrix       # A @ U
    s_prime_before: Fraction


def s_condition_sq(B: RatMatrix) -> Fraction:
    """Exact ``S(B)^2 = max_i |b_i|^2 |b*_i|^2`` (dual taken inside the span)."""
    G = gram(B)
    Gi = inverse(G)
    return max(G[i, i] * Gi[i, i] for i in range(G.rows))


def s_condition(B: RatMatrix) -> float:
    return sqrt(s_condition_sq(B))


def s_prime(A: RatMatrix) -> Fraction:
    return max(inf_norm(A), inf_norm(inverse(A)))


def _condition(A: list[list[Fraction]], lo: int, hi: int, U: list[list[int]]) -> None:
    """Condition the principal block ``[lo, hi)`` of ``A`` in place.

    ``A`` is updated to ``A @ U_block`` and ``U`` accumulates the transform.
    Only columns ``lo..hi-1`` are touched.
    """
    size = hi - lo
    if size <= 1:
        return
    mid = lo + (size + 1) // 2
    _condition(A, lo, mid, U)
    _condition(A, mid, hi, U)
    # X = -round(A1^-1 C) with A1 = A[lo:mid, lo:mid], C = A[lo:mid, mid:hi]
    # (C already includes the right factor U2 since A was updated in place)
    m = mid - lo
    A1 = RatMatrix([[A[lo + i][lo + j] for j in range(m)] for i in range(m)])
    A1inv = inverse(A1)
    C = RatMatrix([[A[lo + i][c] for c in range(mid, hi)] for i in range(m)])
    Y = A1inv @ C
    X = [[-round(Y[i, j]) for j in range(hi - mid)] for i in range(m)]
    n = len(A)
    # columns mid..hi of A and U gain (block columns lo..mid) @ X
    for jc in range(hi - mid):
        c = mid + jc
        for i in range(m):
            x = X[i][jc]
            if not x:
                continue
            src = lo + i
            for r in range(n):
                a = A[r][src]
                if a:
                    A[r][c] += x * a
                u = U[r][src]
                if u:
                    U[r][c] += x * u


def seysen_condition(A: RatMatrix) -> SeysenReport:
    """Recursive-bisection conditioner for an upper unipotent ``A``.

    Returns ``A @ U`` with ``U`` integral unipotent; every off-diagonal block
    is brought to within 1/2 of the previous level's scale by rounding.
    """
    if not is_unipotent(A):
        raise NotUnipotent("expected unit diagonal and zeros below it")
    n = A.rows
    rows = [list(A.row(i)) for i in range(n)]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    _condition(rows, 0, n, U)
    Um = RatMatrix(U)
    AU = RatMatrix(rows)
    if AU != A @ Um:  # pragma: no cover - internal consistency
        raise ViolationFound("conditioned matrix does not equal A @ U")
    return SeysenReport(s_condition(AU), s_prime(AU), Um, AU, s_prime(A))


def seysen_reduce_basis(B: RatMatrix) -> ReducedBasis:
    """Condition the ``R'`` factor of ``B`` and return ``B @ U``.

    Records the bound ``n * eta(B) * S'^2`` and raises ViolationFound if the
    output's Seysen measure exceeds it.
    """
    B = B if isinstance(B, RatMatrix) else RatMatrix(B)
    dr = dr_decompose(B)
    rep = seysen_condition(dr.r_prime)
    n = B.cols
    out = B @ rep.transform
    eta_in = sqrt(eta_sq(B))
    bound = n * eta_in * float(rep.s_prime_value) ** 2
    s_out = s_condition(out)
    if s_out > bound * (1 + 1e-9):
        raise ViolationFound(f"S(B) = {s_out} exceeds n*eta*S'^2 = {bound}")
    return ReducedBasis(out, rep.transform, "seysen",
                        dict(s_prime=rep.s_prime_value, eta=eta_in, s_bound=bound,
                             s_before=s_condition(B), s_after=s_out), B)


def default_block_size(n: int) -> int:
    return max(2, min(n, ceil(log2(n)))) if n > 1 else 2


def reduced_basis_pipeline(L, k: int | None = None, eps=None, budget=None) -> ReducedBasis:
    """Slide reduction (with padding) followed by Seysen conditioning."""
    B = L.basis if isinstance(L, LatticeHandle) else (L if isinstance(L, RatMatrix) else RatMatrix(L))
    n = B.cols
    k = default_block_size(n) if k is None else int(k)
    slid = pad_and_slide(B, k, eps=eps, budget=budget)
    sey = seysen_reduce_basis(slid.basis)
    U = slid.transform @ sey.transform
    p = dict(sey.params)
    p.update(k=k, eps=slid.params["eps"], s_before=s_condition(B))
    return ReducedBasis(sey.basis, U, "pipeline", p, B)


def random_unipotent(n: int, bound: int, rng: random.Random, max_den: int = 1) -> RatMatrix:
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if j < i:
                row.append(Fraction(0))
            elif j == i:
                row.append(Fraction(1))
            else:
                q = rng.randint(1, max_den)
                row.append(Fraction(rng.randint(-bound * q, bound * q), q))
        rows.append(row)
    return RatMatrix(rows)


def seysen_zeta_table(dims, trials: int, seed: int, bound: int = 100, max_den: int = 10):
    """Worst observed ``S'(A U)`` per dimension over random unipotent ``A``."""
    rng = random.Random(seed)
    table = []
    for n in dims:
        worst = Fraction(0)
        for _ in range(trials):
            rep = seysen_condition(random_unipotent(n, bound, rng, max_den))
            worst = max(worst, rep.s_prime_value)
        table.append({"n": n, "trials": trials, "worst_s_prime": worst,
                      # S' <= n^(c log n)  <=>  c >= log2 S' / (log2 n)^2
                      "c_estimate": log2(float(worst)) / log2(n) ** 2 if n > 1 else 0.0})
    return table
