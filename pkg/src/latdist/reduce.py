"""Basis reduction: size reduction, LLL, HKZ, DSVP, slide reduction and padding.

Every routine works on the Gram matrix of the input basis and records an
integer transform ``U``; the returned basis is always ``B_in @ U`` and the
checker re-derives everything from ``B_out`` alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, sqrt

from ._gso import GSState, complete_to_unimodular, int_inverse_transpose
from .errors import NonDividing, RankDeficient, ReductionFailure
from .exactmat import (RatMatrix, as_rat, gram, gram_schmidt, inverse, is_unimodular,
                       is_unipotent)
from .lattice import svp_from_gram

HALF = Fraction(1, 2)
DEFAULT_DELTA = Fraction(3, 4)


@dataclass(frozen=True)
class SlideParams:
    k: int
    eps: Fraction | None = None  # None means 1/n

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise ValueError("block size k must be an integer >= 2")
        if self.eps is not None:
            e = as_rat(self.eps)
            if e <= 0:
                raise ValueError("eps must be positive")
            object.__setattr__(self, "eps", e)

    def eps_for(self, n: int) -> Fraction:
        return self.eps if self.eps is not None else Fraction(1, n)


@dataclass(frozen=True)
class ReducedBasis:
    basis: RatMatrix
    transform: RatMatrix
    kind: str
    params: dict = field(default_factory=dict)
    source: RatMatrix | None = None

    @property
    def n(self) -> int:
        return self.basis.cols


def _mat(B) -> RatMatrix:
    return B if isinstance(B, RatMatrix) else RatMatrix(B)


def _state(B: RatMatrix) -> GSState:
    if B.cols > B.rows:
        raise RankDeficient("more vectors than ambient dimensions")
    return GSState(gram(B))


def _result(B: RatMatrix, st: GSState, kind: str, **params) -> ReducedBasis:
    U = st.transform()
    return ReducedBasis(B @ U, U, kind, params, B)


# -- primitive steps on a GSState -------------------------------------------

def _hkz_block(st: GSState, s: int, e: int, budget=None) -> None:
    """HKZ-reduce the projected block ``[s, e)``.

    A new vector is only inserted when strictly shorter than the current
    ``b~_a``, so an already HKZ-reduced block is left untouched.
    """
    for a in range(s, e - 1):
        st.lll(a, e)
        P = RatMatrix(st.projected_gram(a, e))
        nsq, c = svp_from_gram(P, budget=budget)
        if nsq < st.r[a]:
            st.apply_block(a, complete_to_unimodular(c, 0))


def _dsvp_violated(st: GSState, s: int, e: int, eps: Fraction, budget=None):
    P = RatMatrix(st.projected_gram(s, e))
    dual_nsq, y = svp_from_gram(inverse(P), budget=budget)
    last = 1 / st.r[e - 1]  # squared length of the last dual GS vector
    return last > (1 + eps) ** 2 * dual_nsq, y


def _dsvp_block(st: GSState, s: int, e: int, eps: Fraction, budget=None) -> bool:
    bad, y = _dsvp_violated(st, s, e, eps, budget)
    if not bad:
        return False
    W = complete_to_unimodular(y, e - s - 1)  # dual transform, y as last column
    st.apply_block(s, int_inverse_transpose(W))
    return True


def _slide_loop(st: GSState, n: int, k: int, eps: Fraction, budget=None,
                max_passes: int | None = None) -> int:
    p = n // k
    max_passes = max_passes or 1000 + 100 * n * n
    for it in range(max_passes):
        before = [u[:] for u in st.U]
        st.lll()
        for i in range(p):
            _hkz_block(st, i * k, i * k + k, budget)
        st.size_reduce()
        for i in range(p - 1):
            _dsvp_block(st, i * k + 1, i * k + k + 1, eps, budget)
        if st.U == before:
            return it + 1
    raise ReductionFailure(f"slide reduction did not settle within {max_passes} passes")


# -- public reductions --------------------------------------------------------

def size_reduce(B) -> ReducedBasis:
    B = _mat(B)
    st = _state(B)
    st.size_reduce()
    return _result(B, st, "size")


def lll(B, delta=DEFAULT_DELTA) -> ReducedBasis:
    B = _mat(B)
    delta = as_rat(delta)
    if not (Fraction(1, 4) < delta < 1):
        raise ValueError("delta must lie in (1/4, 1)")
    st = _state(B)
    st.lll(delta=delta)
    st.size_reduce()
    return _result(B, st, "lll", delta=delta)


def hkz(B, budget=None) -> ReducedBasis:
    B = _mat(B)
    st = _state(B)
    _hkz_block(st, 0, st.n, budget)
    st.size_reduce()
    return _result(B, st, "hkz")


def dsvp_reduce(B, eps, budget=None) -> ReducedBasis:
    B = _mat(B)
    eps = as_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    st = _state(B)
    _dsvp_block(st, 0, st.n, eps, budget)
    return _result(B, st, "dsvp", eps=eps)


def slide_reduce(B, params: SlideParams | int, budget=None) -> ReducedBasis:
    B = _mat(B)
    if not isinstance(params, SlideParams):
        params = SlideParams(int(params))
    n, k = B.cols, params.k
    if n % k:
        raise NonDividing(f"block size {k} does not divide n = {n}; use pad_and_slide")
    eps = params.eps_for(n)
    st = _state(B)
    passes = _slide_loop(st, n, k, eps, budget)
    return _result(B, st, "slide", k=k, eps=eps, passes=passes)


def padding_radius_sq(B: RatMatrix) -> Fraction:
    n = B.cols
    return Fraction(4) ** (n * n) * max(gram(B)[i, i] for i in range(n))


def pad_and_slide(B, k: int, eps=None, budget=None) -> ReducedBasis:
    """Slide reduction for any ``n``: pad with huge orthogonal vectors to a
    multiple of ``k``, reduce, and keep the first ``n`` output vectors."""
    B = _mat(B)
    n = B.cols
    params = SlideParams(int(k), eps)
    eps = params.eps_for(n)
    n2 = ceil(n / k) * k
    if n2 == n:
        out = slide_reduce(B, SlideParams(k, eps), budget)
        return ReducedBasis(out.basis, out.transform, "padded-slide",
                            dict(out.params, padded_n=n), B)
    if B.cols > B.rows:
        raise RankDeficient("more vectors than ambient dimensions")
    G = gram(B)
    r_sq = padding_radius_sq(B)
    rows = [list(G.row(i)) + [Fraction(0)] * (n2 - n) for i in range(n)]
    for j in range(n, n2):
        rows.append([r_sq if c == j else Fraction(0) for c in range(n2)])
    st = GSState(RatMatrix(rows))
    passes = _slide_loop(st, n2, k, eps, budget)
    cols = st.U[:n]
    if any(c[i] for c in cols for i in range(n, n2)):
        raise ReductionFailure("padding vectors leaked into the first n output vectors")
    U = RatMatrix.from_columns([c[:n] for c in cols])
    if not is_unimodular(U):
        raise ReductionFailure("truncated transform is not unimodular")
    return ReducedBasis(B @ U, U, "padded-slide",
                        dict(k=k, eps=eps, passes=passes, padded_n=n2), B)


# -- measurements and certificates -------------------------------------------

def eta_sq(B) -> Fraction:
    """Exact ``eta(B)^2 = max_{i<=j} |b~_i|^2 / |b~_j|^2``."""
    r = gram_schmidt(_mat(B)).gs_norm_sq
    best = Fraction(1)
    tail_min = None
    for i in range(len(r) - 1, -1, -1):
        tail_min = r[i] if tail_min is None else min(tail_min, r[i])
        best = max(best, r[i] / tail_min)
    return best


def eta(B) -> float:
    return sqrt(eta_sq(B))


def _is_size_reduced(mu, n: int) -> bool:
    return all(abs(mu[i][j]) <= HALF for i in range(n) for j in range(i))


def _is_lll(mu, r, delta) -> bool:
    return all(delta * r[i] <= r[i + 1] + mu[i + 1][i] ** 2 * r[i] for i in range(len(r) - 1))


def _block_is_hkz(gs, s: int, e: int, budget=None) -> bool:
    for a in range(s, e):
        lam_sq, _ = svp_from_gram(gs.projected_gram(a, e), budget=budget)
        if gs.gs_norm_sq[a] != lam_sq:
            return False
    return True


def _block_is_dsvp(gs, s: int, e: int, eps: Fraction, budget=None) -> bool:
    P = gs.projected_gram(s, e)
    dual_nsq, _ = svp_from_gram(inverse(P), budget=budget)
    return 1 / gs.gs_norm_sq[e - 1] <= (1 + eps) ** 2 * dual_nsq


def check_certificate(R: ReducedBasis, budget=None) -> bool:
    """Re-verify the claimed reduction from scratch (exact arithmetic, oracles)."""
    try:
        return _check(R, budget)
    except (RankDeficient, ValueError, ZeroDivisionError):
        return False


def _check(R: ReducedBasis, budget) -> bool:
    B, U = R.basis, R.transform
    if not is_unimodular(U):
        return False
    if R.source is not None and R.source @ U != B:
        return False
    gs = gram_schmidt(B)
    n, mu, r = gs.n, gs.mu, gs.gs_norm_sq
    kind, p = R.kind, R.params
    if kind in ("seysen", "pipeline"):
        return _check_seysen_like(R, gs)
    if not _is_size_reduced(mu, n) and kind != "dsvp":
        return False
    if kind == "size":
        return R.source is None or gram_schmidt(R.source).gs_norm_sq == r
    if kind == "lll":
        return _is_lll(mu, r, p.get("delta", DEFAULT_DELTA))
    if kind == "hkz":
        return _block_is_hkz(gs, 0, n, budget)
    if kind == "dsvp":
        return _block_is_dsvp(gs, 0, n, p["eps"], budget)
    if kind in ("slide", "padded-slide"):
        k, eps = p["k"], p["eps"]
        if kind == "slide" and n % k:
            return False
        if not _is_lll(mu, r, DEFAULT_DELTA):
            return False
        for s in range(0, n, k):
            if not _block_is_hkz(gs, s, min(s + k, n), budget):
                return False
        for s in range(1, n - k + 1, k):
            if not _block_is_dsvp(gs, s, s + k, eps, budget):
                return False
        return True
    raise ValueError(f"unknown reduction kind {kind!r}")


def _check_seysen_like(R: ReducedBasis, gs) -> bool:
    if R.kind == "seysen" and not is_unipotent(R.transform, integral=True):
        return False
    bound = R.params.get("s_bound")
    if bound is not None:
        from .seysen import s_condition
        return s_condition(R.basis) <= bound * (1 + 1e-9)
    return True
