"""Constructors for reduction gadgets and example lattice families."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from math import ceil, sqrt

from .errors import InvalidGamma, NoWitnessFound, RankDeficient
from .exactmat import RatMatrix, as_rat, determinant, gram
from .lattice import LatticeHandle, as_handle, closest_vector

DIGITS = 60
SNAP = Fraction(1, 10**40)


def _rat_gamma(gamma) -> Fraction:
    if isinstance(gamma, bool):
        raise InvalidGamma("gamma must be a number")
    if isinstance(gamma, float):
        return Fraction(gamma)
    return as_rat(gamma)


def _dec(x: Fraction) -> Decimal:
    return Decimal(x.numerator) / Decimal(x.denominator)


def _snap_up(value: Decimal, ok) -> Fraction:
    """Smallest of ``value, value + SNAP, ...`` (as Fractions) satisfying ``ok``."""
    q = Fraction(value)
    q = Fraction(ceil(q / SNAP)) * SNAP
    while not ok(q):
        q += SNAP
    return q


def sqrt_rat_up(x: Fraction) -> Fraction:
    """Rational ``s >= sqrt(x)`` with ``s - sqrt(x) < 1e-30``."""
    with localcontext() as ctx:
        ctx.prec = DIGITS
        root = _dec(Fraction(x)).sqrt()
    return _snap_up(root, lambda s: s * s >= x)


@dataclass(frozen=True)
class CvpAlphaInstance:
    lattice: LatticeHandle
    target: tuple
    d_sq: Fraction
    gamma: float
    alpha: float
    label: tuple = ()

    def __post_init__(self):
        if self.d_sq <= 0:
            raise ValueError("d must be positive")
        if len(self.target) < self.lattice.ambient:
            raise ValueError("target dimension does not match the lattice")


@dataclass(frozen=True)
class LdpGadget:
    L1: LatticeHandle
    L2: LatticeHandle
    r: Fraction
    c: Fraction
    trace: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SvpToCvpBatch:
    instances: list
    p: int
    r: Fraction
    trace: dict = field(default_factory=dict)
    lattices: tuple = ()   # the n lattices Lambda_i, shared by their instances


# -- LDP gadget -------------------------------------------------------------

def build_ldp_gadget(inst: CvpAlphaInstance, gamma=None, center_target: bool = False,
                     budget=None) -> LdpGadget:
    """Pair ``lat(B, r e)`` and ``lat(B, t + r e)`` with ``r = 2 gamma d``.

    ``gamma`` defaults to the instance's gamma.  ``r`` is irrational in
    general and is rounded up to a rational within 1e-30; ``c`` is the exact
    value ``(2 gamma + 1) / (2 gamma - 1)``, which the rounded ``r`` only
    improves on the YES side.  With ``center_target`` the target is first
    shifted by its closest lattice vector (same ``L2``, shorter ``t``).
    """
    g = _rat_gamma(inst.gamma if gamma is None else gamma)
    if 2 * g <= 1:
        raise InvalidGamma(f"r = 2*gamma*d must exceed d (gamma = {float(g)})")
    L = inst.lattice
    B = L.basis
    m, n = B.rows, B.cols
    t = tuple(as_rat(x) for x in inst.target)
    if len(t) > m:  # embed the lattice to the target's ambient space
        B = B.pad_rows(len(t) - m)
        m = B.rows
    shift = (Fraction(0),) * m
    if center_target:
        v, _ = closest_vector(LatticeHandle(B, budget=budget), t, budget=budget)
        shift = v
        t = tuple(a - b for a, b in zip(t, v))
    r_sq_min = 4 * g * g * inst.d_sq
    r = sqrt_rat_up(r_sq_min)
    c = (2 * g + 1) / (2 * g - 1)
    zero = (Fraction(0),) * m
    cols = B.columns()
    B1 = RatMatrix.from_columns([tuple(col) + (Fraction(0),) for col in cols] + [zero + (r,)])
    B2 = RatMatrix.from_columns([tuple(col) + (Fraction(0),) for col in cols] + [t + (r,)])
    d = sqrt(inst.d_sq)
    det_ratio_sq = _gram_det(B2) / _gram_det(B1)
    trace = dict(gamma=g, d_sq=inst.d_sq, r=r, c=c,
                 c_actual=(1 + d / float(r)) / (1 - d / float(r)),
                 r_snap_error=float(r) - 2 * float(g) * d,
                 shift=shift, det_ratio_sq=det_ratio_sq, n=n + 1)
    return LdpGadget(LatticeHandle(B1, budget=budget), LatticeHandle(B2, budget=budget), r, c, trace)


def _gram_det(B: RatMatrix) -> Fraction:
    return determinant(gram(B))


# -- SVP -> CVP batch -------------------------------------------------------

def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def smallest_prime_at_least(x) -> int:
    q = max(2, ceil(x))
    while not _is_prime(q):
        q += 1
    return q


def gamma_prime(gamma: Fraction, p: int) -> Fraction:
    """Rational ``g' >= gamma / sqrt(1 - gamma^2/(p-1)^2)`` within 1e-30."""
    k = Fraction(1) - gamma * gamma / Fraction((p - 1) ** 2)
    if k <= 0:
        raise InvalidGamma("gamma too large for the chosen prime")
    with localcontext() as ctx:
        ctx.prec = DIGITS
        val = _dec(gamma) / _dec(k).sqrt()
    return _snap_up(val, lambda q: q * q * k >= gamma * gamma)


def build_svp_to_cvp_batch(L, d, gamma, budget=None) -> SvpToCvpBatch:
    """Base-p SVP to CVP' reduction: ``n (p - 1)`` CVP instances with one
    extra coordinate carrying ``r``."""
    L = as_handle(L)
    g = _rat_gamma(gamma)
    if g < 1:
        raise InvalidGamma("gamma must be at least 1")
    d = as_rat(d)
    if d <= 0:
        raise ValueError("d must be positive")
    B = L.basis
    m, n = B.rows, B.cols
    p = smallest_prime_at_least(10 * g * n)
    if p > 20 * g * n:  # pragma: no cover - Bertrand's postulate
        raise InvalidGamma("no prime in [10 gamma n, 20 gamma n]")
    gp = gamma_prime(g, p)
    r = gp * d / (p - 1)
    d2_sq = d * d + r * r
    cols = B.columns()
    instances = []
    lattices = []
    for i in range(n):
        li_cols = [tuple(c) + (Fraction(0),) for c in cols]
        li_cols[i] = tuple(p * x for x in li_cols[i])
        Li = LatticeHandle(RatMatrix.from_columns(li_cols), budget=budget)
        lattices.append(Li)
        for j in range(1, p):
            t = tuple(j * x for x in cols[i]) + (r,)
            instances.append(CvpAlphaInstance(Li, t, d2_sq, float(g), 1 / float(g), (i, j)))
    trace = dict(p=p, r=r, gamma=g, gamma_prime=gp, d=d, d_prime_sq=d2_sq, n=n,
                 gamma_prime_float=float(gp), snap_bound=float(SNAP), m=m)
    return SvpToCvpBatch(instances, p, r, trace, tuple(lattices))


# -- example families -------------------------------------------------------

def luk_tracy(n: int) -> RatMatrix:
    """Unit upper-triangular basis with every entry above the diagonal -1/2."""
    if n < 1:
        raise ValueError("n must be positive")
    h = Fraction(-1, 2)
    return RatMatrix([[Fraction(1) if i == j else (h if j > i else Fraction(0))
                       for j in range(n)] for i in range(n)])


def random_integer_basis(n: int, entry_bound: int, rng: random.Random) -> tuple[RatMatrix, int]:
    """Uniform integer matrix, resampled until nonsingular; returns (B, resamples)."""
    if entry_bound < 1:
        raise ValueError("entry_bound must be at least 1")
    tries = 0
    while True:
        B = RatMatrix([[rng.randint(-entry_bound, entry_bound) for _ in range(n)]
                       for _ in range(n)])
        if determinant(B) != 0:
            return B, tries
        tries += 1


def random_integer_lattice(n: int, entry_bound: int, seed: int) -> LatticeHandle:
    B, tries = random_integer_basis(n, entry_bound, random.Random(seed))
    L = LatticeHandle(B)
    L.resamples = tries
    return L


@dataclass(frozen=True)
class SeparationReport:
    basis: RatMatrix
    det_root: float         # det(L)^(1/n)
    t_norm_floor: float     # |det T|^(1/n) for T: L -> Z^n
    t_inv_norm_floor: float  # lambda_1(L)
    product_floor: float    # lower bound on dist(L, Z^n) from the two floors
    mm: float               # M(L, Z^n) M(Z^n, L)
    gap: float              # product_floor / mm
    t_norm: float | None = None  # ||T|| for the pipeline mapping
    candidates: int = 1


def _separation(B: RatMatrix, with_mapping: bool, budget=None) -> SeparationReport:
    L = LatticeHandle(B, budget=budget)
    n = L.dim
    lam = L.minima(budget).lambda_sq
    det_root = float(L.det) ** (1 / n)
    floor_t = 1 / det_root
    floor_tinv = sqrt(lam[0])
    mm = sqrt(lam[-1] / lam[0])  # lambda_n / lambda_1 for the pair (L, Z^n)
    t_norm = None
    if with_mapping:
        from .distortion import ldp_solve
        from .exactmat import operator_norm
        cert = ldp_solve(L, RatMatrix.identity(n), with_lower=False, budget=budget)
        t_norm = operator_norm(cert.mapping_T)
    prod = floor_t * floor_tinv
    return SeparationReport(B, det_root, floor_t, floor_tinv, prod, mm, prod / mm, t_norm)


def separation_demo(n: int, lattice=None, trials: int = 50, entry_bound: int = 5,
                    seed: int = 0, with_mapping: bool = True, budget=None) -> SeparationReport:
    """Compare the determinant/lambda_1 floor on dist(L, Z^n) with the M-factor bound.

    Without ``lattice``, random integer lattices are searched for the largest
    gap factor; NoWitnessFound is raised when none beats the M-factor bound.
    """
    if lattice is not None:
        B = as_handle(lattice).basis
        if B.cols != n or not B.is_square:
            raise RankDeficient("separation_demo needs a full-rank n x n basis")
        return _separation(B, with_mapping, budget)
    rng = random.Random(seed)
    best = None
    for _ in range(trials):
        B, _ = random_integer_basis(n, entry_bound, rng)
        rep = _separation(B, False, budget)
        if best is None or rep.gap > best.gap:
            best = rep
    if best is None or best.gap <= 1:
        raise NoWitnessFound(f"no random lattice at n = {n} separates the bounds "
                             f"(best gap {best.gap if best else float('nan'):.4f})")
    rep = _separation(best.basis, with_mapping, budget)
    return SeparationReport(**{**rep.__dict__, "candidates": trials})
