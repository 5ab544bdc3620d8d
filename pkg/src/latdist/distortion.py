"""Lattice distortion: M-factors, certified bounds, the GapLDP decider and a
brute-force distortion oracle for tiny dimensions."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import sqrt

import numpy as np
from scipy.linalg import eigh

from .errors import BudgetExceeded
from .exactmat import (RatMatrix, as_rat, condition_number, gram, inverse, is_unimodular,
                       pseudo_inverse)
from .lattice import LatticeHandle, as_handle
from ._enumeration import node_budget
from .seysen import reduced_basis_pipeline, s_condition

FLOAT_TOL = 1e-6
NO_GUARD = 1e-9
CLOSED_FORM_FLOOR = 1e-8  # trust the 3x3 closed form only for kappa^2 < 1e8


@dataclass(frozen=True)
class DistortionCertificate:
    mapping_T: RatMatrix
    unimodular_witness: RatMatrix     # W with T @ B1_in == B2_in @ W
    lower_bound_sq: Fraction | None   # (M12 * M21)^2, None when the oracle ran out of budget
    upper_bound: float                # kappa(T)
    bases_used: tuple                 # sorted reduced bases (B1, B2)
    inputs: tuple                     # input bases (B1_in, B2_in)
    m12_sq: Fraction | None = None
    m21_sq: Fraction | None = None
    note: str = ""

    @property
    def n(self) -> int:
        return self.inputs[0].cols

    @property
    def lower_bound(self) -> float | None:
        return None if self.lower_bound_sq is None else sqrt(self.lower_bound_sq)

    @property
    def gap_factor(self) -> float | None:
        lb = self.lower_bound
        return None if lb is None else self.upper_bound / lb


@dataclass(frozen=True)
class GapDecision:
    verdict: str          # "YES", "NO" or "UNKNOWN"
    c: Fraction
    gamma: float
    evidence: DistortionCertificate
    reason: str = ""


def _basis(L) -> RatMatrix:
    if isinstance(L, LatticeHandle):
        return L.basis
    return L if isinstance(L, RatMatrix) else RatMatrix(L)


def _same_dim(L1: LatticeHandle, L2: LatticeHandle) -> None:
    if L1.dim != L2.dim:
        raise ValueError(f"lattices have different dimensions ({L1.dim} vs {L2.dim})")


def m_factor(L1, L2, budget=None) -> Fraction:
    """Exact ``M(L1, L2)^2 = max_i lambda_i(L2)^2 / lambda_i(L1)^2``."""
    L1, L2 = as_handle(L1), as_handle(L2)
    _same_dim(L1, L2)
    a, b = L1.minima(budget).lambda_sq, L2.minima(budget).lambda_sq
    return max(y / x for x, y in zip(a, b))


def distortion_lower_bound(L1, L2, budget=None) -> Fraction:
    """Exact ``(M(L1, L2) M(L2, L1))^2``."""
    L1, L2 = as_handle(L1), as_handle(L2)
    return m_factor(L1, L2, budget) * m_factor(L2, L1, budget)


def _gram_float(B: RatMatrix) -> np.ndarray:
    return gram(B).to_float()


def mapping_singular_sq(B1: RatMatrix, B2: RatMatrix) -> tuple[float, float]:
    """Extreme squared singular values of the map ``B1 x -> B2 x`` on span(B1)."""
    G1, G2 = gram(B1), gram(B2)
    ratio = G2[0, 0] / G1[0, 0]
    if G2 == G1 * ratio:
        return float(ratio), float(ratio)
    w = eigh(G2.to_float(), G1.to_float(), eigvals_only=True)
    return float(w[0]), float(w[-1])


def mapping_kappa(B1: RatMatrix, B2: RatMatrix) -> float:
    """Condition number of the linear map sending the columns of B1 to those of B2."""
    if B1.is_square and B2.is_square:
        return condition_number(B2 @ inverse(B1))
    lo, hi = mapping_singular_sq(B1, B2)
    return sqrt(hi / lo)


def _sorted_by_length(B: RatMatrix) -> tuple[RatMatrix, RatMatrix]:
    """Stable sort of the columns by exact squared norm; returns (B P, P)."""
    G = gram(B)
    n = B.cols
    order = sorted(range(n), key=lambda i: G[i, i])
    P = RatMatrix([[int(order[c] == r) for c in range(n)] for r in range(n)])
    return B @ P, P


def _mapping(B1s: RatMatrix, B2s: RatMatrix) -> RatMatrix:
    if B1s.is_square:
        return B2s @ inverse(B1s)
    return B2s @ pseudo_inverse(B1s)


def ldp_solve(L1, L2, k: int | None = None, with_lower: bool = True, budget=None,
              eps=None) -> DistortionCertificate:
    """Reduce both lattices with the slide+Seysen pipeline and map sorted bases."""
    L1, L2 = as_handle(L1), as_handle(L2)
    _same_dim(L1, L2)
    R1 = reduced_basis_pipeline(L1, k, eps=eps, budget=budget)
    R2 = reduced_basis_pipeline(L2, k, eps=eps, budget=budget)
    B1s, P1 = _sorted_by_length(R1.basis)
    B2s, P2 = _sorted_by_length(R2.basis)
    T = _mapping(B1s, B2s)
    W = R2.transform @ P2 @ inverse(R1.transform @ P1)
    kappa = mapping_kappa(B1s, B2s)
    lower = m12 = m21 = None
    note = ""
    if with_lower:
        try:
            m12 = m_factor(L1, L2, budget)
            m21 = m_factor(L2, L1, budget)
            lower = m12 * m21
        except BudgetExceeded as exc:
            note = f"lower bound unavailable: {exc}"
    else:
        note = "lower bound not requested"
    return DistortionCertificate(T, W, lower, kappa, (B1s, B2s), (L1.basis, L2.basis),
                                 m12, m21, note)


def verify_mapping(T: RatMatrix, L1, L2) -> bool:
    """True iff ``T`` maps lat(B1) onto lat(B2), i.e. ``B2^+ T B1`` is unimodular."""
    B1, B2 = _basis(L1), _basis(L2)
    if B1.cols != B2.cols or T.cols != B1.rows:
        return False
    TB1 = T @ B1
    if B2.is_square:
        W = inverse(B2) @ TB1
    else:
        W = pseudo_inverse(B2) @ TB1
        if B2 @ W != TB1:
            return False
    return is_unimodular(W)


def distortion_upper_bound_check(cert: DistortionCertificate, tol: float = FLOAT_TOL) -> bool:
    """Both directions of the sorted-basis operator bound plus the full sandwich."""
    if cert.lower_bound_sq is None or cert.m12_sq is None:
        raise ValueError("certificate carries no lower-bound data")
    B1, B2 = cert.bases_used
    n = cert.n
    s1, s2 = s_condition(B1), s_condition(B2)
    lo, hi = mapping_singular_sq(B1, B2)
    norm_T, norm_Tinv = sqrt(hi), 1 / sqrt(lo)
    ok = norm_T <= n * s1 * s2 * sqrt(cert.m12_sq) * (1 + tol)
    ok &= norm_Tinv <= n * s1 * s2 * sqrt(cert.m21_sq) * (1 + tol)
    kappa = cert.upper_bound
    ok &= float(cert.lower_bound_sq) <= kappa * kappa * (1 + tol)
    ok &= kappa <= n * n * s1 ** 2 * s2 ** 2 * sqrt(cert.lower_bound_sq) * (1 + tol)
    ok &= sqrt(cert.m12_sq) <= norm_T * (1 + tol)
    ok &= sqrt(cert.m21_sq) <= norm_Tinv * (1 + tol)
    return bool(ok)


def gap_decide(L1, L2, c, gamma, k: int | None = None, budget=None) -> GapDecision:
    """YES if the pipeline mapping has ``kappa <= c``; NO if the exact lower bound
    exceeds ``gamma * c``; UNKNOWN otherwise."""
    c = as_rat(c)
    cert = ldp_solve(L1, L2, k, with_lower=True, budget=budget)
    if cert.upper_bound <= c:
        return GapDecision("YES", c, gamma, cert, "kappa(T) <= c")
    if cert.lower_bound_sq is None:
        return GapDecision("UNKNOWN", c, gamma, cert, "lower bound unavailable")
    if isinstance(gamma, (int, Fraction)) and not isinstance(gamma, bool):
        beyond = cert.lower_bound_sq > (Fraction(gamma) * c) ** 2
    else:
        beyond = float(cert.lower_bound_sq) > (float(gamma) * float(c)) ** 2 * (1 + NO_GUARD)
    if beyond:
        return GapDecision("NO", c, gamma, cert, "lower bound > gamma * c")
    return GapDecision("UNKNOWN", c, gamma, cert, "gap not resolved")


# -- brute force ------------------------------------------------------------

def _unimodular_candidates(n: int, bound: int, cap: int) -> np.ndarray:
    """Integer ``n x n`` matrices with entries in [-bound, bound] and det = +-1,
    one from each pair ``{U, -U}`` (first column sign-normalised).

    Returned as an array of shape (N, n, n).  For n = 3 the last column is
    matched against the cross product of the first two.
    """
    vals = np.arange(-bound, bound + 1, dtype=np.int64)
    if n == 1:
        return np.array([[[1]]], dtype=np.int64)
    cols = np.array(list(product(vals, repeat=n)), dtype=np.int64)
    cols = cols[np.any(cols != 0, axis=1)]
    # first nonzero entry positive
    lead = cols[np.arange(len(cols)), np.argmax(cols != 0, axis=1)]
    firsts = cols[lead > 0]
    m, f = len(cols), len(firsts)
    if f * m > cap:
        raise BudgetExceeded(f * m, cap)
    if n == 2:
        a = np.repeat(firsts, m, axis=0)
        b = np.tile(cols, (f, 1))
        det = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        keep = np.abs(det) == 1
        return np.stack([a[keep], b[keep]], axis=2)
    if n != 3:
        raise ValueError("brute force is limited to n <= 3")
    out = []
    chunk = max(1, 16_000_000 // (m * m))  # keeps the pair x column table small
    for start in range(0, f, chunk):
        a = firsts[start:start + chunk]
        A = np.repeat(a, m, axis=0)
        B = np.tile(cols, (len(a), 1))
        w = np.cross(A, B)
        # the pair extends to a unimodular matrix only if w is primitive
        ok = np.gcd.reduce(np.abs(w), axis=1) == 1
        A, B, w = A[ok], B[ok], w[ok]
        if not len(w):
            continue
        pi, ci = np.nonzero(np.abs(w @ cols.T) == 1)
        out.append(np.stack([A[pi], B[pi], cols[ci]], axis=2))
    return np.concatenate(out) if out else np.zeros((0, 3, 3), dtype=np.int64)


def _sym3_extreme_eigs(K: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Smallest and largest eigenvalues of a batch of symmetric 3x3 matrices
    (closed-form trigonometric solution)."""
    a00, a11, a22 = K[:, 0, 0], K[:, 1, 1], K[:, 2, 2]
    a01, a02, a12 = K[:, 0, 1], K[:, 0, 2], K[:, 1, 2]
    q = (a00 + a11 + a22) / 3
    p1 = a01 ** 2 + a02 ** 2 + a12 ** 2
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2 * p1
    p = np.sqrt(p2 / 6)
    ps = np.where(p > 0, p, 1.0)
    b00, b11, b22 = (a00 - q) / ps, (a11 - q) / ps, (a22 - q) / ps
    b01, b02, b12 = a01 / ps, a02 / ps, a12 / ps
    det = (b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02)
           + b02 * (b01 * b12 - b11 * b02))
    phi = np.arccos(np.clip(det / 2, -1.0, 1.0)) / 3
    hi = q + 2 * p * np.cos(phi)
    lo = q + 2 * p * np.cos(phi + 2 * np.pi / 3)
    return lo, hi


def _batched_kappa(G1: np.ndarray, G2: np.ndarray, Us: np.ndarray) -> np.ndarray:
    """kappa of ``x -> B2 U x`` relative to ``B1`` for each U: whiten with the
    Cholesky factor of G1, then take extreme eigenvalues."""
    Linv = np.linalg.inv(np.linalg.cholesky(G1))
    A = Linv @ Us.astype(float).transpose(0, 2, 1)
    K = A @ G2 @ A.transpose(0, 2, 1)
    if K.shape[1] == 3:
        lo, hi = _sym3_extreme_eigs(K)
        # the closed form loses the small eigenvalue to cancellation only when
        # K is badly conditioned, i.e. for candidates far from the optimum
        with np.errstate(divide="ignore", invalid="ignore"):
            kap = np.where(lo > hi * CLOSED_FORM_FLOOR, np.sqrt(hi / lo), np.inf)
        if np.isfinite(kap).any():
            return kap
    w = np.linalg.eigvalsh(K)
    return np.sqrt(w[:, -1] / w[:, 0])


def brute_force_distortion(L1, L2, coeff_bound: int = 3, budget=None,
                           with_lower: bool = True) -> DistortionCertificate:
    """Minimise kappa(B2 U B1^-1) over unimodular U with bounded entries.

    The result is the best mapping found, an upper bound on the distortion.
    """
    L1, L2 = as_handle(L1), as_handle(L2)
    _same_dim(L1, L2)
    n = L1.dim
    if n > 3:
        raise ValueError("brute force is limited to n <= 3")
    B1, B2 = L1.basis, L2.basis
    Us = _unimodular_candidates(n, int(coeff_bound), node_budget(budget))
    G1f, G2f = _gram_float(B1), _gram_float(B2)
    kap = _batched_kappa(G1f, G2f, Us)
    near = np.nonzero(kap <= kap.min() * (1 + 1e-6))[0]
    # re-evaluate the front runners with a full eigensolve, then break ties
    # lexicographically on the column-major entries of U - I, ordered
    # 0, 1, -1, 2, -2, ... (so the identity wins whenever it is optimal)
    sub = Us[near]
    w = np.linalg.eigvalsh(np.linalg.inv(np.linalg.cholesky(G1f)) @ sub.astype(float).transpose(0, 2, 1)
                           @ G2f @ (np.linalg.inv(np.linalg.cholesky(G1f)) @ sub.astype(float).transpose(0, 2, 1)).transpose(0, 2, 1))
    kap2 = np.sqrt(w[:, -1] / w[:, 0])
    tied = np.nonzero(kap2 <= kap2.min() * (1 + 1e-12))[0]
    flat = (sub[tied] - np.eye(n, dtype=sub.dtype)).transpose(0, 2, 1).reshape(len(tied), -1)
    flat = 2 * np.abs(flat) + (flat < 0)
    pick = near[tied[np.lexsort(flat.T[::-1])[0]]]
    U = RatMatrix([[int(v) for v in row] for row in Us[pick]])
    B2U = B2 @ U
    T = _mapping(B1, B2U)
    kappa = mapping_kappa(B1, B2U)
    lower = m12 = m21 = None
    if with_lower:
        m12, m21 = m_factor(L1, L2, budget), m_factor(L2, L1, budget)
        lower = m12 * m21
    return DistortionCertificate(T, U, lower, kappa, (B1, B2U), (B1, B2), m12, m21,
                                 f"best of {len(Us)} unimodular candidates, entries <= {coeff_bound}")


def certificate_is_consistent(cert: DistortionCertificate) -> bool:
    """Exact check of ``T B1_in = B2_in W`` with ``W`` unimodular."""
    B1, B2 = cert.inputs
    W = cert.unimodular_witness
    return is_unimodular(W) and cert.mapping_T @ B1 == B2 @ W
