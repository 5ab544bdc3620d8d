"""Acceptance criteria, each run at its stated tolerance.

Every test prints one PASS/FAIL line (also collected in the terminal summary).
"""
import math
import random
import time
from fractions import Fraction as F

import numpy as np
import pytest

from latdist.distortion import (brute_force_distortion, distortion_upper_bound_check, ldp_solve,
                                mapping_kappa)
from latdist.exactmat import (RatMatrix, condition_number, determinant, gram_schmidt, gs_vectors,
                              inverse)
from latdist.gadgets import (build_ldp_gadget, build_svp_to_cvp_batch, luk_tracy, sqrt_rat_up)
from latdist.lattice import LatticeHandle, closest_vector, dual_basis, successive_minima
from latdist.reduce import SlideParams, eta_sq, hkz, lll, slide_reduce
from latdist.seysen import reduced_basis_pipeline, s_condition, seysen_reduce_basis

from conftest import (brute_dist_sq, brute_minima_sq, indep_dsvp_block, indep_hkz_block,
                      indep_lll, indep_size_reduced, indep_unimodular, norm_sq, rand_int_matrix,
                      record_acceptance)

pytestmark = pytest.mark.acceptance


def _check(name, ok, detail=""):
    record_acceptance(name, ok, detail)
    assert ok, detail


# 1 -------------------------------------------------------------------------

def test_c1_exactness_core():
    rng = random.Random(1)
    t0 = time.perf_counter()
    bad = 0
    for trial in range(200):
        n = 1 + trial % 6
        B = rand_int_matrix(rng, n, 10)
        gs = gram_schmidt(B)
        vecs = gs_vectors(B, gs)
        for i in range(n):
            rebuilt = tuple(vecs[i][k] + sum((gs.mu[i][j] * vecs[j][k] for j in range(i)), F(0))
                            for k in range(n))
            bad += rebuilt != B.col(i)
        prod = F(1)
        for r in gs.gs_norm_sq:
            prod *= r
        bad += determinant(B) ** 2 != prod
        bad += B @ inverse(B) != RatMatrix.identity(n)
        bad += dual_basis(dual_basis(B)) != B
    elapsed = time.perf_counter() - t0
    _check("1 exactness core", bad == 0 and elapsed < 30,
           f"200 bases, {bad} failures, {elapsed:.1f}s (limit 30s)")


# 2 -------------------------------------------------------------------------

def test_c2_transference():
    rng = random.Random(2)
    t0 = time.perf_counter()
    violations = 0
    for trial in range(100):
        n = 2 + trial % 4
        B = rand_int_matrix(rng, n, 5)
        lam = successive_minima(B).lambda_sq
        dlam = successive_minima(dual_basis(B)).lambda_sq
        for i in range(n):
            p = lam[i] * dlam[n - 1 - i]
            violations += not (1 <= p <= n * n)
    elapsed = time.perf_counter() - t0
    _check("2 transference", violations == 0 and elapsed < 120,
           f"100 lattices, {violations} violations, {elapsed:.1f}s (limit 120s)")


# 3 -------------------------------------------------------------------------

def test_c3_reduction_certificates():
    failures = []
    eps = F(1, 4)
    for seed in range(50):
        rng = random.Random(1000 + seed)
        n = 2 + seed % 5
        B = rand_int_matrix(rng, n, 5)
        R = lll(B, F(3, 4))
        if not (indep_unimodular(R.transform) and B @ R.transform == R.basis
                and indep_lll(R.basis)):
            failures.append(("lll", seed))
        R = hkz(B)
        if not (indep_unimodular(R.transform) and B @ R.transform == R.basis
                and indep_size_reduced(R.basis) and indep_hkz_block(R.basis, 0, n)):
            failures.append(("hkz", seed))
        for m in (4, 6):
            C = rand_int_matrix(rng, m, 5)
            R = slide_reduce(C, SlideParams(2, eps))
            ok = indep_unimodular(R.transform) and C @ R.transform == R.basis
            ok = ok and indep_lll(R.basis)
            ok = ok and all(indep_hkz_block(R.basis, s, s + 2) for s in range(0, m, 2))
            ok = ok and all(indep_dsvp_block(R.basis, s, s + 2, eps) for s in range(1, m - 1, 2))
            if not ok:
                failures.append(("slide", m, seed))
    _check("3 reduction certificates", not failures,
           f"50 seeds (lll, hkz, slide n=4,6), failures: {failures or 'none'}")


# 4 -------------------------------------------------------------------------

def _sorted_cols(B: RatMatrix) -> RatMatrix:
    cols = sorted(B.columns(), key=norm_sq)
    return RatMatrix.from_columns(cols)


def test_c4_seysen_lower_bound():
    rng = random.Random(4)
    tol = 1e-6
    bad = []
    for trial in range(50):
        n = 2 + trial % 4
        B = rand_int_matrix(rng, n, 5)
        Bs = _sorted_cols(reduced_basis_pipeline(B).basis)
        D = inverse(Bs).T
        S = s_condition(Bs)
        lam = successive_minima(B).lambda_sq
        dlam = successive_minima(dual_basis(B)).lambda_sq
        if list(lam) != brute_minima_sq(B) or list(dlam) != brute_minima_sq(dual_basis(B)):
            bad.append(("oracle mismatch", trial))
            continue
        for k in range(n):
            if float(norm_sq(Bs.col(k))) > S * S * float(lam[k]) * (1 + tol):
                bad.append(("primal", trial, k))
            if float(norm_sq(D.col(k))) > S * S * float(dlam[n - 1 - k]) * (1 + tol):
                bad.append(("dual", trial, k))
    _check("4 seysen lower bound", not bad,
           f"50 lattices n<=5, violations: {bad or 'none'}")


# 5 -------------------------------------------------------------------------

def test_c5_sandwich():
    rng = random.Random(5)
    tol = 1e-6
    bad = []
    for trial in range(50):
        n = 2 + trial % 3
        B1, B2 = rand_int_matrix(rng, n, 5), rand_int_matrix(rng, n, 5)
        cert = ldp_solve(B1, B2)
        mm = math.sqrt(cert.lower_bound_sq)
        kappa = cert.upper_bound
        s1, s2 = (s_condition(b) for b in cert.bases_used)
        if not mm <= kappa * (1 + tol):
            bad.append(("lower", trial))
        if not kappa <= n * n * s1 ** 2 * s2 ** 2 * mm * (1 + tol):
            bad.append(("upper", trial))
        if not distortion_upper_bound_check(cert, tol):
            bad.append(("check", trial))
    _check("5 distortion sandwich", not bad, f"50 pairs n<=4, violations: {bad or 'none'}")


# 6 -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def luk_tracy_run():
    t0 = time.perf_counter()
    kappas = {n: condition_number(luk_tracy(n)) for n in range(2, 21)}
    etas = {n: eta_sq(luk_tracy(n)) for n in range(2, 21)}
    sey = condition_number(seysen_reduce_basis(luk_tracy(20)).basis)
    return kappas, etas, sey, time.perf_counter() - t0


def test_c6a_luk_tracy_growth_ratio(luk_tracy_run):
    kappas, _, _, elapsed = luk_tracy_run
    ratios = {n: kappas[n] / kappas[n - 1] for n in range(8, 21)}
    out = {n: round(r, 4) for n, r in ratios.items() if not 1.40 <= r <= 1.60}
    _check("6a luk-tracy ratio in [1.40, 1.60] for n>=8", not out and elapsed < 60,
           f"out of range: {out or 'none'}; {elapsed:.1f}s")


def test_c6b_luk_tracy_seysen_factor(luk_tracy_run):
    kappas, _, sey, elapsed = luk_tracy_run
    factor = kappas[20] / sey
    _check("6b seysen factor >= 1e3 at n=20", factor >= 1e3 and elapsed < 60,
           f"kappa(B20) = {kappas[20]:.2f}, after seysen {sey:.2f}, factor {factor:.1f}")


def test_c6c_luk_tracy_eta(luk_tracy_run):
    _, etas, _, elapsed = luk_tracy_run
    _check("6c eta(B_n) = 1 exactly", all(e == 1 for e in etas.values()) and elapsed < 60,
           f"n = 2..20, {elapsed:.1f}s")


# 7 -------------------------------------------------------------------------

def test_c7_tight_orthogonal():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(20):
        n = rng.randint(2, 5)
        D1 = RatMatrix.diag([F(rng.randint(1, 30), rng.randint(1, 5)) for _ in range(n)])
        D2 = RatMatrix.diag([F(rng.randint(1, 30), rng.randint(1, 5)) for _ in range(n)])
        cert = ldp_solve(D1, D2)
        lb = math.sqrt(cert.lower_bound_sq)
        worst = max(worst, abs(cert.upper_bound - lb) / lb)
    _check("7 tight orthogonal case", worst <= 1e-9, f"max relative gap {worst:.2e}")


# 8 -------------------------------------------------------------------------

GAMMA_CVP = 10
GAMMA_LDP = 1


def _planted_lattice(rng):
    B = rand_int_matrix(rng, 2, 9)
    return LatticeHandle(B), successive_minima(B).lambda_sq[0]


def _yes_instance(rng):
    L, lam_sq = _planted_lattice(rng)
    d = sqrt_rat_up(lam_sq)  # d >= lambda_1
    batch = build_svp_to_cvp_batch(L, d, GAMMA_CVP)
    d2 = batch.trace["d_prime_sq"]
    for inst in batch.instances:
        _, dist_sq = closest_vector(inst.lattice, inst.target)
        if dist_sq <= d2:
            if dist_sq != brute_dist_sq(inst.lattice.basis, inst.target):
                return False, "oracle disagreement"
            g = build_ldp_gadget(inst, gamma=GAMMA_LDP, center_target=True)
            kappa = mapping_kappa(g.L1.basis, g.L2.basis)
            return kappa <= float(g.c) + 1e-9, f"kappa {kappa:.4f}"
    return False, "no close instance"


def _no_instance(rng, brute: bool):
    L, lam_sq = _planted_lattice(rng)
    d = F(math.isqrt(int(lam_sq)), 11)  # d <= lambda_1 / 11 < lambda_1 / gamma'
    batch = build_svp_to_cvp_batch(L, d, GAMMA_CVP)
    assert (batch.trace["gamma_prime"] * d) ** 2 < lam_sq
    p, r = batch.p, batch.r
    bound = GAMMA_CVP ** 2 * batch.trace["d_prime_sq"]
    # dist(z t_ij, L_i)^2 = (z r)^2 + dist((z j mod p) b_i, L_i)^2, memoised per residue
    for i, Li in enumerate(batch.lattices):
        bi = L.basis.col(i) + (F(0),)
        res = {s: closest_vector(Li, tuple(s * x for x in bi))[1] for s in range(1, p)}
        for j in range(1, p):
            for z in range(1, p):
                if (z * r) ** 2 + res[z * j % p] <= bound:
                    return False, f"close multiple at i={i}, j={j}, z={z}"
    # direct oracle spot checks of the decomposition
    for inst in batch.instances[::37]:
        i, j = inst.label
        z = 1 + (i + j) % (p - 1)
        t = tuple(z * x for x in inst.target)
        direct = closest_vector(inst.lattice, t)[1]
        bi = L.basis.col(i) + (F(0),)
        split = (z * r) ** 2 + closest_vector(inst.lattice, tuple(z * j % p * x for x in bi))[1]
        if direct != split or direct <= bound:
            return False, "spot check failed"
    if brute:
        g = build_ldp_gadget(batch.instances[0], gamma=GAMMA_LDP)
        cert = brute_force_distortion(g.L1, g.L2, coeff_bound=4, with_lower=False)
        if cert.upper_bound <= GAMMA_LDP * float(g.c):
            return False, f"brute force found kappa {cert.upper_bound:.4f}"
    return True, ""


def test_c8_gadget_transport():
    t0 = time.perf_counter()
    rng = random.Random(8)
    yes_fail, no_fail = [], []
    for k in range(20):
        ok, why = _yes_instance(rng)
        if not ok:
            yes_fail.append((k, why))
    for k in range(20):
        ok, why = _no_instance(rng, brute=True)
        if not ok:
            no_fail.append((k, why))
    elapsed = time.perf_counter() - t0
    _check("8 gadget YES/NO transport", not yes_fail and not no_fail and elapsed < 600,
           f"YES failures {yes_fail or 'none'}, NO failures {no_fail or 'none'}, "
           f"{elapsed:.0f}s (limit 600s)")


# 9 -------------------------------------------------------------------------

def test_c9_brute_force_consistency():
    rng = random.Random(9)
    bound = 3
    bad, covered = [], 0
    for trial in range(20):
        B1, B2 = rand_int_matrix(rng, 2, 5), rand_int_matrix(rng, 2, 5)
        bf = brute_force_distortion(B1, B2, coeff_bound=bound)
        cert = ldp_solve(B1, B2)
        if bf.upper_bound ** 2 < float(bf.lower_bound_sq) * (1 - 1e-9):
            bad.append(("below lower bound", trial))
        W = np.array(cert.unimodular_witness.tolist(), dtype=object)
        if max(abs(int(x)) for x in W.flat) <= bound:
            covered += 1
            if bf.upper_bound > cert.upper_bound * (1 + 1e-9):
                bad.append(("above ldp_solve", trial))
    _check("9 brute-force consistency", not bad,
           f"20 pairs, witness covered in {covered}, violations: {bad or 'none'}")
