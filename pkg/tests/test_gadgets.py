import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from latdist.errors import InvalidGamma
from latdist.exactmat import RatMatrix, condition_number, determinant, inverse
from latdist.distortion import brute_force_distortion
from latdist.gadgets import (CvpAlphaInstance, build_ldp_gadget, build_svp_to_cvp_batch,
                             gamma_prime, luk_tracy, random_integer_basis, random_integer_lattice,
                             separation_demo, smallest_prime_at_least, sqrt_rat_up)
from latdist.lattice import LatticeHandle, closest_vector

from conftest import brute_dist_sq, brute_lambda1_sq

I2 = RatMatrix.identity(2)


def gadget_kappa(g):
    return condition_number(g.L2.basis @ inverse(g.L1.basis))


def test_ldp_gadget_constants():
    inst = CvpAlphaInstance(LatticeHandle(I2), (0, 0), F(1), 1, 1)
    g = build_ldp_gadget(inst)
    assert g.r == 2 and g.c == 3
    assert g.L1.basis == RatMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 2]])


def test_ldp_gadget_yes_side():
    d = F(1, 10)
    inst = CvpAlphaInstance(LatticeHandle(I2), (d, 0), d * d, 1, 1)
    g = build_ldp_gadget(inst)
    ratio = d / g.r
    assert gadget_kappa(g) <= float((1 + ratio) / (1 - ratio)) + 1e-12
    assert gadget_kappa(g) <= float(g.c)


def test_ldp_gadget_center_target():
    inst = CvpAlphaInstance(LatticeHandle(I2), (F(31, 10), -2), F(1, 100), 1, 1)
    g = build_ldp_gadget(inst, center_target=True)
    assert g.trace["shift"] == (3, -2)
    assert gadget_kappa(g) <= float(g.c) + 1e-9


def test_ldp_gadget_rejects_small_gamma():
    inst = CvpAlphaInstance(LatticeHandle(I2), (0, 0), F(1), F(1, 2), 2)
    with pytest.raises(InvalidGamma):
        build_ldp_gadget(inst)


@pytest.mark.slow
def test_ldp_gadget_no_side_brute_force():
    inst = CvpAlphaInstance(LatticeHandle(RatMatrix.diag([100, 100])), (50, 0), F(1), 1, 1)
    g = build_ldp_gadget(inst)
    cert = brute_force_distortion(g.L1, g.L2, coeff_bound=4, with_lower=False)
    assert cert.upper_bound > float(g.c)


def test_svp_to_cvp_batch_shape():
    batch = build_svp_to_cvp_batch(LatticeHandle(I2), 1, 1)
    assert batch.p == 23
    assert len(batch.instances) == 44
    assert {inst.label for inst in batch.instances} == {(i, j) for i in range(2) for j in range(1, 23)}
    gp = batch.trace["gamma_prime"]
    assert gp >= 1
    assert batch.r == gp / 22
    assert batch.trace["d_prime_sq"] == 1 + batch.r ** 2


def test_gamma_prime_relation():
    for g, p in ((F(1), 23), (F(3, 2), 31), (F(10), 211)):
        gp = gamma_prime(g, p)
        k = 1 - g * g / (p - 1) ** 2
        assert gp * gp * k >= g * g
        assert float(gp) == pytest.approx(float(g) / math.sqrt(float(k)), rel=1e-15)


def test_sqrt_rat_up():
    for x in (F(2), F(4), F(1, 3), F(10**6 + 1)):
        s = sqrt_rat_up(x)
        assert s * s >= x
        assert float(s) - math.sqrt(x) < 1e-12


def test_smallest_prime():
    assert smallest_prime_at_least(20) == 23
    assert smallest_prime_at_least(2) == 2
    assert smallest_prime_at_least(F(89, 4)) == 23


def test_svp_to_cvp_yes_transport():
    # lambda_1 = 1 <= d, so some instance is close
    L = LatticeHandle(RatMatrix([[1, 3], [0, 7]]))
    batch = build_svp_to_cvp_batch(L, 1, 1)
    d2 = batch.trace["d_prime_sq"]
    hits = [inst for inst in batch.instances
            if closest_vector(inst.lattice, inst.target)[1] <= d2]
    assert hits
    inst = hits[0]
    assert closest_vector(inst.lattice, inst.target)[1] == brute_dist_sq(inst.lattice.basis,
                                                                         inst.target)


def test_svp_to_cvp_no_transport():
    # lambda_1 = 5 and d = 1/3, so lambda_1 > gamma' d
    L = LatticeHandle(RatMatrix([[5, 2], [0, 13]]))
    assert brute_lambda1_sq(L.basis) == 25
    d, g = F(1, 3), 1
    batch = build_svp_to_cvp_batch(L, d, g)
    assert 25 > (batch.trace["gamma_prime"] * d) ** 2
    bound = g * g * batch.trace["d_prime_sq"]
    p = batch.p
    for inst in batch.instances[::5]:
        for z in range(1, p, 3):
            t = tuple(z * x for x in inst.target)
            assert closest_vector(inst.lattice, t)[1] > bound


def test_luk_tracy_examples():
    assert luk_tracy(1) == RatMatrix([[1]])
    assert luk_tracy(2) == RatMatrix([[1, F(-1, 2)], [0, 1]])
    assert determinant(luk_tracy(7)) == 1
    with pytest.raises(ValueError):
        luk_tracy(0)


def test_random_integer_lattice_reproducible():
    a = random_integer_lattice(4, 5, 42)
    b = random_integer_lattice(4, 5, 42)
    assert a.basis == b.basis
    assert all(random_integer_lattice(4, 5, s).resamples <= 3 for s in range(100))
    B, _ = random_integer_basis(3, 2, random.Random(0))
    assert determinant(B) != 0


def test_separation_examples():
    rep = separation_demo(3, lattice=RatMatrix.identity(3))
    assert rep.gap == pytest.approx(1.0)
    hexa = RatMatrix([[1, F(1, 2)], [0, F(13, 15)]])
    rep = separation_demo(2, lattice=hexa)
    assert rep.gap > 1
    assert rep.t_norm >= rep.t_norm_floor * (1 - 1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_separation_norm_floor(seed):
    B, _ = random_integer_basis(3, 4, random.Random(seed))
    rep = separation_demo(3, lattice=B)
    assert rep.t_norm >= rep.t_norm_floor * (1 - 1e-9)
