"""Ring laws and serialization for the Laurent / cyclic group rings."""

import json
import math
import random

import numpy as np
import pytest

from torsionlab.ringcore import (
    CycElem,
    LaurentPoly,
    NonUnitModulus,
    circulant_expand,
    cyclotomic,
    divisors,
    laurent_eval,
    normalize_unit,
    reduce_mod_q,
    totient,
)

rng = random.Random(20260824)


def rand_poly(max_terms=5, coeff=9, span=6):
    return LaurentPoly(
        {
            rng.randint(-span, span): rng.randint(-coeff, coeff)
            for _ in range(rng.randint(0, max_terms))
        }
    )


def rand_cyc(q, coeff=9):
    return CycElem(q, [rng.randint(-coeff, coeff) for _ in range(q)])


# -- Laurent ring laws ------------------------------------------------


def test_ring_laws_random():
    for _ in range(500):
        a, b, c = rand_poly(), rand_poly(), rand_poly()
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * LaurentPoly.one() == a
        assert a + LaurentPoly.zero() == a
        assert a - a == LaurentPoly.zero()


def test_monomial_units():
    t = LaurentPoly.t(1)
    tinv = LaurentPoly.t(-1)
    assert t * tinv == LaurentPoly.one()
    assert LaurentPoly.t(5) * LaurentPoly.t(-3) == LaurentPoly.t(2)


def test_involution_is_ring_antiautomorphism():
    for _ in range(200):
        a, b = rand_poly(), rand_poly()
        assert (a * b).involution() == a.involution() * b.involution()
        assert (a + b).involution() == a.involution() + b.involution()
        assert a.involution().involution() == a


def test_involution_conjugates_on_circle():
    p = rand_poly()
    for theta in (0.3, 1.1, 2.9):
        z = complex(math.cos(theta), math.sin(theta))
        lhs = laurent_eval(p.involution(), z)
        rhs = laurent_eval(p, z).conjugate()
        assert abs(lhs - rhs) < 1e-10


def test_augmentation_is_evaluation_at_one():
    for _ in range(100):
        a, b = rand_poly(), rand_poly()
        assert (a * b).augmentation() == a.augmentation() * b.augmentation()
        assert a.augmentation() == sum(a.coeffs.values())


def test_pow():
    p = LaurentPoly({1: 1, 0: 1})
    # (t+1)^4 binomial oracle
    assert p**4 == LaurentPoly({k: math.comb(4, k) for k in range(5)})
    assert p**0 == LaurentPoly.one()


def test_big_coefficients_exact():
    p = LaurentPoly({0: 10**40, 1: 1})
    q = p * p
    assert q[0] == 10**80
    assert q[1] == 2 * 10**40


# -- reduction to the cyclic ring -------------------------------------


def test_reduce_mod_q_is_ring_morphism():
    for _ in range(300):
        q = rng.choice([3, 4, 5, 7, 12])
        a, b = rand_poly(), rand_poly()
        assert reduce_mod_q(a * b, q) == reduce_mod_q(a, q) * reduce_mod_q(b, q)
        assert reduce_mod_q(a + b, q) == reduce_mod_q(a, q) + reduce_mod_q(b, q)
    assert reduce_mod_q(LaurentPoly.one(), 5) == CycElem.one(5)


def test_reduce_wraps_exponents():
    # t^7 -> t^1, t^-1 -> t^2 in Z[Z/3]
    c = reduce_mod_q(LaurentPoly({7: 1, -1: 2}), 3)
    assert c == CycElem(3, [0, 1, 2])


def test_cyc_involution_matches_laurent():
    for _ in range(100):
        q = rng.choice([3, 5, 8])
        a = rand_poly()
        assert reduce_mod_q(a.involution(), q) == reduce_mod_q(a, q).involution()


def test_cyc_lift_roundtrip():
    for _ in range(50):
        q = rng.choice([3, 4, 7])
        c = rand_cyc(q)
        assert reduce_mod_q(c.lift(), q) == c


# -- circulant expansion ----------------------------------------------


def test_circulant_is_ring_homomorphism():
    for _ in range(200):
        q = rng.choice([3, 4, 5, 6])
        a, b = rand_cyc(q), rand_cyc(q)
        ma = np.array(circulant_expand(a), dtype=object)
        mb = np.array(circulant_expand(b), dtype=object)
        mab = np.array(circulant_expand(a * b), dtype=object)
        assert (ma @ mb == mab).all()
        assert (
            np.array(circulant_expand(a + b), dtype=object) == ma + mb
        ).all()


def test_circulant_of_t_is_cyclic_shift():
    m = circulant_expand(CycElem.t(3))
    # basis index k maps to k+1 mod 3
    assert m == [[0, 0, 1], [1, 0, 0], [0, 1, 0]]


# -- normalization and division ---------------------------------------


def test_normalize_unit():
    p = LaurentPoly({-2: 3, 1: 5})
    mono, shift = normalize_unit(p)
    assert shift == 2
    assert mono == LaurentPoly({0: 3, 3: 5})
    assert mono.deg_lo == 0


def test_divide_exact_roundtrip():
    for _ in range(200):
        a, b = rand_poly(), rand_poly()
        if b.is_zero():
            continue
        prod = a * b
        quot = prod.divide_exact(b)
        assert quot == a or (a.is_zero() and quot is not None and quot.is_zero())
    assert LaurentPoly({1: 1, 0: 1}).divide_exact(LaurentPoly({1: 1, 0: -1})) is None


# -- totient / cyclotomic ---------------------------------------------


def test_totient_against_gcd_count():
    for n in range(1, 60):
        assert totient(n) == sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def test_cyclotomic_known_values():
    assert cyclotomic(1) == LaurentPoly({1: 1, 0: -1})
    assert cyclotomic(2) == LaurentPoly({1: 1, 0: 1})
    assert cyclotomic(6) == LaurentPoly({2: 1, 1: -1, 0: 1})
    assert cyclotomic(12) == LaurentPoly({4: 1, 2: -1, 0: 1})
    # first index with a coefficient other than 0, +-1
    assert cyclotomic(105).content_max() == 2


def test_cyclotomic_product_identity():
    for n in (4, 6, 10, 12, 15):
        prod = LaurentPoly.one()
        for d in divisors(n):
            prod = prod * cyclotomic(d)
        assert prod == LaurentPoly({n: 1, 0: -1})


def test_cyclotomic_roots_primitive():
    n = 8
    cs = cyclotomic(n).coeff_list()
    roots = np.roots(cs[::-1])
    prim = [np.exp(2j * np.pi * k / n) for k in range(n) if math.gcd(k, n) == 1]
    assert sorted(np.angle(roots)) == pytest.approx(sorted(np.angle(prim)), abs=1e-8)


# -- evaluation guard and serialization -------------------------------


def test_laurent_eval_rejects_off_circle():
    p = LaurentPoly({-1: 1})
    with pytest.raises(NonUnitModulus):
        laurent_eval(p, 0.5 + 0j)
    assert laurent_eval(p, 1j) == pytest.approx(-1j)


def test_json_roundtrip():
    for _ in range(50):
        p = rand_poly()
        assert LaurentPoly.loads(p.dumps()) == p
    p = LaurentPoly({0: 10**30, -4: -7})
    obj = json.loads(p.dumps())
    # coefficients travel as decimal strings
    assert all(isinstance(c, str) for _, c in obj)

    q = 5
    c = rand_cyc(q)
    assert CycElem.from_json_obj(c.to_json_obj()) == c
