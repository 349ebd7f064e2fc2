"""Mahler measure: closed-form oracles, Kronecker test, constraint dichotomy."""

import math
import random

import numpy as np
import pytest

from torsionlab.mahler import (
    ConstraintParams,
    ConstraintVerdict,
    DegreeBoundViolated,
    MahlerMethod,
    ZeroPolynomial,
    build_K_alpha,
    constraint_check,
    kronecker_zero_test,
    mahler_measure,
)
from torsionlab.ringcore import LaurentPoly, cyclotomic

rng = random.Random(99)

LEHMER = LaurentPoly(
    {10: 1, 9: 1, 7: -1, 6: -1, 5: -1, 4: -1, 3: -1, 1: 1, 0: 1}
)


def jensen_oracle(p: LaurentPoly) -> float:
    """Independent float Jensen product via numpy companion roots."""
    cs = p.coeff_list()
    roots = np.roots(np.array(cs[::-1], dtype=float))
    return math.log(abs(cs[-1])) + sum(
        math.log(a) for a in np.abs(roots) if a > 1
    )


def rand_poly(deg=6, coeff=5):
    d = rng.randint(1, deg)
    c = {k: rng.randint(-coeff, coeff) for k in range(d)}
    c[d] = rng.choice([x for x in range(-coeff, coeff + 1) if x])
    return LaurentPoly(c)


# -- closed-form known values -----------------------------------------


def test_linear_integer_root():
    # m(t - 2) = log 2 exactly (single root of modulus 2)
    res = mahler_measure(LaurentPoly({1: 1, 0: -2}))
    assert res.log_measure == pytest.approx(math.log(2), abs=1e-12)
    assert res.method is MahlerMethod.ROOT_PRODUCT


def test_golden_ratio():
    # roots of t^2 - t - 1 are (1 +- sqrt 5)/2; only the golden ratio
    # lies outside the unit circle
    golden = (1 + math.sqrt(5)) / 2
    res = mahler_measure(LaurentPoly({2: 1, 1: -1, 0: -1}))
    assert res.log_measure == pytest.approx(math.log(golden), abs=1e-12)


def test_lehmer_value():
    res = mahler_measure(LEHMER)
    assert res.log_measure == pytest.approx(0.1623576120, abs=1e-9)
    assert res.log_measure == pytest.approx(jensen_oracle(LEHMER), abs=1e-9)


def test_leading_coefficient_contributes():
    # m(c p) = log|c| + m(p)
    p = LaurentPoly({1: 1, 0: -2})
    res = mahler_measure(LaurentPoly({1: 3, 0: -6}))
    assert res.log_measure == pytest.approx(math.log(3) + math.log(2), abs=1e-12)


def test_monomial_and_constant():
    assert mahler_measure(LaurentPoly.t(7)).log_measure == 0.0
    assert mahler_measure(LaurentPoly({0: 5})).log_measure == pytest.approx(
        math.log(5)
    )


def test_zero_polynomial_raises():
    with pytest.raises(ZeroPolynomial):
        mahler_measure(LaurentPoly.zero())
    with pytest.raises(ZeroPolynomial):
        kronecker_zero_test(LaurentPoly.zero())


# -- multiplicativity --------------------------------------------------


def test_multiplicativity_random_pairs():
    for _ in range(60):
        a, b = rand_poly(4), rand_poly(4)
        lhs = mahler_measure(a * b).log_measure
        rhs = mahler_measure(a).log_measure + mahler_measure(b).log_measure
        assert lhs == pytest.approx(rhs, abs=1e-8)


def test_shift_invariance():
    p = rand_poly(5)
    base = mahler_measure(p).log_measure
    for k in (-3, 2, 11):
        assert mahler_measure(p * LaurentPoly.t(k)).log_measure == pytest.approx(
            base, abs=1e-10
        )


# -- Kronecker exact-zero test ----------------------------------------


def test_kronecker_on_cyclotomic_products():
    p = cyclotomic(1) * cyclotomic(6) * cyclotomic(6) * LaurentPoly.t(-3)
    fac = kronecker_zero_test(p)
    assert fac is not None
    assert fac.k_exponent == -3
    assert dict(fac.cyclotomic_indices) == {1: 1, 6: 2}
    assert mahler_measure(p).method is MahlerMethod.KRONECKER_EXACT_ZERO


def test_kronecker_rejects_positive_measure():
    assert kronecker_zero_test(LaurentPoly({1: 1, 0: -2})) is None
    assert kronecker_zero_test(LEHMER) is None
    assert kronecker_zero_test(LaurentPoly({2: 1, 1: -1, 0: -1})) is None


def test_kronecker_sign_and_units():
    fac = kronecker_zero_test(LaurentPoly({0: -1}))
    assert fac is not None and fac.sign == -1
    assert kronecker_zero_test(LaurentPoly({0: 2})) is None


def test_kronecker_matches_float_oracle_small_grid():
    # exhaustive degree-2 and -3 integer polynomials, small coefficients
    for a in range(-2, 3):
        for b in range(-2, 3):
            for c in range(-2, 3):
                if c == 0:
                    continue
                p = LaurentPoly({0: a, 1: b, 2: c})
                is_zero = kronecker_zero_test(p) is not None
                assert is_zero == (jensen_oracle(p) < 1e-9), p.coeffs


def test_kronecker_large_cyclotomic():
    p = cyclotomic(105) * cyclotomic(15)
    fac = kronecker_zero_test(p)
    assert fac is not None
    assert dict(fac.cyclotomic_indices) == {105: 1, 15: 1}


# -- exceptional index set --------------------------------------------


def test_k_alpha_contains_one_and_two():
    assert {1, 2} <= build_K_alpha(5.0, 3)


def test_k_alpha_small_totient_members():
    K = build_K_alpha(1.0, 10)
    # totient(4)^2 = 4 <= 4 and totient(6)^2 = 4 <= 6
    assert K == {1, 2, 4, 6}


def test_k_alpha_shrinks_with_alpha():
    assert build_K_alpha(0.01, 120) >= build_K_alpha(1.0, 120)


def test_k_alpha_validation():
    with pytest.raises(ValueError):
        build_K_alpha(0.0, 10)
    with pytest.raises(ValueError):
        build_K_alpha(1.0, 0)


# -- constraint dichotomy ---------------------------------------------


def make_params(alpha=0.5, mmax=60, d_mu=2, g=3):
    return ConstraintParams(
        alpha=alpha, K=frozenset(build_K_alpha(alpha, mmax)), d_mu=d_mu, g=g
    )


def test_constraint_positive_measure():
    rep = constraint_check(LaurentPoly({1: 1, 0: -2}), make_params(), n=4)
    assert rep.verdict is ConstraintVerdict.NOT_MAHLER_ZERO


def test_constraint_cyclotomic_hit():
    p = cyclotomic(1) * cyclotomic(4)
    rep = constraint_check(p, make_params(), n=4)
    assert rep.verdict is ConstraintVerdict.CYCLOTOMIC_HIT
    assert rep.hit_index in (1, 4)


def test_constraint_small_everywhere():
    # a bare monomial is cyclotomic-free with measure zero
    rep = constraint_check(LaurentPoly.t(3), make_params(), n=4)
    assert rep.verdict is ConstraintVerdict.SMALL_EVERYWHERE
    assert rep.max_circle_value == pytest.approx(1.0)
    assert rep.circle_bound >= 1.0


def test_constraint_degree_bound():
    p = LaurentPoly({k: 1 for k in range(30)})
    with pytest.raises(DegreeBoundViolated):
        constraint_check(p, make_params(), n=2)
