import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatbanach.padic import (
    INF, ExtScalar, PadicScalar, PrecisionError, check_prime, padic_binomial, vp_factorial, vp_int,
)

P = 5


def test_vp_int_values():
    assert vp_int(5, 250) == 3
    assert vp_int(5, -7) == 0
    assert vp_int(5, 0) == INF


def test_legendre_formula_against_direct_count():
    for n in range(200):
        assert vp_factorial(5, n) == vp_int(5, math.factorial(n))
    assert vp_factorial(5, 25) == 6
    assert vp_factorial(5, 125) == 31


def test_check_prime_rejects_small_and_composite():
    for bad in (2, 3, 9, 25, 1):
        with pytest.raises(ValueError):
            check_prime(bad)
    check_prime(7)


def test_from_rational_inverse():
    third = PadicScalar.from_rational(P, Fraction(1, 3), 20)
    assert third * 3 == PadicScalar.exact(P, 1)
    assert third.prec == 20


def test_negative_valuation_rational():
    x = PadicScalar.from_rational(P, Fraction(2, 25), 10)
    assert x.valuation == -2
    assert x * 25 == PadicScalar.exact(P, 2)


def test_division_by_p_costs_one_digit():
    x = PadicScalar.from_int(P, 7, 10)
    y = x / 5
    assert y.prec == 9 and y.valuation == -1


def test_exact_zero_differs_from_vanishing_value():
    z = PadicScalar.exact(P, 0)
    w = PadicScalar.from_int(P, 5 ** 12, 10)
    assert z.is_exact_zero() and z.is_zero()
    assert w.is_zero() and not w.is_exact_zero()


def test_residue_and_precision_guard():
    x = PadicScalar.from_int(P, 123456, 8)
    assert x.residue(3) == 123456 % 125
    with pytest.raises(PrecisionError):
        x.residue(9)


@given(st.integers(-10 ** 9, 10 ** 9), st.integers(-10 ** 9, 10 ** 9))
def test_ring_operations_match_integers(a, b):
    N = 30
    x, y = PadicScalar.from_int(P, a, N), PadicScalar.from_int(P, b, N)
    assert x + y == PadicScalar.from_int(P, a + b, N)
    assert x - y == PadicScalar.from_int(P, a - b, N)
    assert x * y == PadicScalar.from_int(P, a * b, N)


@given(st.integers(1, 10 ** 6).filter(lambda n: n % 5))
def test_inverse_of_unit(n):
    x = PadicScalar.from_int(P, n, 25)
    assert x * x.inverse() == PadicScalar.exact(P, 1)


def test_sqrt_p_squares_to_p():
    s = ExtScalar.sqrt_p(P)
    assert s * s == ExtScalar.exact(P, 5)
    assert s.valuation == Fraction(1, 2)


def test_ext_norm_and_conjugate():
    x = ExtScalar.exact(P, 3, 2)  # 3 + 2 sqrt 5
    assert x * x.conj() == ExtScalar(x.norm())
    assert x.norm() == PadicScalar.exact(P, 9 - 4 * 5)


def test_ext_inverse():
    x = ExtScalar(PadicScalar.from_int(P, 3, 30), PadicScalar.from_int(P, 7, 30))
    assert x * x.inverse() == ExtScalar.exact(P, 1)


def test_binomial_of_exact_integers():
    for n in (-3, 0, 4, 17):
        for k in range(8):
            expected = math.comb(n, k) if n >= 0 else (-1) ** k * math.comb(-n + k - 1, k)
            assert padic_binomial(PadicScalar.exact(P, n), k) == PadicScalar.exact(P, expected)


def test_binomial_of_minus_one_alternates():
    m1 = PadicScalar.from_int(P, -1, 30)
    for k in range(12):
        assert padic_binomial(m1, k) == PadicScalar.exact(P, (-1) ** k)


@settings(max_examples=50)
@given(st.integers(0, 5 ** 8), st.integers(0, 40))
def test_binomial_inexact_matches_comb(n, k):
    N = 20
    b = padic_binomial(PadicScalar.from_int(P, n, N), k)
    assert b.prec >= N - vp_factorial(P, k)
    assert b == PadicScalar.from_int(P, math.comb(n, k), N - vp_factorial(P, k))
