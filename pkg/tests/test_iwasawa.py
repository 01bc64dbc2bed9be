from fractions import Fraction

import pytest

from quatbanach.iwasawa import (
    BExpansion, b_expand, convolve_single, expand_element, expand_product, generator_exponents, generators, norm_r,
)
from quatbanach.padic import ExtScalar, PadicScalar
from quatbanach.quaternion import AlgebraParams

P = 5


@pytest.fixture(scope="module")
def params():
    return AlgebraParams(P, prec=40)


@pytest.fixture(scope="module")
def gens(params):
    return generators(params)


def test_generator_exponents_are_unit_vectors(gens):
    for i, g in enumerate(gens):
        ls = generator_exponents(g)
        for j, l in enumerate(ls):
            assert l == PadicScalar.exact(P, 1 if i == j else 0)


def test_integer_exponents_give_binomial_rows():
    e = b_expand((2, 0, 0, 0), 5, P)
    assert e.coeffs == {(0, 0, 0, 0): ExtScalar.exact(P, 1), (1, 0, 0, 0): ExtScalar.exact(P, 2),
                        (2, 0, 0, 0): ExtScalar.exact(P, 1)}
    e = b_expand((-1, 0, 0, 0), 6, P)
    assert all(e.coeffs[(k, 0, 0, 0)] == ExtScalar.exact(P, (-1) ** k) for k in range(7))


@pytest.mark.parametrize("n", [1, 2])
def test_generator_norms(gens, n):
    r = Fraction(1, P ** n)
    for g in gens:
        e = expand_element(g, 60)
        nv = norm_r(e, n)
        assert nv.exponent == 0 and nv.exact and nv.value() == 1.0
        nb = norm_r(e.minus_one(), n)
        assert nb.exponent == r and nb.exact


def test_norm_of_zero_expansion():
    e = BExpansion({}, 10, P)
    assert norm_r(e, 1).exponent == float("inf")


def test_square_by_convolution_matches_group_square(gens):
    g = gens[2]
    e = expand_element(g, 20)
    assert convolve_single(e, e, 2) == expand_element(g * g, 20)


def test_convolution_requires_single_variable(gens):
    e = expand_element(gens[0] * gens[2], 5)
    with pytest.raises(ValueError):
        convolve_single(e, e, 0)


@pytest.mark.parametrize("n", [1, 2])
def test_submultiplicativity_on_commuting_pair(gens, n):
    # g = g_1, g' = g_1^2: (g - 1)(g' - 1) = g g' - g - g' + 1
    g, g2 = gens[0], gens[0] * gens[0]
    M = 40
    lhs = (expand_product(g, g2, M) - expand_element(g, M) - expand_element(g2, M)).add_scalar(1)
    bound = norm_r(expand_element(g, M).minus_one(), n) * norm_r(expand_element(g2, M).minus_one(), n)
    assert norm_r(lhs, n) <= bound


@pytest.mark.parametrize("n", [1, 2])
def test_product_expansion_identity(gens, n):
    # (b_3)(b_3) expansion from convolution equals g_3^2 - 2 g_3 + 1
    g = gens[2]
    M = 30
    b = expand_element(g, M).minus_one()
    lhs = convolve_single(b, b, 2)
    rhs = (expand_element(g * g, M) - expand_element(g, M) - expand_element(g, M)).add_scalar(1)
    assert lhs == rhs
    assert norm_r(lhs, n).exponent == 2 * norm_r(b, n).exponent


def test_exactness_flag_fails_when_truncation_too_short():
    # a coefficient of valuation 1 at alpha = 0 is not certified at M = 2, n = 2 (3/25 < 1)
    e = BExpansion({(0, 0, 0, 0): ExtScalar.exact(P, 5)}, 2, P)
    nv = norm_r(e, 2)
    assert nv.exponent == 1 and not nv.exact
