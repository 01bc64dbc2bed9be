import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatbanach.lie import (
    LieVec, SecondKindCoords, bracket, exp_g, from_second_kind, from_torus_first, hyperbolic_pair, log_u2,
    quat_exp, quat_log, solve_sinh, to_second_kind, to_second_kind_peeling, torus_first_coords,
)
from quatbanach.padic import PadicScalar
from quatbanach.quaternion import AlgebraParams, NotInSubgroupError, Quat, in_principal


@pytest.mark.parametrize("p", [5, 7, 11])
def test_bracket_table(p):
    params = AlgebraParams(p, prec=50)
    I, h, w, v = (LieVec.basis(x, params) for x in "Ihwv")
    assert bracket(h, w, params) == v.scale(2)
    assert bracket(h, v, params) == w.scale(2 * p)
    assert bracket(w, v, params) == h.scale(-2 * params.iota)
    for x in (I, h, w, v):
        assert bracket(I, x, params).is_zero()


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32))
def test_bracket_antisymmetry_and_jacobi(seed):
    params = AlgebraParams(5, prec=30)
    rng = random.Random(seed)
    x, y, z = (LieVec.random(params, rng) for _ in range(3))
    b = lambda a, c: bracket(a, c, params)  # noqa: E731
    assert (b(x, y) + b(y, x)).is_zero()
    assert (b(x, b(y, z)) + b(y, b(z, x)) + b(z, b(x, y))).is_zero()


def test_exp_log_roundtrip_on_U2():
    params = AlgebraParams(5, prec=50)
    rng = random.Random(11)
    for _ in range(20):
        g = Quat.one(params) + Quat.random_order(params, rng, 1)
        x = log_u2(g)
        assert exp_g(x, params) == g
        assert log_u2(exp_g(x, params)) == x


def test_exp_of_commuting_sum_is_product(params5):
    rng = random.Random(2)
    a = PadicScalar.random(5, 50, rng, 1)
    b = PadicScalar.random(5, 50, rng, 1)
    z1 = Quat.from_coords(params5, a, PadicScalar.zero(5), PadicScalar.zero(5), PadicScalar.zero(5))
    z2 = Quat.from_coords(params5, PadicScalar.zero(5), b, PadicScalar.zero(5), PadicScalar.zero(5))
    assert quat_exp(z1 + z2) == quat_exp(z1) * quat_exp(z2)


def test_log_rejects_outside_U2(params5):
    g = Quat.one(params5) + Quat.uniformizer(params5)  # in U^1 only
    with pytest.raises(NotInSubgroupError):
        log_u2(g)
    assert quat_log(g) is not None  # the series itself converges on U^1


def test_exp_g_lands_in_U2(params5):
    rng = random.Random(5)
    for _ in range(10):
        assert in_principal(exp_g(LieVec.random(params5, rng), params5), 2)


def test_hyperbolic_pair_is_exp_along_tau(params5):
    y = PadicScalar.from_int(5, 35, 50)
    C, S = hyperbolic_pair(y, params5.iota, 50)
    t = Quat.tau(params5)
    assert quat_exp(t * y) == Quat.one(params5) * C + t * S


@pytest.mark.parametrize("kappa", [2, -10])
def test_solve_sinh_inverts_S(kappa):
    y = PadicScalar.from_int(5, 5 * 123, 60)
    _, S = hyperbolic_pair(y, kappa, 60)
    assert solve_sinh(S, kappa, 60) == y


def test_second_kind_reconstruction(params5):
    rng = random.Random(8)
    for _ in range(10):
        g = Quat.one(params5) + Quat.random_order(params5, rng, 1)
        c = to_second_kind(g)
        assert from_second_kind(c, params5) == g
        assert min(x.valuation for x in c.as_tuple()) >= 1


def test_second_kind_of_known_coordinates(params5):
    c = SecondKindCoords.from_ints(5, 25, 15, 10, 5, prec=50)
    g = from_second_kind(c, params5)
    assert to_second_kind(g) == c


def test_peeling_agrees_with_closed_form():
    params = AlgebraParams(5, prec=25)
    rng = random.Random(9)
    for _ in range(3):
        g = Quat.one(params) + Quat.random_order(params, rng, 1)
        assert to_second_kind_peeling(g) == to_second_kind(g)


def test_torus_first_roundtrip(params5):
    rng = random.Random(10)
    for _ in range(10):
        g = Quat.one(params5) + Quat.random_order(params5, rng, 1)
        assert from_torus_first(torus_first_coords(g), params5) == g


def test_membership_predicate_is_order_robust(params5):
    # moving the torus across exp(c_w w) perturbs c_v by terms of valuation > n_w
    # (and c_w by terms of valuation > n_v), so min(n_w, n_v) cannot change
    rng = random.Random(12)
    for _ in range(40):
        g = Quat.one(params5) + Quat.random_order(params5, rng, 1)
        a, b = to_second_kind(g), torus_first_coords(g)
        assert min(a.n_w, a.n_v) == min(b.n_w, b.n_v)
        for n in (1, 2, 3):
            assert (a.n_w > n and a.n_v > n) == (b.n_w > n and b.n_v > n)
