import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatbanach.padic import ExtScalar, PadicScalar
from quatbanach.quaternion import (
    AlgebraParams, NotInSubgroupError, Quat, embed, in_principal, pth_root_in_lower, smallest_nonresidue, v_D,
)


def test_smallest_nonresidue():
    assert smallest_nonresidue(5) == 2
    assert smallest_nonresidue(7) == 3
    assert smallest_nonresidue(11) == 2


def test_square_iota_is_rejected():
    with pytest.raises(ValueError, match="non-residue"):
        AlgebraParams(5, iota=4)
    with pytest.raises(ValueError):
        AlgebraParams(7, iota=2)


def test_tau_squares_to_iota(params5):
    t = Quat.tau(params5)
    assert t * t == Quat.one(params5) * params5.iota


def test_uniformizer_squares_to_p_and_anticommutes(params5):
    u, t = Quat.uniformizer(params5), Quat.tau(params5)
    assert u * u == Quat.one(params5) * 5
    assert u * t == -(t * u)
    assert v_D(u) == 1


def _rand(params, seed, minval=0):
    return Quat.random_order(params, random.Random(seed), minval)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_embedding_is_multiplicative(s1, s2):
    params = AlgebraParams(5, prec=30)
    x, y = _rand(params, s1), _rand(params, s2)
    assert embed(x * y) == embed(x) * embed(y)
    assert embed(x).det() == ExtScalar(x.reduced_norm())


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_inverse(seed):
    params = AlgebraParams(7, prec=30)
    x = _rand(params, seed)
    if x.is_zero():
        return
    assert x * x.inverse() == Quat.one(params)
    assert x.inverse() * x == Quat.one(params)


def test_reduced_norm_vanishes_only_at_zero(params5):
    # D is a division algebra: the reduced norm of a nonzero element is nonzero
    for seed in range(20):
        x = _rand(params5, seed)
        assert x.is_zero() or not x.reduced_norm().is_zero()


def test_principal_levels(params5):
    one = Quat.one(params5)
    u = Quat.uniformizer(params5)
    assert in_principal(one + u, 1) and not in_principal(one + u, 2)
    assert in_principal(one + u * u, 2) and not in_principal(one + u * u, 3)
    t = Quat.tau(params5)
    assert in_principal(one + t * 5, 2)


def test_pth_root(params5):
    rng = random.Random(4)
    for _ in range(5):
        q = Quat.one(params5) + Quat.random_order(params5, rng, 2)  # in U^4
        r = pth_root_in_lower(q, 1)
        assert in_principal(r, 2)
        assert r ** 5 == q


def test_pth_root_rejects_wrong_level(params5):
    q = Quat.one(params5) + Quat.tau(params5) * 5  # in U^2, not U^4
    with pytest.raises(NotInSubgroupError):
        pth_root_in_lower(q, 1)


def test_coordinates_roundtrip(params5):
    cs = [PadicScalar.from_int(5, c, 50) for c in (3, 5, 7, 11)]
    q = Quat.from_coords(params5, *cs)
    assert q.coords() == tuple(cs)
