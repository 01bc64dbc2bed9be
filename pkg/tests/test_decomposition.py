import random

import pytest

from quatbanach.decomposition import (
    CosetRep, FiniteDistribution, canonical_form, compat_levels, coset_of, enumerate_cosets, in_torus_times_Gpn,
    project, projection_report, recombine, round_trip, same_canonical,
)
from quatbanach.lie import LieVec, SecondKindCoords, exp_g, from_second_kind
from quatbanach.padic import ExtScalar, PadicScalar
from quatbanach.quaternion import AlgebraParams, NotInSubgroupError, Quat
from quatbanach.weight import InfChar, WeightChar, WeightModule

P = 5


@pytest.fixture(scope="module")
def params():
    return AlgebraParams(P, prec=60)


@pytest.fixture(scope="module")
def module(params):
    return WeightModule(params, WeightChar.from_ints(P, 0, 1), InfChar.from_int(P, 1), 20)


def _g(params, cw, cv, ch=0, cI=0):
    return from_second_kind(SecondKindCoords.from_ints(P, cw, cv, ch, cI, prec=params.prec), params)


def test_coset_criterion_examples(params):
    assert in_torus_times_Gpn(_g(params, 25, 25), 1)
    assert not in_torus_times_Gpn(_g(params, 5, 0), 1)
    assert not in_torus_times_Gpn(_g(params, 25, 5), 1)
    assert in_torus_times_Gpn(_g(params, 125, 125, 5, 5), 2)


def test_criterion_on_constructed_products(params):
    # t * k with t in the torus and k = exp(p^(n+1) x) lies in T G^{p^n}; k' with a coordinate of valuation n does not
    rng = random.Random(1)
    for n in (1, 2):
        for _ in range(10):
            z = PadicScalar.zero(P)
            t = exp_g(LieVec(PadicScalar.random(P, 60, rng), PadicScalar.random(P, 60, rng), z, z), params)
            k = exp_g(LieVec.random(params, rng).shift(n), params)
            assert in_torus_times_Gpn(t * k, n)
            assert in_torus_times_Gpn(k * t, n)
            bad = _g(params, P ** n * rng.randrange(1, P), P ** (n + 1))
            assert not in_torus_times_Gpn(t * bad, n)


def test_enumerate_cosets_counts():
    assert len(enumerate_cosets(1, P)) == 25
    assert len(set(enumerate_cosets(2, P))) == 625


def test_coset_of_identity(params):
    assert coset_of(Quat.one(params), 1) == CosetRep(1, 0, 0)


def test_coset_label_is_invariant(params):
    rng = random.Random(3)
    for _ in range(15):
        g = Quat.one(params) + Quat.random_order(params, rng, 1)
        n = rng.choice((1, 2))
        z = PadicScalar.zero(P)
        t = exp_g(LieVec(PadicScalar.random(P, 60, rng), PadicScalar.random(P, 60, rng), z, z), params)
        k = exp_g(LieVec.random(params, rng).shift(n), params)
        assert coset_of(g, n) == coset_of(g * t, n) == coset_of(g * k, n)


def test_coset_labels_separate(params):
    # distinct representatives give distinct classes
    reps = enumerate_cosets(1, P)
    labels = {coset_of(r.element(params), 1) for r in reps}
    assert labels == set(reps)


def test_coarsen():
    assert CosetRep(2, 55, 120).coarsen(1, P) == CosetRep(1, 5, 20)
    with pytest.raises(ValueError):
        CosetRep(1, 5, 5).coarsen(2, P)


def test_distribution_rejects_atoms_outside_U2(params):
    one = ExtScalar.exact(P, 1)
    with pytest.raises(NotInSubgroupError):
        FiniteDistribution([(one, Quat.one(params) + Quat.uniformizer(params))])


def test_round_trip(params, module):
    rng = random.Random(7)
    for _ in range(4):
        d = FiniteDistribution.random(params, rng, 3)
        assert round_trip(d, 1, module)


def test_recombine_inverts_project(params, module):
    rng = random.Random(8)
    d = FiniteDistribution.random(params, rng, 3)
    comps = project(d, 1, module)
    assert same_canonical(canonical_form(d, module), canonical_form(recombine(comps, params), module))


def test_torus_translate_has_same_projection(params, module):
    # delta_{g t} and lambda(t) delta_g have the same image in W
    rng = random.Random(9)
    g = Quat.one(params) + Quat.random_order(params, rng, 1)
    z = PadicScalar.zero(P)
    c_h = PadicScalar.from_int(P, 10, 60)
    t = exp_g(LieVec(z, c_h.shift(-1), z, z), params)  # exp(c_h h)
    lam_t = module.torus_scalar(c_h, z)
    one = ExtScalar.exact(P, 1)
    a = project(FiniteDistribution([(one, g * t)]), 1, module)
    b = project(FiniteDistribution([(ExtScalar(lam_t), g)]), 1, module)
    assert a.keys() == b.keys()
    assert all(a[k].image == b[k].image for k in a)


def test_compat_levels(params, module):
    rng = random.Random(10)
    for _ in range(3):
        assert compat_levels(FiniteDistribution.random(params, rng, 2), 2, 1, module)


def test_projection_report_is_json(params, module):
    import json
    d = FiniteDistribution.random(params, random.Random(11), 3)
    rep = json.loads(projection_report(project(d, 1, module), {"n": 1}))
    assert rep["header"] == {"n": 1}
    assert sum(c["atoms"] for c in rep["components"]) == len(d.atoms)
