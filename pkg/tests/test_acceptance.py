"""The ten acceptance criteria, each at its stated parameters and runtime budget.

Every criterion prints one PASS/FAIL line; the lines are repeated in the
terminal summary.  Run only this module with ``pytest tests/test_acceptance.py -v``.
"""

import random

import pytest
from conftest import ACCEPTANCE_LINES

from quatbanach.config import RunConfig
from quatbanach.lie import to_second_kind
from quatbanach.quaternion import AlgebraParams, Quat
from quatbanach.suite import CRITERIA, run_check
from quatbanach.weight import InfChar, WeightChar, WeightModule, slope_report

CFG = RunConfig()


def _run(key: int):
    res = run_check(key, CFG)
    ok = res.passed and res.within_budget
    line = (f"{'PASS' if ok else 'FAIL'} criterion {key:>2} {res.name}: verdict={'pass' if res.passed else 'fail'}, "
            f"{res.elapsed:.2f}s of {res.budget:.0f}s")
    print(line)
    ACCEPTANCE_LINES.append(line)
    return res


@pytest.mark.slow
@pytest.mark.parametrize("key", [k for k, *_ in CRITERIA], ids=[f"criterion_{k}" for k, *_ in CRITERIA])
def test_criterion(key):
    res = _run(key)
    assert res.passed, res.detail
    assert res.within_budget, f"{res.elapsed:.1f}s exceeds {res.budget:.0f}s"


@pytest.mark.slow
def test_membership_disagreements_follow_shifted_threshold():
    """Where the tail-slope verdict and the coset criterion differ, they differ predictably.

    The v-part of the image has slope n_v + 1/2 - 1/(p-1) and the w-part
    n_w - 1/(p-1), so the image lies in W^{n,id} iff n_w > n and n_v >= n.
    The coset criterion asks for n_v > n, so the two disagree exactly when n_v = n < n_w.
    """
    p, M, window = 5, 160, 40
    params = AlgebraParams(p, prec=200)
    W = WeightModule(params, WeightChar.from_ints(p, 0, 1), InfChar.from_int(p, 1), M)
    rng = random.Random(20)
    seen_disagreement = False
    for _ in range(25):
        g = Quat.one(params) + Quat.random_order(params, rng, 1)
        c = to_second_kind(g)
        X = W.group_image(c, M)
        for n in (1, 2):
            rep = slope_report(X, n, window)
            assert rep.censored == 0
            assert rep.verdict == (c.n_w > n and c.n_v >= n)
            coset = c.n_w > n and c.n_v > n
            if rep.verdict != coset:
                seen_disagreement = True
                assert c.n_v == n < c.n_w
    assert seen_disagreement
