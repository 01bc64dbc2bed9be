"""The acceptance checks, each a function of a RunConfig returning a CheckResult."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .config import RunConfig
from .decomposition import (
    FiniteDistribution, compat_levels, coset_of, enumerate_cosets, in_torus_times_Gpn, round_trip,
)
from .enveloping import LETTERS, EnvelopingAlgebra
from .iwasawa import expand_element, generators, norm_r
from .lie import LieVec, SecondKindCoords, bracket, exp_g, log_u2, to_second_kind
from .padic import PadicScalar, ppow
from .quaternion import AlgebraParams, Quat
from .weight import (
    InfChar, WeightChar, WeightModule, factorial_pval_oracle, h_eigencheck, slope_report,
    v_term_prediction, v_term_tie, w_term_prediction,
)


@dataclass
class CheckResult:
    key: int
    name: str
    label: str
    passed: bool
    detail: dict = field(default_factory=dict)
    elapsed: float = 0.0
    budget: float = 0.0

    @property
    def within_budget(self) -> bool:
        return self.elapsed < self.budget


def _weight_module(cfg: RunConfig, p: int, prec: int, M: int) -> WeightModule:
    params = AlgebraParams(p, cfg.iota if p == cfg.p else None, prec)
    return WeightModule(params, WeightChar.from_ints(p, cfg.lam_I, cfg.lam_h), InfChar.from_int(p, cfg.chi), M)


def _prec(cfg: RunConfig, stated: int) -> int:
    """Stated working precision, raised by however much the config exceeds the default."""
    return stated + max(0, cfg.prec - RunConfig.DEFAULT_PREC)


# --- individual checks --------------------------------------------------------------

def check_brackets(cfg: RunConfig, rng: random.Random) -> tuple[bool, dict]:
    detail = {}
    ok = True
    for p in (5, 7):
        params = AlgebraParams(p, cfg.iota if p == cfg.p else None, _prec(cfg, 50))
        h, w, v = (LieVec.basis(x, params) for x in ("h", "w", "v"))
        table = {
            "[h,w]=2v": bracket(h, w, params) == v.scale(2),
            "[h,v]=2pw": bracket(h, v, params) == w.scale(2 * p),
            "[w,v]=-2iota h": bracket(w, v, params) == h.scale(-2 * params.iota),
        }
        detail[f"p={p}"] = table
        ok = ok and all(table.values())
    return ok, detail


def check_casimir(cfg: RunConfig, rng: random.Random) -> tuple[bool, dict]:
    alg = EnvelopingAlgebra.for_params(AlgebraParams(cfg.p, cfg.iota, 50))
    delta = alg.casimir()
    res = {x: alg.commutator(delta, alg.letter(x)).is_zero() for x in LETTERS}
    return all(res.values()), res


def check_exp_log(cfg: RunConfig, rng: random.Random, samples: int = 100) -> tuple[bool, dict]:
    N = _prec(cfg, 50)
    params = AlgebraParams(cfg.p, cfg.iota, N)
    worst, bad = 0, 0
    for _ in range(samples):
        g = Quat.one(params) + Quat.random_order(params, rng, 1)
        back = exp_g(log_u2(g), params)
        worst = max(worst, N - back.prec)
        bad += not back == g
    return bad == 0 and worst <= 4, {"samples": samples, "mismatches": bad, "max_precision_loss": worst}


def check_factorial_pval(cfg: RunConfig, rng: random.Random, p: int = 5, top: int = 125) -> tuple[bool, dict]:
    cases = violations = 0
    for a in range(1, p):
        for N in range(1, top + 1):
            n = 0
            while N + a * n <= top:
                cases += 1
                violations += not factorial_pval_oracle(N, a, n, p)[2]
                n += 1
    return violations == 0, {"cases": cases, "violations": violations}


def check_k_power(cfg: RunConfig, rng: random.Random, M: int = 160) -> tuple[bool, dict]:
    p = 5
    N = _prec(cfg, 200)
    W = _weight_module(cfg, p, N, M)
    x_val = W.x.valuation
    rows, ties, ok = [], 0, True
    for cv in (5, 10, 25, 50):
        X = W.exp_v_image(PadicScalar.from_int(p, cv, N), M)
        n_v = 1 if cv in (5, 10) else 2
        for k in (1, 2):
            m = ppow(p, k) + 1
            pred = v_term_prediction(n_v, k, p)
            got = X.a[m].valuation
            tie = v_term_tie(n_v, k, p, M)
            ties += tie
            match = got == pred
            if not tie and x_val >= 0:
                ok = ok and match
            rows.append({"c_v": cv, "k": k, "m": m, "computed": str(got), "predicted": str(pred),
                         "tie": tie, "match": match})
    return ok, {"v_p(x)": str(x_val), "ties_flagged": ties, "rows": rows}


def check_dominance(cfg: RunConfig, rng: random.Random, M: int = 160) -> tuple[bool, dict]:
    p = 5
    N = _prec(cfg, 200)
    W = _weight_module(cfg, p, N, M)
    rows, ok = [], True
    for n_w, n_v in ((2, 1), (1, 2), (1, 1), (3, 1)):
        for u_w, u_v in ((1, 1), (2, 3)):
            c = SecondKindCoords.from_ints(p, u_w * p ** n_w, u_v * p ** n_v, prec=N)
            X = W.group_image(c, M)
            for k in (1, 2):
                m = ppow(p, k) + 1
                pred = v_term_prediction(n_v, k, p) if n_v < n_w else w_term_prediction(n_w, k, p)
                got = X.a[m].valuation
                ok = ok and got == pred
                rows.append({"n_w": n_w, "n_v": n_v, "units": [u_w, u_v], "k": k,
                             "computed": str(got), "predicted": str(pred)})
    return ok, {"rows": rows}


def check_membership(cfg: RunConfig, rng: random.Random, samples: int = 200, M: int = 160,
                     window: int = 40) -> tuple[bool, dict]:
    p = 5
    N = _prec(cfg, 200)
    W = _weight_module(cfg, p, N, M)
    params = W.params
    disagreements, censored_total, classes = [], 0, {}
    for i in range(samples):
        g = Quat.one(params) + Quat.random_order(params, rng, 1)
        c = to_second_kind(g)
        X = W.group_image(c, M)
        for n in (1, 2):
            rep = slope_report(X, n, window)
            censored_total += rep.censored
            crit = in_torus_times_Gpn(g, n)
            if rep.verdict != crit and rep.censored == 0:
                key = f"n={n},n_w={_fmt(c.n_w)},n_v={_fmt(c.n_v)}"
                classes[key] = classes.get(key, 0) + 1
                disagreements.append({"sample": i, "n": n, "n_w": _fmt(c.n_w), "n_v": _fmt(c.n_v),
                                      "slope_a": _round(rep.slope_a), "slope_b": _round(rep.slope_b),
                                      "in_Wn": rep.verdict, "coset_criterion": crit})
    ok = not disagreements and censored_total == 0
    return ok, {"samples": samples, "checks": 2 * samples, "disagreements": len(disagreements),
                "censored": censored_total, "classes": dict(sorted(classes.items())),
                "first_disagreements": disagreements[:10]}


def check_decomposition(cfg: RunConfig, rng: random.Random, samples: int = 50) -> tuple[bool, dict]:
    p = 5
    W = _weight_module(cfg, p, _prec(cfg, 60), 40)
    params = W.params
    classes = len(enumerate_cosets(1, p))
    rt = sum(round_trip(FiniteDistribution.random(params, rng, 3), 1, W) for _ in range(samples))
    cl = sum(compat_levels(FiniteDistribution.random(params, rng, 3), 2, 1, W) for _ in range(samples))
    identity_class = coset_of(Quat.one(params), 1)
    ok = classes == ppow(p, 2) and rt == samples and cl == samples
    return ok, {"cosets_level_1": classes, "identity_coset": identity_class.label(),
                "round_trips": f"{rt}/{samples}", "compat_levels": f"{cl}/{samples}"}


def check_eigenspace(cfg: RunConfig, rng: random.Random, M: int = 20) -> tuple[bool, dict]:
    W = _weight_module(cfg, cfg.p, _prec(cfg, 50), M)
    rep = h_eigencheck(W, 0, M)
    return rep.dimension == 1, {"eigenvalue": repr(rep.eigenvalue), "claimed_lambda_h_plus_2k": repr(rep.claimed),
                                "dimension": rep.dimension, "truncation": M}


def check_iwasawa(cfg: RunConfig, rng: random.Random, M: int = 60) -> tuple[bool, dict]:
    params = AlgebraParams(cfg.p, cfg.iota, _prec(cfg, 40))
    gens = generators(params)
    exps = [expand_element(g, M) for g in gens]
    ok, rows = True, []
    for n in (1, 2):
        r_exp = Fraction(1, ppow(params.p, n))
        for name, e in zip("Ihwv", exps):
            nv = norm_r(e, n)
            nb = norm_r(e.minus_one(), n)
            good = nv.exponent == 0 and nv.exact and nb.exponent >= r_exp
            ok = ok and good
            rows.append({"n": n, "generator": name, "norm_exponent": str(nv.exponent), "exact": nv.exact,
                         "norm_minus_one_exponent": str(nb.exponent), "r_exponent": str(r_exp)})
    return ok, {"rows": rows}


def _fmt(v):
    return "inf" if v == float("inf") else str(v)


def _round(x):
    return None if x is None else round(x, 4)


# --- registry ----------------------------------------------------------------------------

CRITERIA = (
    (1, "bracket table", "[h,w] = 2v, [h,v] = 2pw, [w,v] = -2 iota h exactly, p in {5, 7}", check_brackets, 1.0),
    (2, "casimir centrality", "[Delta, x] = 0 in normal form for x in {I, h, w, v}", check_casimir, 1.0),
    (3, "exp/log round trip", "exp(log g) = g on U^2_D with at most 4 digits lost", check_exp_log, 5.0),
    (4, "factorial valuation bound", "v_p(prod (N + i a)) <= k + n/(p-1)", check_factorial_pval, 5.0),
    (5, "k-th power valuation", "v_p(a_{p^k+1}) = v_p(c_v^{p^k+1} p^{(p^k+1)/2} / (p^k)!)", check_k_power, 60.0),
    (6, "dominance dichotomy", "the g_v term dominates iff n_v < n_w", check_dominance, 120.0),
    (7, "membership equivalence", "in_Wn(image of g) iff g in T G^{p^n}", check_membership, 600.0),
    (8, "decomposition", "project/recombine is exact; 25 cosets; level compatibility", check_decomposition, 120.0),
    (9, "eigenspace uniqueness", "the eigenspace of h at the image of 1 has dimension 1", check_eigenspace, 10.0),
    (10, "iwasawa norms", "||g_i||_r = 1 exactly and ||g_i - 1||_r <= r", check_iwasawa, 5.0),
)


def run_check(key: int, cfg: RunConfig) -> CheckResult:
    for k, name, label, fn, budget in CRITERIA:
        if k == key:
            rng = random.Random(cfg.seed * 1000 + k)
            t0 = time.perf_counter()
            ok, detail = fn(cfg, rng)
            return CheckResult(k, name, label, ok, detail, time.perf_counter() - t0, budget)
    raise KeyError(f"no criterion {key}")


def run_suite(cfg: RunConfig, only=None, progress=None) -> list[CheckResult]:
    keys = [k for k, *_ in CRITERIA if only is None or k in only]
    out = []
    for k in keys:
        res = run_check(k, cfg)
        if progress is not None:
            progress(res)
        out.append(res)
    return out
