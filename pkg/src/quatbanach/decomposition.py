"""Cosets of T*G^{p^n} in G, projections of finite distributions, level compatibility.

A coset g*T*G^{p^n} is labelled by the residues of the second-kind
coordinates (c_w, c_v) modulo p^(n+1); its representative is
exp(r_w w) exp(r_v v) for the least non-negative residues.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from .lie import SecondKindCoords, from_second_kind, to_second_kind
from .padic import INF, ExtScalar, PadicScalar, ppow
from .quaternion import AlgebraParams, NotInSubgroupError, Quat, in_principal
from .weight import WElement, WeightModule, _fmt_val


def in_torus_times_Gpn(g: Quat, n: int) -> bool:
    """g in T * G^{p^n}  iff  v(c_w) > n and v(c_v) > n."""
    c = to_second_kind(g)
    return c.n_w > n and c.n_v > n


@dataclass(frozen=True, order=True)
class CosetRep:
    n: int
    r_w: int
    r_v: int

    def element(self, params: AlgebraParams) -> Quat:
        p = params.p
        z = PadicScalar.zero(p)
        c = SecondKindCoords(PadicScalar.exact(p, self.r_w), PadicScalar.exact(p, self.r_v), z, z)
        return from_second_kind(c, params)

    def coarsen(self, n2: int, p: int) -> "CosetRep":
        if n2 > self.n:
            raise ValueError("can only coarsen to a lower level")
        mod = ppow(p, n2 + 1)
        return CosetRep(n2, self.r_w % mod, self.r_v % mod)

    def label(self) -> str:
        return f"n={self.n}:({self.r_w},{self.r_v})"


def coset_of(g: Quat, n: int) -> CosetRep:
    if not in_principal(g, 2):
        raise NotInSubgroupError("element is not in U^2_D")
    c = to_second_kind(g)
    return CosetRep(n, c.c_w.residue(n + 1), c.c_v.residue(n + 1))


def enumerate_cosets(n: int, p: int) -> list[CosetRep]:
    mod = ppow(p, n + 1)
    return [CosetRep(n, rw, rv) for rw in range(0, mod, p) for rv in range(0, mod, p)]


@dataclass
class FiniteDistribution:
    """sum_i c_i delta_{g_i} with every g_i in U^2_D."""

    atoms: list = field(default_factory=list)

    def __post_init__(self):
        for _, g in self.atoms:
            if not in_principal(g, 2):
                raise NotInSubgroupError("distribution atoms must lie in U^2_D")

    def __add__(self, other: "FiniteDistribution") -> "FiniteDistribution":
        return FiniteDistribution(self.atoms + other.atoms)

    @classmethod
    def random(cls, params: AlgebraParams, rng: random.Random, max_atoms: int = 3) -> "FiniteDistribution":
        atoms = []
        for _ in range(rng.randint(1, max_atoms)):
            c = ExtScalar(PadicScalar.from_int(params.p, rng.randrange(1, params.p ** 3), params.prec))
            atoms.append((c, Quat.one(params) + Quat.random_order(params, rng, 1)))
        return cls(atoms)


@dataclass
class SplitAtom:
    """One atom c*delta_{g'} of a coset with representative g_r: g' = g_r * k * t.

    ``scalar`` is c*lambda(t); ``k`` holds the (c_w, c_v) coordinates of
    k = exp(k_w w) exp(k_v v).
    """

    scalar: ExtScalar
    k: SecondKindCoords


@dataclass
class Component:
    rep: CosetRep
    atoms: list
    image: WElement


def _split(g_rep_inv: Quat, g: Quat, W: WeightModule) -> tuple[SecondKindCoords, PadicScalar]:
    c = to_second_kind(g_rep_inv * g)
    p = W.p
    z = PadicScalar.zero(p)
    return SecondKindCoords(c.c_w, c.c_v, z, z), W.torus_scalar(c.c_h, c.c_I)


def project(d: FiniteDistribution, n: int, W: WeightModule, M: int | None = None) -> dict:
    """Route each atom to its coset; the component is sum c * (image of g_rep^-1 g') in W."""
    M = W.M if M is None else M
    params = W.params
    out: dict = {}
    reps: dict = {}
    for c, g in d.atoms:
        rep = coset_of(g, n)
        if rep not in reps:
            reps[rep] = rep.element(params).inverse()
        k, lam_t = _split(reps[rep], g, W)
        if not (k.n_w > n and k.n_v > n):
            raise ArithmeticError("relative element escaped T*G^{p^n}; coset classifier inconsistent")
        scalar = c * lam_t
        img = W.group_image(k, M).scale(scalar)
        comp = out.get(rep)
        if comp is None:
            out[rep] = Component(rep, [SplitAtom(scalar, k)], img)
        else:
            comp.atoms.append(SplitAtom(scalar, k))
            comp.image = comp.image + img
    return out


def recombine(components: dict, params: AlgebraParams) -> FiniteDistribution:
    """The inverse map: sum over cosets of sum_k s * delta_{g_rep k}."""
    atoms = []
    for rep, comp in sorted(components.items()):
        g_rep = rep.element(params)
        for a in comp.atoms:
            atoms.append((a.scalar, g_rep * from_second_kind(a.k, params)))
    return FiniteDistribution(atoms)


def canonical_form(d: FiniteDistribution, W: WeightModule, digits: int | None = None) -> dict:
    """The image of d in distributions modulo the right torus action.

    Each g = exp(c_w w) exp(c_v v) t contributes c*lambda(t) at the point
    (c_w, c_v); points are keyed by residues modulo p^digits.
    """
    digits = W.params.prec - 4 if digits is None else digits
    out: dict = {}
    for c, g in d.atoms:
        k = to_second_kind(g)
        key = (k.c_w.residue(digits), k.c_v.residue(digits))
        val = c * W.torus_scalar(k.c_h, k.c_I)
        out[key] = out[key] + val if key in out else val
    return {key: v for key, v in out.items() if not v.is_zero()}


def same_canonical(x: dict, y: dict) -> bool:
    if x.keys() != y.keys():
        return False
    return all(x[k] == y[k] for k in x)


def round_trip(d: FiniteDistribution, n: int, W: WeightModule, M: int | None = None) -> bool:
    """Project, recombine, and compare with d both as distributions and as W-images."""
    comps = project(d, n, W, M)
    back = recombine(comps, W.params)
    if not same_canonical(canonical_form(d, W), canonical_form(back, W)):
        return False
    for comp in comps.values():
        total = None
        for a in comp.atoms:
            img = W.group_image(a.k, comp.image.M).scale(a.scalar)
            total = img if total is None else total + img
        if not total == comp.image:
            return False
    return True


def compat_levels(d: FiniteDistribution, n: int, n2: int, W: WeightModule, M: int | None = None) -> bool:
    """Coarsening the level-n projection to level n2 agrees with projecting at level n2 directly."""
    if not n2 < n:
        raise ValueError("need n2 < n")
    params = W.params
    M = W.M if M is None else M
    fine = project(d, n, W, M)
    coarse: dict = {}
    inv_cache: dict = {}
    for rep, comp in fine.items():
        rep2 = rep.coarsen(n2, W.p)
        if rep2 not in inv_cache:
            inv_cache[rep2] = rep2.element(params).inverse()
        g_rep = rep.element(params)
        for a in comp.atoms:
            rel = inv_cache[rep2] * g_rep * from_second_kind(a.k, params)
            c = to_second_kind(rel)
            img = W.group_image(c, M).scale(a.scalar)
            coarse[rep2] = coarse[rep2] + img if rep2 in coarse else img
    direct = {rep: comp.image for rep, comp in project(d, n2, W, M).items()}
    if coarse.keys() != direct.keys():
        return False
    return all(coarse[r] == direct[r] for r in direct)


def projection_report(components: dict, header: dict | None = None) -> str:
    """JSON: coset residues -> a summary of the component's valuation profile."""
    rows = []
    for rep, comp in sorted(components.items()):
        prof = comp.image.valuation_profile()
        finite = [r.val_a for r in prof if r.val_a != INF]
        rows.append({
            "coset": [rep.r_w, rep.r_v],
            "level": rep.n,
            "atoms": len(comp.atoms),
            "min_val_a": _fmt_val(min(finite)) if finite else "inf",
            "val_a_at_M": _fmt_val(comp.image.a[-1].valuation),
            "censored": sum(r.censored for r in prof),
        })
    return json.dumps({"header": header or {}, "components": rows}, indent=1, sort_keys=True)
