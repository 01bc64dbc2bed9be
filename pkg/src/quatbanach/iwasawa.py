"""Truncated b-coordinate expansions and the norms ||.||_r with r = p^(-1/p^n).

With generators g_1..g_4 = exp_g(I), exp_g(h), exp_g(w), exp_g(v) and
b_i = g_i - 1, every g in G is uniquely g_1^{l_1} g_2^{l_2} g_3^{l_3} g_4^{l_4}
and expands as sum_alpha C(l_1, a_1) ... C(l_4, a_4) b^alpha.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .lie import LieVec, exp_g, torus_first_coords
from .padic import INF, ExtScalar, PadicScalar, padic_binomial
from .quaternion import AlgebraParams, Quat

GENERATOR_ORDER = ("I", "h", "w", "v")


def generators(params: AlgebraParams) -> list[Quat]:
    return [exp_g(LieVec.basis(name, params), params) for name in GENERATOR_ORDER]


def generator_exponents(g: Quat) -> tuple[PadicScalar, ...]:
    """(l_1, ..., l_4) with g = g_1^{l_1} g_2^{l_2} g_3^{l_3} g_4^{l_4}.

    g_1^{l_1} g_2^{l_2} = exp(p l_1 I + p l_2 h) and g_3^{l}, g_4^{l} = exp(p l w), exp(p l v),
    so the exponents are the torus-first coordinates divided by p.
    """
    c = torus_first_coords(g)
    return tuple(x.shift(-1) for x in (c.c_I, c.c_h, c.c_w, c.c_v))


@dataclass(frozen=True)
class NormValue:
    """||x||_r = p^(-exponent); ``exact`` is False when the value is only a lower bound."""

    exponent: object  # Fraction or INF
    exact: bool
    p: int

    def value(self) -> float:
        return 0.0 if self.exponent == INF else float(self.p) ** (-float(self.exponent))

    def __le__(self, other: "NormValue") -> bool:
        return self.exponent >= other.exponent

    def __mul__(self, other: "NormValue") -> "NormValue":
        return NormValue(self.exponent + other.exponent, self.exact and other.exact, self.p)


class BExpansion:
    """sum_{|alpha| <= M} coeff_alpha b^alpha."""

    __slots__ = ("coeffs", "M", "p")

    def __init__(self, coeffs: dict, M: int, p: int):
        self.coeffs = {a: c for a, c in coeffs.items() if sum(a) <= M and not c.is_exact_zero()}
        self.M = M
        self.p = p

    def __add__(self, other: "BExpansion") -> "BExpansion":
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out[a] + c if a in out else c
        return BExpansion(out, min(self.M, other.M), self.p)

    def __neg__(self) -> "BExpansion":
        return BExpansion({a: -c for a, c in self.coeffs.items()}, self.M, self.p)

    def __sub__(self, other: "BExpansion") -> "BExpansion":
        return self + (-other)

    def add_scalar(self, c: int) -> "BExpansion":
        zero = (0, 0, 0, 0)
        out = dict(self.coeffs)
        out[zero] = out[zero] + c if zero in out else ExtScalar.exact(self.p, c)
        return BExpansion(out, self.M, self.p)

    def minus_one(self) -> "BExpansion":
        return self.add_scalar(-1)

    def __eq__(self, other):
        d = self - other
        return all(c.is_zero() for c in d.coeffs.values())

    __hash__ = None


def b_expand(exponents, M: int, p: int | None = None) -> BExpansion:
    """Coefficients prod_i C(l_i, alpha_i) of g_1^{l_1} ... g_4^{l_4}, for |alpha| <= M.

    Products with a factor that vanishes at working precision are not stored:
    they are bounded by p^(-prec) and never reach the sup defining a norm.
    """
    ls = []
    for x in exponents:
        if isinstance(x, int):
            if p is None:
                raise ValueError("integer exponents need p")
            x = PadicScalar.exact(p, x)
        ls.append(x)
    p = ls[0].p
    tables = [[(k, c) for k in range(M + 1) for c in [padic_binomial(l, k)] if not c.is_zero()] for l in ls]
    coeffs = {}
    for (a, c1), (b, c2) in itertools.product(tables[0], tables[1]):
        if a + b > M:
            continue
        c12 = c1 * c2
        for c, c3 in tables[2]:
            if a + b + c > M:
                break
            c123 = c12 * c3
            for d, c4 in tables[3]:
                if a + b + c + d > M:
                    break
                coeffs[(a, b, c, d)] = ExtScalar(c123 * c4)
    return BExpansion(coeffs, M, p)


def expand_element(g: Quat, M: int) -> BExpansion:
    return b_expand(generator_exponents(g), M)


def expand_product(g: Quat, h: Quat, M: int) -> BExpansion:
    """The product of two group elements, through group multiplication."""
    return expand_element(g * h, M)


def convolve_single(x: BExpansion, y: BExpansion, i: int) -> BExpansion:
    """Product of two expansions supported on powers of the single variable b_i."""
    for e in (x, y):
        if any(a[j] for a in e.coeffs for j in range(4) if j != i):
            raise ValueError("expansions must involve only b_i")
    M = min(x.M, y.M)
    out: dict = {}
    for a, c in x.coeffs.items():
        for b, d in y.coeffs.items():
            k = a[i] + b[i]
            if k > M:
                continue
            key = tuple(k if j == i else 0 for j in range(4))
            out[key] = out[key] + c * d if key in out else c * d
    return BExpansion(out, M, x.p)


def norm_r(e: BExpansion, n: int) -> NormValue:
    """sup |coeff_alpha| r^|alpha| with r = p^(-1/p^n), as an exact exponent.

    The value is exact when every omitted term (|alpha| > M, |coeff| <= 1) is
    strictly smaller than the maximum found: r^(M+1) < max.
    """
    p = e.p
    step = Fraction(1, p ** n)
    best = INF
    for alpha, c in e.coeffs.items():
        if c.is_zero():
            continue
        x = c.valuation + sum(alpha) * step
        if x < best:
            best = x
    exact = (e.M + 1) * step > best
    return NormValue(best, exact, p)
