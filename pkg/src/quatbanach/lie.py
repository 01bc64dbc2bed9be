"""The uniform group G = U^2_D, its Lie lattice g_D and exponential coordinates.

g_D is identified with O_D through ``log(g)/p``; its Z_p-basis is

    I = 1,  h = sqrt(pI),  w = tau,  v = sqrt(p) * tau,

so the four Q_p coordinates of a quaternion ``a0 + a1 sqrt p + (b0 + b1 sqrt p) tau``
are exactly (c_I, c_h, c_w, c_v).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .padic import INF, ExtScalar, PadicScalar, PrecisionError
from .quaternion import AlgebraParams, NotInSubgroupError, Quat, in_principal


class NotClosedError(ArithmeticError):
    """A bracket left the Z_p-lattice g_D (an implementation bug if ever raised)."""


@dataclass(frozen=True)
class LieVec:
    c_I: PadicScalar
    c_h: PadicScalar
    c_w: PadicScalar
    c_v: PadicScalar

    @classmethod
    def from_quat(cls, q: Quat) -> "LieVec":
        return cls(*q.coords())

    @classmethod
    def basis(cls, name: str, params: AlgebraParams) -> "LieVec":
        p = params.p
        one, zero = PadicScalar.exact(p, 1), PadicScalar.zero(p)
        slots = {"I": 0, "h": 1, "w": 2, "v": 3}
        cs = [zero] * 4
        cs[slots[name]] = one
        return cls(*cs)

    @classmethod
    def random(cls, params: AlgebraParams, rng: random.Random, minval: int = 0) -> "LieVec":
        return cls(*(PadicScalar.random(params.p, params.prec, rng, minval) for _ in range(4)))

    def to_quat(self, params: AlgebraParams) -> Quat:
        return Quat.from_coords(params, self.c_I, self.c_h, self.c_w, self.c_v)

    def coords(self) -> tuple:
        return (self.c_I, self.c_h, self.c_w, self.c_v)

    def __add__(self, other: "LieVec") -> "LieVec":
        return LieVec(*(x + y for x, y in zip(self.coords(), other.coords())))

    def __sub__(self, other: "LieVec") -> "LieVec":
        return LieVec(*(x - y for x, y in zip(self.coords(), other.coords())))

    def __neg__(self) -> "LieVec":
        return LieVec(*(-x for x in self.coords()))

    def scale(self, s) -> "LieVec":
        return LieVec(*(x * s for x in self.coords()))

    def shift(self, k: int) -> "LieVec":
        return LieVec(*(x.shift(k) for x in self.coords()))

    @property
    def valuation(self):
        return min(x.valuation for x in self.coords())

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.coords())

    def __eq__(self, other):
        return isinstance(other, LieVec) and (self - other).is_zero()

    __hash__ = None


def bracket(x: LieVec, y: LieVec, params: AlgebraParams) -> LieVec:
    """[x, y] computed as the commutator in D, read back in the (I, h, w, v) basis."""
    qx, qy = x.to_quat(params), y.to_quat(params)
    out = LieVec.from_quat(qx * qy - qy * qx)
    floor = min(0, x.valuation + y.valuation) if x.valuation != INF and y.valuation != INF else 0
    if out.valuation < floor:
        raise NotClosedError("commutator left the Z_p-span of (I, h, w, v)")
    return out


# --- series ----------------------------------------------------------------

def _series_length(e, p: int, target, log_series: bool = False) -> int:
    """Number of terms after which every term has valuation >= target.

    Terms are bounded below by k*e - (k-1)/(p-1) (exponential) or
    k*e - log_p(k) (logarithm); both bounds increase once k*e dominates.
    """
    if target == INF:
        raise PrecisionError("series evaluation needs a finite target precision")
    e = Fraction(e)
    k = 1
    while True:
        if log_series:
            lower = k * e - Fraction(math.floor(math.log(k, p) + 1e-9))
        else:
            lower = k * e - Fraction(k - 1, p - 1)
        if lower >= target and k > 1:
            return k
        k += 1


def _finite(x: PadicScalar, prec) -> PadicScalar:
    return x.with_prec(prec) if x.prec == INF else x


def quat_exp(z: Quat, prec=None) -> Quat:
    """exp(z) for z with coordinate valuation >= 1/2."""
    params = z.params
    e = z.coord_valuation
    if e == INF:
        return Quat.one(params)
    if e < Fraction(1, 2):
        raise ValueError("exp diverges: coordinate valuation below 1/2")
    target = min(z.prec, params.prec if prec is None else prec)
    if target == INF:
        target = params.prec
    z = z.with_prec(target)
    K = _series_length(e, params.p, target)
    total = Quat.one(params)
    term = Quat.one(params)
    for k in range(1, K + 1):
        term = (term * z) / k
        total = total + term
    return total


def quat_log(g: Quat, prec=None) -> Quat:
    """log(g) for g in U^1_D."""
    params = g.params
    y = g - 1
    e = y.coord_valuation
    if e == INF:
        return Quat.zero(params)
    if e < Fraction(1, 2):
        raise ValueError("log diverges: element not in U^1_D")
    target = min(y.prec, params.prec if prec is None else prec)
    if target == INF:
        target = params.prec
    y = y.with_prec(target)
    K = _series_length(e, params.p, target, log_series=True)
    total = Quat.zero(params)
    power = Quat.one(params)
    for k in range(1, K + 1):
        power = power * y
        term = power / k
        total = total + term if k % 2 else total - term
    return total


def log_u2(g: Quat) -> LieVec:
    """log(g)/p in the (I, h, w, v) basis, for g in U^2_D."""
    if not in_principal(g, 2):
        raise NotInSubgroupError("element is not in U^2_D")
    return LieVec.from_quat(quat_log(g)).shift(-1)


def exp_g(x: LieVec, params: AlgebraParams) -> Quat:
    """exp(p*x) for x in g_D; lands in U^2_D."""
    if x.valuation < 0:
        raise ValueError("coordinates must lie in Z_p")
    return quat_exp(x.to_quat(params).shift(1))


# --- closed forms along one direction -----------------------------------------

def hyperbolic_pair(y: PadicScalar, kappa: int, prec) -> tuple[PadicScalar, PadicScalar]:
    """(C, S) with C = sum kappa^j y^2j/(2j)!, S = sum kappa^j y^(2j+1)/(2j+1)!.

    For X with X^2 = kappa (X = tau gives kappa = iota, X = v gives
    kappa = -p*iota) one has exp(y X) = C + S X.
    """
    p = y.p
    if y.is_exact_zero():
        return PadicScalar.exact(p, 1), PadicScalar.zero(p)
    e = y.valuation
    if e == INF:
        return PadicScalar.exact(p, 1), PadicScalar.zero(p, y.prec)
    if e < 1:
        raise ValueError("argument must lie in pZ_p")
    target = min(y.prec, prec)
    y = y.with_prec(target)
    K = _series_length(e, p, target)
    C = PadicScalar.exact(p, 1)
    S = PadicScalar.zero(p)
    term = PadicScalar.exact(p, 1)  # y^k / k! * kappa^floor(k/2)
    for k in range(1, K + 1):
        term = term * y / k
        if k % 2 == 0:
            term = term * kappa
            C = C + term
        else:
            S = S + term
    return C, S


def solve_sinh(z: PadicScalar, kappa: int, prec) -> PadicScalar:
    """The y in pZ_p with S_kappa(y) = z (Newton iteration, C_kappa is the derivative)."""
    p = z.p
    if z.is_exact_zero():
        return PadicScalar.zero(p)
    target = min(z.prec, prec)
    if z.valuation == INF:
        return PadicScalar.zero(p, target)
    if z.valuation < 1:
        raise NotInSubgroupError("coordinate outside pZ_p")
    y = z.with_prec(target)
    for _ in range(4 * int(math.log2(max(target, 2))) + 8):
        C, S = hyperbolic_pair(y, kappa, target)
        err = S - z
        if err.is_zero():
            return y
        y = y - err / C
    raise PrecisionError("Newton iteration for the inverse series did not converge")  # pragma: no cover


@dataclass(frozen=True)
class SecondKindCoords:
    """g = exp(c_w w) exp(c_v v) exp(c_h h) exp(c_I I), every coordinate in pZ_p."""

    c_w: PadicScalar
    c_v: PadicScalar
    c_h: PadicScalar
    c_I: PadicScalar

    @property
    def n_w(self):
        return self.c_w.valuation

    @property
    def n_v(self):
        return self.c_v.valuation

    @property
    def c_w_unit(self) -> PadicScalar:
        return self.c_w.shift(-self.c_w.val) if not self.c_w.is_zero() else self.c_w

    @property
    def c_v_unit(self) -> PadicScalar:
        return self.c_v.shift(-self.c_v.val) if not self.c_v.is_zero() else self.c_v

    def as_tuple(self) -> tuple:
        return (self.c_w, self.c_v, self.c_h, self.c_I)

    @classmethod
    def from_ints(cls, p: int, c_w: int, c_v: int, c_h: int = 0, c_I: int = 0, prec=INF) -> "SecondKindCoords":
        # the integer 0 is an exact zero whatever the working precision
        return cls(*(PadicScalar.from_int(p, c, prec) if c else PadicScalar.exact(p, 0) for c in (c_w, c_v, c_h, c_I)))

    @classmethod
    def random(cls, params: AlgebraParams, rng: random.Random) -> "SecondKindCoords":
        return cls(*(PadicScalar.random(params.p, params.prec, rng, 1) for _ in range(4)))

    def __eq__(self, other):
        return isinstance(other, SecondKindCoords) and all(
            x == y for x, y in zip(self.as_tuple(), other.as_tuple()))

    __hash__ = None


def _direction_factors(c_w: PadicScalar, c_v: PadicScalar, params: AlgebraParams, prec):
    p, iota = params.p, params.iota
    alpha, beta = hyperbolic_pair(c_w, iota, prec)
    gamma, delta = hyperbolic_pair(c_v, -p * iota, prec)
    return alpha, beta, gamma, delta


def _wv_part(c_w, c_v, params, prec) -> Quat:
    """exp(c_w w) exp(c_v v) = A + B tau."""
    alpha, beta, gamma, delta = _direction_factors(c_w, c_v, params, prec)
    A = ExtScalar(alpha * gamma, -(beta * delta) * params.iota)
    B = ExtScalar(beta * gamma, alpha * delta)
    return Quat(A, B, params)


def _torus(c_h: PadicScalar, c_I: PadicScalar, params: AlgebraParams, prec) -> Quat:
    """exp(c_h h + c_I I)."""
    return quat_exp(Quat(ExtScalar(c_I, c_h), ExtScalar.exact(params.p, 0), params), prec)


def from_second_kind(c: SecondKindCoords, params: AlgebraParams, prec=None) -> Quat:
    prec = params.prec if prec is None else prec
    return _wv_part(c.c_w, c.c_v, params, prec) * _torus(c.c_h, c.c_I, params, prec)


def _check_coords(*cs):
    for c in cs:
        if c.valuation < 1:
            raise ValueError("second-kind coordinates must lie in pZ_p")


def to_second_kind(g: Quat) -> SecondKindCoords:
    """Coordinates (c_w, c_v, c_h, c_I) with g = exp(c_w w)exp(c_v v)exp(c_h h)exp(c_I I).

    Writing g = (A + B tau) t with t in the torus K^x, the product
    a_g * b_g / Nrd(g) equals A*B, whose two components are
    S_iota(2 c_w) C_{-p iota}(2 c_v) / 2 and S_{-p iota}(2 c_v) / 2.  Both
    series are inverted by Newton's method, then t = a_g / A.
    """
    params = g.params
    if not in_principal(g, 2):
        raise NotInSubgroupError("element is not in U^2_D")
    prec = g.prec if g.prec != INF else params.prec
    p, iota = params.p, params.iota
    nrd = g.reduced_norm()
    ab = g.a * g.b / ExtScalar(nrd)
    y_v = solve_sinh(ab.b.shift(0) * 2, -p * iota, prec)
    c_v = y_v / 2
    C2v, _ = hyperbolic_pair(y_v, -p * iota, prec)
    y_w = solve_sinh(ab.a * 2 / C2v, iota, prec)
    c_w = y_w / 2
    wv = _wv_part(c_w, c_v, params, prec)
    t = g.a / wv.a
    log_t = quat_log(Quat(t, ExtScalar.exact(p, 0), params))
    c_I, c_h = log_t.a.a, log_t.a.b
    return SecondKindCoords(c_w, c_v, c_h, c_I)


def to_second_kind_peeling(g: Quat, max_iter: int | None = None) -> SecondKindCoords:
    """Same coordinates by successive peeling.

    Read a correction from log of the residual g' = (current product)^-1 g
    and fold it into the coordinates; each pass fixes at least one more
    p-adic digit.  Slow, used as an independent check of ``to_second_kind``.
    """
    params = g.params
    if not in_principal(g, 2):
        raise NotInSubgroupError("element is not in U^2_D")
    prec = g.prec if g.prec != INF else params.prec
    p = params.p
    zero = PadicScalar.zero(p)
    c = SecondKindCoords(zero, zero, zero, zero)
    max_iter = max_iter or 2 * int(prec) + 10
    for _ in range(max_iter):
        residual = from_second_kind(c, params, prec).inverse() * g
        d = quat_log(residual, prec)
        d_I, d_h, d_w, d_v = d.coords()
        if all(x.is_zero() for x in (d_I, d_h, d_w, d_v)):
            return c
        c = SecondKindCoords(c.c_w + d_w, c.c_v + d_v, c.c_h + d_h, c.c_I + d_I)
    raise PrecisionError("peeling did not converge")  # pragma: no cover


def torus_first_coords(g: Quat) -> SecondKindCoords:
    """Coordinates for the ordering g = exp(c_I I) exp(c_h h) exp(c_w w) exp(c_v v).

    With g = t (A + B tau): b_g * conj(a_g) / Nrd(g) = B conj(A), whose
    components are S_iota(2 c_w)/2 and S_{-p iota}(2 c_v) C_iota(2 c_w)/2.
    """
    params = g.params
    if not in_principal(g, 2):
        raise NotInSubgroupError("element is not in U^2_D")
    prec = g.prec if g.prec != INF else params.prec
    p, iota = params.p, params.iota
    nrd = g.reduced_norm()
    ba = g.b * g.a.conj() / ExtScalar(nrd)
    y_w = solve_sinh(ba.a * 2, iota, prec)
    C2w, _ = hyperbolic_pair(y_w, iota, prec)
    y_v = solve_sinh(ba.b * 2 / C2w, -p * iota, prec)
    c_w, c_v = y_w / 2, y_v / 2
    wv = _wv_part(c_w, c_v, params, prec)
    t = g.a / wv.a
    log_t = quat_log(Quat(t, ExtScalar.exact(p, 0), params))
    return SecondKindCoords(c_w, c_v, log_t.a.b, log_t.a.a)


def from_torus_first(c: SecondKindCoords, params: AlgebraParams, prec=None) -> Quat:
    prec = params.prec if prec is None else prec
    return _torus(c.c_h, c.c_I, params, prec) * _wv_part(c.c_w, c.c_v, params, prec)
