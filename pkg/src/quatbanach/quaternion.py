"""The quaternion division algebra D = K + K*tau over Q_p, with K = Q_p(sqrt p).

Elements are ``a + b*tau`` with ``tau**2 = iota`` (a non-square unit) and
``tau*x = conj(x)*tau`` for ``x`` in K.  ``embed`` realises D inside
M_2(K) as ``a + b tau -> [[a, iota*b], [conj(b), conj(a)]]``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .padic import INF, ExtScalar, PadicScalar, PrecisionError, check_prime


class NotInSubgroupError(ValueError):
    """A group element failed a congruence-subgroup precondition."""


def smallest_nonresidue(p: int) -> int:
    for n in range(2, p):
        if pow(n, (p - 1) // 2, p) == p - 1:
            return n
    raise ValueError(f"no quadratic non-residue mod {p}")


@dataclass(frozen=True)
class AlgebraParams:
    p: int
    iota: int | None = None
    prec: int = 50

    def __post_init__(self):
        check_prime(self.p)
        if self.iota is None:
            object.__setattr__(self, "iota", smallest_nonresidue(self.p))
        if self.iota % self.p == 0 or pow(self.iota, (self.p - 1) // 2, self.p) != self.p - 1:
            raise ValueError(f"iota={self.iota} must be a quadratic non-residue mod {self.p}")
        if self.prec < 2:
            raise ValueError("precision must be at least 2")

    def scalar(self, n) -> PadicScalar:
        """An integer or rational at the working precision."""
        return PadicScalar.from_rational(self.p, Fraction(n), self.prec)

    def ext(self, n, m=0) -> ExtScalar:
        return ExtScalar(self.scalar(n), self.scalar(m))


class Mat2:
    """A 2x2 matrix over Q_p(sqrt p)."""

    __slots__ = ("m",)

    def __init__(self, m00, m01, m10, m11):
        self.m = (m00, m01, m10, m11)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x + y for x, y in zip(self.m, other.m)))

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(*(x - y for x, y in zip(self.m, other.m)))

    def __mul__(self, other: "Mat2") -> "Mat2":
        a, b, c, d = self.m
        e, f, g, h = other.m
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def det(self) -> ExtScalar:
        a, b, c, d = self.m
        return a * d - b * c

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.m)

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        a, b, c, d = self.m
        return f"[[{a!r}, {b!r}], [{c!r}, {d!r}]]"


class Quat:
    """``a + b*tau`` in D."""

    __slots__ = ("a", "b", "params")

    def __init__(self, a: ExtScalar, b: ExtScalar, params: AlgebraParams):
        self.a = a
        self.b = b
        self.params = params

    # constructors -------------------------------------------------------
    @classmethod
    def one(cls, params: AlgebraParams) -> "Quat":
        return cls(ExtScalar.exact(params.p, 1), ExtScalar.exact(params.p, 0), params)

    @classmethod
    def zero(cls, params: AlgebraParams) -> "Quat":
        return cls(ExtScalar.exact(params.p, 0), ExtScalar.exact(params.p, 0), params)

    @classmethod
    def tau(cls, params: AlgebraParams) -> "Quat":
        return cls(ExtScalar.exact(params.p, 0), ExtScalar.exact(params.p, 1), params)

    @classmethod
    def uniformizer(cls, params: AlgebraParams) -> "Quat":
        """sqrt(pI), the preimage of diag(sqrt p, -sqrt p)."""
        return cls(ExtScalar.sqrt_p(params.p), ExtScalar.exact(params.p, 0), params)

    @classmethod
    def from_coords(cls, params: AlgebraParams, c_i, c_h, c_w, c_v) -> "Quat":
        """``c_i + c_h*sqrt(p) + (c_w + c_v*sqrt(p))*tau``, the Lie-basis coordinates."""
        return cls(ExtScalar(c_i, c_h), ExtScalar(c_w, c_v), params)

    @classmethod
    def random_order(cls, params: AlgebraParams, rng: random.Random, minval: int = 0) -> "Quat":
        """Uniform sample from p**minval * O_D."""
        p, N = params.p, params.prec
        cs = [PadicScalar.random(p, N, rng, minval) for _ in range(4)]
        return cls.from_coords(params, *cs)

    def coords(self) -> tuple[PadicScalar, PadicScalar, PadicScalar, PadicScalar]:
        """(c_I, c_h, c_w, c_v): components along 1, sqrt p, tau, sqrt(p) tau."""
        return (self.a.a, self.a.b, self.b.a, self.b.b)

    # ring structure -------------------------------------------------------
    def _lift(self, other) -> "Quat":
        if isinstance(other, Quat):
            return other
        if isinstance(other, (int, Fraction, PadicScalar, ExtScalar)):
            return Quat(self.a._like(other) if not isinstance(other, ExtScalar) else other,
                        ExtScalar.exact(self.params.p, 0), self.params)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        return Quat(self.a + other.a, self.b + other.b, self.params)

    __radd__ = __add__

    def __neg__(self):
        return Quat(-self.a, -self.b, self.params)

    def __sub__(self, other):
        other = self._lift(other)
        return Quat(self.a - other.a, self.b - other.b, self.params)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (PadicScalar, int)):
            return Quat(self.a * other, self.b * other, self.params)
        other = self._lift(other)
        a, b, c, d = self.a, self.b, other.a, other.b
        # (a + b tau)(c + d tau) = (ac + iota b conj(d)) + (ad + b conj(c)) tau
        return Quat(a * c + b * d.conj() * self.params.iota, a * d + b * c.conj(), self.params)

    def __rmul__(self, other):
        if isinstance(other, (PadicScalar, int)):
            return Quat(self.a * other, self.b * other, self.params)
        return self._lift(other) * self

    def __truediv__(self, k):
        if isinstance(k, Quat):
            return self * k.inverse()
        if k == 1:
            return self
        return Quat(self.a / k, self.b / k, self.params)

    def scale(self, s: ExtScalar | PadicScalar) -> "Quat":
        """Left multiplication by a scalar of K."""
        return Quat(self.a * s, self.b * s, self.params)

    def relift(self, prec: int) -> "Quat":
        """Same representative, re-declared at absolute precision ``prec``.

        Only for internal iterations whose final precision is set explicitly.
        """
        p = self.params.p
        cs = [PadicScalar.from_rational(p, c.lift(), prec) for c in self.coords()]
        return Quat.from_coords(self.params, *cs)

    def reduced_norm(self) -> PadicScalar:
        """det(embed(q)) = N(a) - iota N(b), an element of Q_p."""
        return self.a.norm() - self.b.norm() * self.params.iota

    def conj(self) -> "Quat":
        """The canonical involution: embed(conj q) is the adjugate of embed(q)."""
        return Quat(self.a.conj(), -self.b, self.params)

    def inverse(self) -> "Quat":
        n = self.reduced_norm()
        if n.is_zero():
            raise PrecisionError("precision-indeterminate: quaternion is zero at working precision")
        rel = None if n.prec != INF else self.params.prec
        ninv = n.inverse(rel)
        c = self.conj()
        return Quat(c.a * ninv, c.b * ninv, self.params)

    def __pow__(self, k: int) -> "Quat":
        if k < 0:
            return self.inverse() ** (-k)
        result = Quat.one(self.params)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "Quat":
        return Quat(self.a.shift(k), self.b.shift(k), self.params)

    def with_prec(self, prec) -> "Quat":
        return Quat(self.a.with_prec(prec), self.b.with_prec(prec), self.params)

    # valuation ------------------------------------------------------------
    @property
    def coord_valuation(self):
        """min over the four Q_p coordinates of v_p, with the sqrt p ones offset by 1/2."""
        return min(self.a.valuation, self.b.valuation)

    @property
    def prec(self):
        return min(self.a.prec, self.b.prec)

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()

    def __eq__(self, other):
        other = self._lift(other)
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"Quat({self.a!r}, {self.b!r})"


def embed(q: Quat) -> Mat2:
    """a + b tau  ->  [[a, iota b], [conj b, conj a]]."""
    return Mat2(q.a, q.b * q.params.iota, q.b.conj(), q.a.conj())


def v_D(q: Quat):
    """v_p(det embed(q)); ``inf`` when q vanishes at working precision."""
    n = q.reduced_norm()
    return n.valuation


def in_principal(q: Quat, n: int) -> bool:
    """Membership of q in U^n_D = 1 + (sqrt pI)^n O_D.

    Decided coordinate-wise: v_D(x) = 2 * min(v(a), v(b)) for x = a + b tau,
    so q - 1 must have every coordinate valuation >= n/2.
    """
    if n < 1:
        raise ValueError("level n must be >= 1")
    d = q - 1
    need = Fraction(n, 2)
    if d.is_zero() and d.prec < need:
        raise PrecisionError(f"membership in U^{n} is indeterminate at working precision")
    return d.coord_valuation >= need


def require_principal(q: Quat, n: int) -> None:
    if not in_principal(q, n):
        raise NotInSubgroupError(f"element is not in U^{n}_D")


def pth_root_in_lower(q: Quat, n: int, max_iter: int | None = None) -> Quat:
    """r in U^{2n}_D with r**p == q, for q in U^{2(n+1)}_D.

    Successive approximation: starting from r = 1 + (q - 1)/p, correct by
    r <- r * (1 + (r**-p * q - 1)/p); each pass raises the congruence level of
    the error by at least one.
    """
    if n < 1:
        raise ValueError("level n must be >= 1")
    if not in_principal(q, 2 * (n + 1)):
        raise NotInSubgroupError(f"element is not in U^{2 * (n + 1)}_D")
    p = q.params.p
    target = q.prec
    if max_iter is None:
        max_iter = 2 * int(min(target, 10**6)) + 10
    if target == INF:
        raise PrecisionError("p-th root needs a finite working precision")
    work = int(target) + 2
    r = (Quat.one(q.params) + (q - 1).shift(-1)).relift(work)
    for _ in range(max_iter):
        err = r.inverse() ** p * q - 1
        if err.is_zero():
            break
        r = (r * (Quat.one(q.params) + err.shift(-1))).relift(work)
    else:  # pragma: no cover - convergence is guaranteed for p >= 5
        raise PrecisionError("p-th root iteration did not converge")
    return r.with_prec(int(target) - 1)
