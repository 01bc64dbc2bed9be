"""Fixed-precision arithmetic in Q_p and in the ramified extension Q_p(sqrt p).

Values carry an absolute precision: a ``PadicScalar`` with ``prec = k`` is
known modulo ``p**k``.  Multiplication preserves relative precision, addition
keeps the smaller absolute precision, and division by ``p**j`` costs ``j``
digits of absolute precision.  An *exact* zero (``prec = inf``) is kept apart
from a value that merely vanishes at its working precision.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from functools import lru_cache

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when an operation has no meaningful answer at working precision."""


@lru_cache(maxsize=None)
def ppow(p: int, k: int) -> int:
    return p**k


def vp_int(p: int, n: int) -> int | float:
    """p-adic valuation of a Python integer (``inf`` for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_factorial(p: int, n: int) -> int:
    """Legendre's formula for v_p(n!)."""
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def check_prime(p: int) -> None:
    if not isinstance(p, int) or p < 5 or not is_probable_prime(p):
        raise ValueError(f"p must be a prime >= 5, got {p!r}")


class PadicScalar:
    """An element ``p**val * unit + O(p**prec)`` of Q_p.

    ``prec = inf`` marks an exact value (an exact zero, or ``p**val`` times an
    exact integer unit).  Exact values arise from integer literals; anything
    that needs a modular inverse of a non-trivial unit becomes inexact.
    """

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p: int, val, unit: int, prec):
        self.p = p
        self.val = val
        self.unit = unit
        self.prec = prec

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, p: int, prec=INF) -> "PadicScalar":
        return cls(p, prec, 0, prec)

    @classmethod
    def exact(cls, p: int, n: int) -> "PadicScalar":
        """The integer ``n`` with no precision loss."""
        if n == 0:
            return cls.zero(p)
        v = vp_int(p, n)
        return cls(p, v, n // ppow(p, v), INF)

    @classmethod
    def from_int(cls, p: int, n: int, prec) -> "PadicScalar":
        """``n`` known modulo ``p**prec``."""
        if prec == INF:
            return cls.exact(p, n)
        if n == 0:
            return cls.zero(p, prec)
        v = vp_int(p, n)
        if v >= prec:
            return cls.zero(p, prec)
        u = n // ppow(p, v)
        return cls(p, v, u % ppow(p, prec - v), prec)

    @classmethod
    def from_rational(cls, p: int, q, prec) -> "PadicScalar":
        q = Fraction(q)
        if q.denominator == 1 and prec == INF:
            return cls.exact(p, q.numerator)
        if prec == INF:
            raise PrecisionError("a non-integral rational needs a finite precision")
        if q == 0:
            return cls.zero(p, prec)
        vn, vd = vp_int(p, q.numerator), vp_int(p, q.denominator)
        v = vn - vd
        if v >= prec:
            return cls.zero(p, prec)
        mod = ppow(p, prec - v)
        num = q.numerator // ppow(p, vn)
        den = q.denominator // ppow(p, vd)
        return cls(p, v, num * pow(den, -1, mod) % mod, prec)

    @classmethod
    def with_relprec(cls, p: int, q, rel: int) -> "PadicScalar":
        """``q`` with ``rel`` significant digits; exact zero for ``q == 0``."""
        q = Fraction(q)
        if q == 0:
            return cls.zero(p)
        v = vp_int(p, q.numerator) - vp_int(p, q.denominator)
        return cls.from_rational(p, q, v + rel)

    @classmethod
    def random(cls, p: int, prec: int, rng: random.Random, minval: int = 0) -> "PadicScalar":
        """Uniform sample from ``p**minval * Z_p`` at absolute precision ``prec``."""
        n = rng.randrange(ppow(p, prec - minval)) * ppow(p, minval)
        return cls.from_int(p, n, prec)

    # predicates / accessors ----------------------------------------------
    def is_zero(self) -> bool:
        return self.unit == 0

    def is_exact(self) -> bool:
        return self.prec == INF

    def is_exact_zero(self) -> bool:
        return self.unit == 0 and self.prec == INF

    @property
    def valuation(self):
        return INF if self.unit == 0 else self.val

    @property
    def relprec(self):
        return self.prec - self.val

    def lift(self) -> Fraction:
        """A rational representative of the value."""
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def residue(self, k: int) -> int:
        """The integer in [0, p**k) congruent to the value (needs val >= 0, prec >= k)."""
        if self.prec < k:
            raise PrecisionError("residue requested beyond working precision")
        if self.unit == 0 or self.val >= k:
            return 0
        if self.val < 0:
            raise ValueError("value is not integral")
        return self.unit * ppow(self.p, self.val) % ppow(self.p, k)

    def _like(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            if other.p != self.p:
                raise ValueError("mismatched primes")
            return other
        if isinstance(other, int):
            return PadicScalar.exact(self.p, other)
        if isinstance(other, Fraction):
            if other.denominator == 1:
                return PadicScalar.exact(self.p, other.numerator)
            v = vp_int(self.p, other.numerator) - vp_int(self.p, other.denominator)
            rel = self.relprec if self.unit and self.prec != INF else None
            if rel is None:
                raise PrecisionError("cannot coerce a rational next to an exact value")
            return PadicScalar.from_rational(self.p, other, v + rel)
        return NotImplemented

    def with_prec(self, prec) -> "PadicScalar":
        """Truncate to a lower absolute precision."""
        if prec >= self.prec:
            return self
        if self.unit == 0 or self.val >= prec:
            return PadicScalar.zero(self.p, prec)
        return PadicScalar(self.p, self.val, self.unit % ppow(self.p, prec - self.val), prec)

    # arithmetic -----------------------------------------------------------
    def __neg__(self):
        if self.unit == 0:
            return self
        if self.prec == INF:
            return PadicScalar(self.p, self.val, -self.unit, INF)
        return PadicScalar(self.p, self.val, (-self.unit) % ppow(self.p, self.prec - self.val), self.prec)

    def __add__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return other
        p = self.p
        prec = min(self.prec, other.prec)
        if self.unit == 0:
            return other.with_prec(prec)
        if other.unit == 0:
            return self.with_prec(prec)
        e = min(self.val, other.val)
        if e >= prec:
            return PadicScalar.zero(p, prec)
        s = self.unit * ppow(p, self.val - e) + other.unit * ppow(p, other.val - e)
        if prec != INF:
            s %= ppow(p, prec - e)
        if s == 0:
            return PadicScalar.zero(p, prec)
        k = 0
        while s % p == 0:
            s //= p
            k += 1
        return PadicScalar(p, e + k, s, prec)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return other
        p = self.p
        if self.unit == 0 or other.unit == 0:
            if self.is_exact_zero() or other.is_exact_zero():
                return PadicScalar.zero(p)
            # O(p^a) * y  ->  O(p^(a + v(y)))
            return PadicScalar.zero(p, min(self.val + other.val, self.prec + other.val, other.prec + self.val))
        val = self.val + other.val
        rel = min(self.prec - self.val, other.prec - other.val)
        if rel == INF:
            return PadicScalar(p, val, self.unit * other.unit, INF)
        return PadicScalar(p, val, self.unit * other.unit % ppow(p, rel), val + rel)

    __rmul__ = __mul__

    def inverse(self, relprec=None) -> "PadicScalar":
        """Multiplicative inverse; exact values need ``relprec`` unless their unit is +-1."""
        if self.unit == 0:
            raise PrecisionError("precision-indeterminate: inverting a value that is zero at working precision")
        rel = self.prec - self.val
        if rel == INF:
            if self.unit in (1, -1):
                return PadicScalar(self.p, -self.val, self.unit, INF)
            if relprec is None:
                raise PrecisionError("inverse of an exact value needs an explicit relative precision")
            rel = relprec
        return PadicScalar(self.p, -self.val, pow(self.unit, -1, ppow(self.p, rel)), rel - self.val)

    def __truediv__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            if other.is_zero():
                raise PrecisionError("precision-indeterminate: division by a value that is zero at working precision")
            return self if self.prec == INF else PadicScalar.zero(self.p, self.prec - other.val)
        rel = self.relprec if self.unit and self.prec != INF else None
        return self * other.inverse(rel)

    def __rtruediv__(self, other):
        other = self._like(other)
        return other / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = PadicScalar.exact(self.p, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "PadicScalar":
        """Multiply by ``p**k`` exactly."""
        if self.unit == 0:
            return self if self.prec == INF else PadicScalar.zero(self.p, self.prec + k)
        return PadicScalar(self.p, self.val + k, self.unit, self.prec + k)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, ExtScalar):
            return other == self
        other = self._like(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.unit == 0:
            return "0" if self.prec == INF else f"O({self.p}^{self.prec})"
        if self.prec == INF:
            return str(self.lift())
        return f"{self.lift()} + O({self.p}^{self.prec})"


class ExtScalar:
    """``a + b*sqrt(p)`` with ``a, b`` in Q_p; valuations live in (1/2)Z."""

    __slots__ = ("a", "b")

    def __init__(self, a: PadicScalar, b: PadicScalar | None = None):
        self.a = a
        self.b = PadicScalar.zero(a.p) if b is None else b

    @property
    def p(self) -> int:
        return self.a.p

    @classmethod
    def exact(cls, p: int, n: int, m: int = 0) -> "ExtScalar":
        """The exact element ``n + m*sqrt(p)``."""
        return cls(PadicScalar.exact(p, n), PadicScalar.exact(p, m))

    @classmethod
    def from_int(cls, p: int, n: int, prec) -> "ExtScalar":
        return cls(PadicScalar.from_int(p, n, prec))

    @classmethod
    def from_rational(cls, p: int, q, prec) -> "ExtScalar":
        return cls(PadicScalar.from_rational(p, q, prec))

    @classmethod
    def zero(cls, p: int, prec=INF) -> "ExtScalar":
        return cls(PadicScalar.zero(p, prec), PadicScalar.zero(p, prec))

    @classmethod
    def sqrt_p(cls, p: int) -> "ExtScalar":
        return cls.exact(p, 0, 1)

    @classmethod
    def random(cls, p: int, prec: int, rng: random.Random) -> "ExtScalar":
        """Uniform sample from Z_p[sqrt p] with both coordinates known mod p**prec."""
        return cls(PadicScalar.random(p, prec, rng), PadicScalar.random(p, prec, rng))

    def _like(self, other):
        if isinstance(other, ExtScalar):
            return other
        if isinstance(other, PadicScalar):
            return ExtScalar(other)
        if isinstance(other, (int, Fraction)):
            ref = self.a if self.a.unit else self.b
            return ExtScalar(ref._like(other))
        return NotImplemented

    @property
    def valuation(self):
        """v_p(x) in (1/2)Z, or ``inf`` when x vanishes at its precision."""
        va, vb = self.a.valuation, self.b.valuation
        if vb != INF:
            vb = Fraction(2 * vb + 1, 2)
        return min(va, vb)

    @property
    def prec(self):
        """Absolute precision, measured by valuation in (1/2)Z."""
        pb = self.b.prec
        if pb != INF:
            pb = Fraction(2 * pb + 1, 2)
        return min(self.a.prec, pb)

    def is_zero(self) -> bool:
        return self.a.unit == 0 and self.b.unit == 0

    def is_exact_zero(self) -> bool:
        return self.a.is_exact_zero() and self.b.is_exact_zero()

    def conj(self) -> "ExtScalar":
        return ExtScalar(self.a, -self.b)

    def norm(self) -> PadicScalar:
        """Field norm ``a^2 - p b^2``."""
        return self.a * self.a - (self.b * self.b).shift(1)

    def __neg__(self):
        return ExtScalar(-self.a, -self.b)

    def __add__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return other
        return ExtScalar(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return other
        return ExtScalar(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PadicScalar):
            return ExtScalar(self.a * other, self.b * other)
        if isinstance(other, int):
            return ExtScalar(self.a * other, self.b * other)
        other = self._like(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self.a, self.b, other.a, other.b
        if b.unit == 0 and d.unit == 0 and b.prec == INF and d.prec == INF:
            return ExtScalar(a * c)
        return ExtScalar(a * c + (b * d).shift(1), a * d + b * c)

    __rmul__ = __mul__

    def inverse(self, relprec=None) -> "ExtScalar":
        n = self.norm()
        if n.is_zero():
            raise PrecisionError("precision-indeterminate: inverting a value that is zero at working precision")
        ninv = n.inverse(relprec)
        return ExtScalar(self.a * ninv, -(self.b * ninv))

    def __truediv__(self, other):
        if isinstance(other, (PadicScalar, int, Fraction)) and self.is_zero():
            return ExtScalar(self.a / other, self.b / other)
        if isinstance(other, (PadicScalar, int, Fraction)):
            other = self.a._like(other) if not isinstance(other, PadicScalar) else other
            rel = None
            if not self.is_zero() and self.prec != INF:
                rel = max(int(self.prec - self.valuation) + 1, 1)
            return self * other.inverse(rel)
        other = self._like(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._like(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = ExtScalar.exact(self.p, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift(self, k: int) -> "ExtScalar":
        """Multiply by ``p**k`` exactly."""
        return ExtScalar(self.a.shift(k), self.b.shift(k))

    def times_sqrt_p(self) -> "ExtScalar":
        return ExtScalar(self.b.shift(1), self.a)

    def with_prec(self, prec) -> "ExtScalar":
        """Truncate so that the value is known modulo p**prec (prec in (1/2)Z)."""
        if prec == INF:
            return self
        prec = Fraction(prec)
        return ExtScalar(self.a.with_prec(math.ceil(prec)), self.b.with_prec(math.ceil(prec - Fraction(1, 2))))

    def __eq__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.b.is_exact_zero():
            return repr(self.a)
        return f"({self.a!r}) + ({self.b!r})*sqrt({self.p})"


def val(x):
    """v_p of a PadicScalar or ExtScalar (``inf`` when zero at precision)."""
    if isinstance(x, (PadicScalar, ExtScalar)):
        return x.valuation
    raise TypeError(f"cannot take the valuation of {type(x).__name__}")


def padic_binomial(lam: PadicScalar, k: int) -> PadicScalar:
    """``lam (lam-1) ... (lam-k+1) / k!`` for ``lam`` in Z_p.

    For an inexact ``lam`` the result loses at most ``v_p(k!)`` digits of
    absolute precision; an exact integer ``lam`` gives an exact result.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if lam.valuation < 0:
        raise ValueError("binomial needs lam in Z_p")
    p = lam.p
    if k == 0:
        return PadicScalar.exact(p, 1)
    if lam.prec == INF:
        return PadicScalar.exact(p, _int_binomial(int(lam.lift()), k))
    num = PadicScalar.exact(p, 1)
    for i in range(k):
        num = num * (lam - i)
    v = vp_factorial(p, k)
    unit = math.factorial(k) // ppow(p, v)
    if num.is_zero():
        return PadicScalar.zero(p, num.prec - v)
    rel = num.relprec
    return PadicScalar(p, num.val - v, num.unit * pow(unit, -1, ppow(p, rel)) % ppow(p, rel), num.prec - v)


def _int_binomial(n: int, k: int) -> int:
    if n >= 0:
        return math.comb(n, k)
    # C(-m, k) = (-1)^k C(m + k - 1, k)
    return (-1) ** k * math.comb(-n + k - 1, k)
