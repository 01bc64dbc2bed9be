"""The weight module W_{lambda,chi} on the basis {w^m * 1, w^m v * 1}.

W is the quotient of U(g_D) by the left ideal generated by h - lambda(h),
I - lambda(I) and Delta - chi(Delta).  Three independent routes compute in it:

* ``reduce``: PBW normal forms, substitution of h, I and rewriting of v^2
  through the Casimir.  Slow; used as the oracle.
* ``act``: letter actions on the (w^m, w^m v) basis through the recurrences
  h w^m = w (h w^(m-1)) + 2 v w^(m-1) and v w^m = w (v w^(m-1)) + 2 iota h w^(m-1).
* the exponential images, computed in the h-eigenbasis u_k = e^k*1,
  u_-k = f^k*1 with e = sqrt(p) w + v, f = sqrt(p) w - v.  There e and f act
  by shifts times explicit scalars, so v^j*1 costs O(j).  The lattice spanned
  by (sqrt(p) w)^m * 1 and (sqrt(p) w)^m v * 1 is also spanned by the u_k with
  a unimodular change of basis, so coordinates are recovered by an exact
  triangular back-substitution.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .enveloping import EnvelopingAlgebra, PBWPoly
from .lie import SecondKindCoords, hyperbolic_pair
from .padic import INF, ExtScalar, PadicScalar, PrecisionError, ppow, vp_factorial, vp_int
from .quaternion import AlgebraParams


# --- characters ------------------------------------------------------------

@dataclass(frozen=True)
class WeightChar:
    """lambda on t_D = Z_p I + Z_p h, given by (lambda(I), lambda(h))."""

    lam_I: PadicScalar
    lam_h: PadicScalar

    def __post_init__(self):
        if self.lam_I.valuation < 0 or self.lam_h.valuation < 0:
            raise ValueError("weight values must lie in Z_p")

    @classmethod
    def from_ints(cls, p: int, lam_I: int, lam_h: int) -> "WeightChar":
        return cls(PadicScalar.exact(p, lam_I), PadicScalar.exact(p, lam_h))

    @property
    def generic(self) -> bool:
        # Heuristic: finite-dimensional weights pair with h in sqrt(p) Z, which
        # meets Z_p only at 0.  Gates nothing numerically.
        return not self.lam_h.is_zero()


@dataclass(frozen=True)
class InfChar:
    """chi on the centre, determined by chi(Delta)."""

    chi: ExtScalar

    def __post_init__(self):
        if self.chi.valuation < 0:
            raise ValueError("chi(Delta) must be integral")

    @classmethod
    def from_int(cls, p: int, chi: int) -> "InfChar":
        return cls(ExtScalar.exact(p, chi))


# --- elements ----------------------------------------------------------------

def _fmt_val(v) -> str:
    if v == INF:
        return "inf"
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else str(float(v))


@dataclass(frozen=True)
class ProfileRow:
    m: int
    val_a: object
    val_b: object
    censored: bool

    def as_dict(self) -> dict:
        return {"m": self.m, "val_a": _fmt_val(self.val_a), "val_b": _fmt_val(self.val_b),
                "censored": self.censored}


class WElement:
    """sum_m a_m w^m + sum_m b_m w^m v, truncated at degree index M.

    ``basis`` is "D" for the (w^m, w^m v) basis and "GL2" for (w_0^m, w_0^m v_0).
    """

    __slots__ = ("a", "b", "p", "basis")

    def __init__(self, a, b, p: int, basis: str = "D"):
        if len(a) != len(b):
            raise ValueError("coefficient arrays must have equal length")
        self.a = tuple(a)
        self.b = tuple(b)
        self.p = p
        self.basis = basis

    @property
    def M(self) -> int:
        return len(self.a) - 1

    @classmethod
    def zero(cls, p: int, M: int, basis: str = "D") -> "WElement":
        z = ExtScalar.exact(p, 0)
        return cls([z] * (M + 1), [z] * (M + 1), p, basis)

    @classmethod
    def delta(cls, p: int, M: int, basis: str = "D") -> "WElement":
        z = ExtScalar.exact(p, 0)
        return cls([ExtScalar.exact(p, 1)] + [z] * M, [z] * (M + 1), p, basis)

    def truncate(self, M: int) -> "WElement":
        z = ExtScalar.exact(self.p, 0)
        pad = max(0, M - self.M)
        return WElement(self.a[:M + 1] + (z,) * pad, self.b[:M + 1] + (z,) * pad, self.p, self.basis)

    def _check(self, other: "WElement"):
        if other.M != self.M or other.basis != self.basis:
            raise ValueError("elements have different truncation or basis")

    def __add__(self, other: "WElement") -> "WElement":
        self._check(other)
        return WElement([x + y for x, y in zip(self.a, other.a)],
                        [x + y for x, y in zip(self.b, other.b)], self.p, self.basis)

    def __sub__(self, other: "WElement") -> "WElement":
        self._check(other)
        return WElement([x - y for x, y in zip(self.a, other.a)],
                        [x - y for x, y in zip(self.b, other.b)], self.p, self.basis)

    def scale(self, s) -> "WElement":
        return WElement([x * s for x in self.a], [x * s for x in self.b], self.p, self.basis)

    def is_zero(self) -> bool:
        return all(x.is_zero() for x in self.a + self.b)

    def __eq__(self, other):
        return isinstance(other, WElement) and (self - other).is_zero()

    __hash__ = None

    @property
    def prec(self):
        return min((x.prec for x in self.a + self.b), default=INF)

    def valuation_profile(self) -> list[ProfileRow]:
        rows = []
        for m, (x, y) in enumerate(zip(self.a, self.b)):
            if x.is_exact_zero() and y.is_exact_zero() and m > 0:
                continue
            censored = (x.is_zero() and not x.is_exact_zero()) or (y.is_zero() and not y.is_exact_zero())
            rows.append(ProfileRow(m, x.valuation, y.valuation, censored))
        return rows

    def profile_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["m", "val_a", "val_b", "censored"], lineterminator="\n")
        w.writeheader()
        for r in self.valuation_profile():
            w.writerow(r.as_dict())
        return buf.getvalue()

    def profile_json(self, header: dict | None = None) -> str:
        return json.dumps({"header": header or {}, "rows": [r.as_dict() for r in self.valuation_profile()]},
                          indent=1, sort_keys=True)

    def __repr__(self):
        return f"WElement(M={self.M}, basis={self.basis})"


# --- slope test --------------------------------------------------------------

@dataclass(frozen=True)
class SlopeReport:
    slope_a: float | None
    slope_b: float | None
    censored: int
    verdict: bool


def _tail_slope(vals, lo: int, hi: int):
    """Least-squares slope of finite valuations at indices lo..hi; None if none."""
    pts = [(m, float(vals[m])) for m in range(lo, hi + 1) if vals[m] is not None and vals[m] != INF]
    if len(pts) < 2:
        return None
    xs, ys = zip(*pts)
    return statistics.linear_regression(xs, ys).slope


def slope_report(X: WElement, n: int, window: int, margin: Fraction | None = None) -> SlopeReport:
    M = X.M
    if window < 2 or window > (M + 1) // 2:
        raise ValueError("window too large (must be between 2 and M/2)")
    if margin is None:
        margin = Fraction(1, 2 * (X.p - 1))
    lo = M - window + 1
    va, vb = [], []
    for x, y in zip(X.a, X.b):
        for z, out in ((x, va), (y, vb)):
            if z.is_exact_zero():
                out.append(INF)
            elif z.is_zero():
                out.append(None)
            else:
                out.append(z.valuation)
    censored = sum(1 for m in range(lo, M + 1) for v in (va[m], vb[m]) if v is None)
    sa, sb = _tail_slope(va, lo, M), _tail_slope(vb, lo, M)
    bound = n + float(margin)
    verdict = all(s is None or s > bound for s in (sa, sb))
    return SlopeReport(sa, sb, censored, verdict)


def in_Wn(X: WElement, n: int, window: int, margin: Fraction | None = None) -> bool:
    """Tail-slope proxy for membership in W^{n,id}: both slopes exceed n + margin."""
    return slope_report(X, n, window, margin).verdict


def factorial_pval_oracle(N: int, a: int, n: int, p: int):
    """(v_p(prod_{i=0..n} (N + i a)), k + n/(p-1), holds) with p^(k-1) < N + a n <= p^k."""
    if N <= 0 or not 0 < a < p or n < 0:
        raise ValueError("need N > 0, 0 < a < p, n >= 0")
    top = N + a * n
    k = 0
    while ppow(p, k) < top:
        k += 1
    val = sum(vp_int(p, N + i * a) for i in range(n + 1))
    bound = k + Fraction(n, p - 1)
    return val, bound, val <= bound


# --- predicted valuations at m = p^k + 1 ---------------------------------------

def v_term_prediction(n_v: int, k: int, p: int) -> Fraction:
    """v_p(c_v^m p^(m/2) / (p^k)!) for m = p^k + 1 and v_p(c_v) = n_v."""
    m = ppow(p, k) + 1
    return m * n_v + Fraction(m, 2) - vp_factorial(p, ppow(p, k))


def w_term_prediction(n_w: int, k: int, p: int) -> Fraction:
    """v_p(c_w^m / (p^k)!) for m = p^k + 1 and v_p(c_w) = n_w."""
    m = ppow(p, k) + 1
    return Fraction(m * n_w - vp_factorial(p, ppow(p, k)))


def v_term_tie(n_v: int, k: int, p: int, M: int) -> bool:
    """True when a later term of the exp(c_v v) series could reach the predicted valuation.

    The a_m coefficient collects c_v^j/j! (v^j*1)_m for even j >= m; each such
    term has valuation at least j n_v - v_p(j!) + m/2 when v_p(x) >= 0.
    """
    m = ppow(p, k) + 1
    pred = v_term_prediction(n_v, k, p)
    return any(j * n_v - vp_factorial(p, j) + Fraction(m, 2) <= pred for j in range(m + 2, M + 1, 2))


# --- the e/f kernel ----------------------------------------------------------

def _pmul(x, y, p, mod):
    a, b = x
    c, d = y
    return ((a * c + p * b * d) % mod, (a * d + b * c) % mod)


class _EFKernel:
    """Exact arithmetic in the integral lattice, modulo p^K.

    Elements of Z_p[sqrt p] are pairs (a, b) = a + b sqrt(p) of ints mod p^K.
    """

    def __init__(self, p: int, s: int, iota: int, lam: tuple, chi: tuple, K: int):
        if s != p:
            raise ValueError("the eigenbasis kernel is implemented for g_D (s = p)")
        self.p, self.iota, self.K = p, iota, K
        self.mod = ppow(p, K)
        self.lam, self.chi = lam, chi
        self.inv2 = pow(2, -1, self.mod)
        self.c = [None]  # f u_k = c_k u_{k-1}, k >= 1
        self.d = [None]  # e u_-k = d_k u_{-k+1}, k >= 1
        self.vpow = [{0: (1, 0)}]  # v^j * 1 in the eigenbasis
        self.colA = [{0: (1, 0)}]  # (sqrt(p) w)^m * 1
        self.colB = []  # (sqrt(p) w)^m v * 1

    def _mu(self, k: int):
        return ((self.lam[0]) % self.mod, (self.lam[1] + 2 * k) % self.mod)

    def _coef(self, k: int, sign: int):
        p, mod, iota = self.p, self.mod, self.iota
        mu = self._mu(sign * k)
        mu2 = _pmul(mu, mu, p, mod)
        # chi - iota mu^2 + sign * 2 sqrt(p) iota mu
        t = (mu[1] * p % mod, mu[0])  # sqrt(p) * mu
        return ((self.chi[0] - iota * mu2[0] + sign * 2 * iota * t[0]) % mod,
                (self.chi[1] - iota * mu2[1] + sign * 2 * iota * t[1]) % mod)

    def _ensure_coefs(self, k: int):
        while len(self.c) <= k:
            j = len(self.c)
            self.c.append(self._coef(j, 1))
            self.d.append(self._coef(j, -1))

    def _apply(self, vec: dict, e_sign: int, f_sign: int) -> dict:
        """(e_sign * e + f_sign * f)/2 applied to an eigenbasis vector."""
        p, mod, h = self.p, self.mod, self.inv2
        out: dict = {}

        def add(k, val, s):
            a, b = out.get(k, (0, 0))
            out[k] = ((a + s * val[0]) % mod, (b + s * val[1]) % mod)

        self._ensure_coefs(max((abs(k) for k in vec), default=0) + 1)
        for k, x in vec.items():
            x = (x[0] * h % mod, x[1] * h % mod)
            if k >= 0:
                add(k + 1, x, e_sign)
                if k == 0:
                    add(-1, x, f_sign)
                else:
                    add(k - 1, _pmul(x, self.c[k], p, mod), f_sign)
            else:
                add(k - 1, x, f_sign)
                add(k + 1, _pmul(x, self.d[-k], p, mod), e_sign)
        return {k: v for k, v in out.items() if v != (0, 0)}

    def v_power(self, j: int) -> dict:
        while len(self.vpow) <= j:
            self.vpow.append(self._apply(self.vpow[-1], 1, -1))
        return self.vpow[j]

    def columns(self, J: int):
        if not self.colB:
            self.colB.append(self._apply({0: (1, 0)}, 1, -1))
        while len(self.colA) <= J:
            self.colA.append(self._apply(self.colA[-1], 1, 1))
        while len(self.colB) <= J:
            self.colB.append(self._apply(self.colB[-1], 1, 1))
        return self.colA, self.colB

    def to_lattice(self, phi: dict, J: int):
        """Back-substitute eigenbasis coordinates into (sqrt(p) w)^m and (sqrt(p) w)^m v coordinates."""
        p, mod = self.p, self.mod
        colA, colB = self.columns(J)
        # residuals are left unreduced; only the solved coordinates are reduced
        ra = {k: x[0] for k, x in phi.items()}
        rb = {k: x[1] for k, x in phi.items()}
        A = [(0, 0)] * (J + 1)
        B = [(0, 0)] * (J + 1)
        for d in range(J, 0, -1):
            two = pow(2, d - 1, mod)
            xa, xb = ra.get(d, 0), rb.get(d, 0)
            ya, yb = ra.get(-d, 0), rb.get(-d, 0)
            a = ((xa + ya) * two % mod, (xb + yb) * two % mod)
            b = ((xa - ya) * two % mod, (xb - yb) * two % mod)
            A[d] = a
            B[d - 1] = b
            for (c0, c1), col in ((a, colA[d]), (b, colB[d - 1])):
                if not (c0 or c1):
                    continue
                pc1 = p * c1
                for k, (z0, z1) in col.items():
                    ra[k] = ra.get(k, 0) - (c0 * z0 + pc1 * z1)
                    rb[k] = rb.get(k, 0) - (c0 * z1 + c1 * z0)
        A[0] = (ra.get(0, 0) % mod, rb.get(0, 0) % mod)
        return A, B


@lru_cache(maxsize=16)
def _kernel(p, s, iota, lam, chi, K) -> _EFKernel:
    return _EFKernel(p, s, iota, lam, chi, K)


def _lift_pair(x: ExtScalar, K: int) -> tuple:
    mod = ppow(x.a.p, K)
    out = []
    for c in (x.a, x.b):
        f = c.lift()
        out.append(f.numerator * pow(f.denominator, -1, mod) % mod)
    return tuple(out)


def _series_terms(c: PadicScalar, J: int):
    """(value mod p^K-ready int data) for t_j = c^j / j!: list of (val, unit int, abs prec)."""
    p = c.p
    n, u = c.val, c.unit
    rel = c.prec - n if c.prec != INF else INF
    out = []
    for j in range(J + 1):
        vf = vp_factorial(p, j)
        fj = math.factorial(j) // ppow(p, vf)
        out.append((j * n - vf, u, fj, j, rel))
    return out


def _lower_bound(n: int, p: int, j: int) -> Fraction:
    """A lower bound for v_p(c^i/i!) valid for every i >= j when v_p(c) = n >= 1."""
    return j * n - Fraction(j - 1, p - 1) if j >= 1 else Fraction(0)


# --- the module ------------------------------------------------------------

class WeightModule:
    """W_{lambda,chi} for the lattice with bracket parameter s (p for g_D, 1 on the GL_2 side)."""

    def __init__(self, params: AlgebraParams, lam: WeightChar, chi: InfChar, M: int,
                 s: int | None = None, lam_h=None, chi_val=None, basis: str = "D"):
        self.params = params
        self.p = params.p
        self.iota = params.iota
        self.s = params.p if s is None else s
        self.lam = lam
        self.chi = chi
        self.M = M
        self.basis = basis
        # lambda(h) and chi(Delta) as elements of K (the GL_2 side needs sqrt p denominators)
        self.lam_h = ExtScalar(lam.lam_h) if lam_h is None else lam_h
        self.lam_I = lam.lam_I
        self.chi_val = chi.chi if chi_val is None else chi_val
        self.alg = EnvelopingAlgebra(self.iota, self.s, degree_cap=max(48, 2 * M + 8))
        self._cols: dict = {}

    @property
    def x(self) -> ExtScalar:
        """iota lambda(h)^2 - chi(Delta): the scalar v^2 * 1 - s w^2 * 1."""
        return self.lam_h * self.lam_h * self.iota - self.chi_val

    def _zero(self):
        return ExtScalar.exact(self.p, 0)

    def _welem(self, vec: dict, M: int) -> WElement:
        z = self._zero()
        a = [vec.get((0, m), z) for m in range(M + 1)]
        b = [vec.get((1, m), z) for m in range(M + 1)]
        return WElement(a, b, self.p, self.basis)

    # reduction through PBW normal forms ------------------------------------
    def reduce(self, P: PBWPoly, M: int | None = None) -> WElement:
        """Image of P * 1 in W, by PBW normal forms and Casimir rewriting of v^2."""
        M = max(P.degree, 0) if M is None else M
        alg = self.alg
        base = PBWPoly(alg, {(0, 0, 2, 0): self.iota, (2, 0, 0, 0): self.s})  # v^2 + Delta
        work = dict(P.terms)
        out: dict = {}
        lam_h = self.lam_h
        while work:
            (a, b, c, d), k = work.popitem()
            if c or d:
                k = k * (lam_h ** c) if c else k
                k = k * (self.lam_I ** d) if d else k
            if b <= 1:
                key = (b, a)
                out[key] = out[key] + k if key in out else k
                continue
            for mono, coef in alg.mul(alg.mono(a, b - 2), base).terms.items():
                t = k * coef
                work[mono] = work[mono] + t if mono in work else t
            key = (a, b - 2, 0, 0)
            t = -(k * self.chi_val) if not isinstance(k, int) else self.chi_val * (-k)
            work[key] = work[key] + t if key in work else t
        z = self._zero()
        vec = {key: (z + v if isinstance(v, int) else v) for key, v in out.items()}
        return self._welem(vec, M)

    # letter actions through recurrences --------------------------------------
    def _column(self, letter: str, kind: int, m: int) -> dict:
        """letter * X with X = w^m * 1 (kind 0) or w^m v * 1 (kind 1), as a sparse dict."""
        key = (letter, kind, m)
        if key in self._cols:
            return self._cols[key]
        z = self._zero()
        one = ExtScalar.exact(self.p, 1)
        if letter == "w":
            res = {(kind, m + 1): one}
        elif letter == "I":
            res = {(kind, m): ExtScalar(self.lam_I)}
        elif m == 0:
            if letter == "h":
                res = {(0, 0): self.lam_h} if kind == 0 else {(1, 0): self.lam_h, (0, 1): one * (2 * self.s)}
            else:  # v
                res = {(1, 0): one} if kind == 0 else {(0, 0): self.x, (0, 2): one * self.s}
        else:
            # h w^m = w (h w^(m-1)) + 2 v w^(m-1);  v w^m = w (v w^(m-1)) + 2 iota h w^(m-1)
            prev_h = self._column("h", kind, m - 1)
            prev_v = self._column("v", kind, m - 1)
            first, second, factor = (prev_h, prev_v, 2) if letter == "h" else (prev_v, prev_h, 2 * self.iota)
            res = {}
            for (kk, mm), c in first.items():
                res[(kk, mm + 1)] = res.get((kk, mm + 1), z) + c
            for key2, c in second.items():
                res[key2] = res.get(key2, z) + c * factor
        res = {k: v for k, v in res.items() if not v.is_exact_zero()}
        self._cols[key] = res
        return res

    def act_letter(self, letter: str, X: WElement, grow: int = 1) -> WElement:
        z = self._zero()
        out: dict = {}
        for kind, arr in ((0, X.a), (1, X.b)):
            for m, c in enumerate(arr):
                if c.is_exact_zero():
                    continue
                for key, c2 in self._column(letter, kind, m).items():
                    out[key] = out.get(key, z) + c * c2
        return self._welem(out, X.M + grow)

    def act(self, P: PBWPoly, X: WElement) -> WElement:
        """P acting on X, applying letters right to left; truncation grows by deg P."""
        z = WElement.zero(self.p, X.M + max(P.degree, 0), self.basis)
        total = z
        for (a, b, c, d), k in P.terms.items():
            Y = X
            for letter, e in (("I", d), ("h", c), ("v", b), ("w", a)):
                for _ in range(e):
                    Y = self.act_letter(letter, Y)
            total = total + Y.truncate(z.M).scale(k if not isinstance(k, int) else ExtScalar.exact(self.p, k))
        return total

    # exponential images ------------------------------------------------------
    def exp_w_image(self, c_w: PadicScalar, M: int | None = None) -> WElement:
        """a_m = c_w^m / m!, b = 0."""
        M = self.M if M is None else M
        if c_w.valuation < 1 and not c_w.is_zero():
            raise ValueError("c_w must lie in pZ_p")
        z = self._zero()
        if c_w.is_exact_zero():
            return WElement.delta(self.p, M, self.basis)
        a = [ExtScalar.exact(self.p, 1)]
        term = PadicScalar.exact(self.p, 1)
        for m in range(1, M + 1):
            term = term * c_w / m
            a.append(ExtScalar(term))
        return WElement(a, [z] * (M + 1), self.p, self.basis)

    def _kernel_for(self, n: int, M: int, prec):
        p = self.p
        # absolute precision K: enough for relative precision prec at degree M
        v_top = max(n * j - vp_factorial(p, j) for j in range(M + 1))
        K = int(prec) + v_top + 2
        for c in (self.lam_h, self.chi_val):
            if c.prec != INF:
                K = min(K, int(c.prec))
        J = M
        while _lower_bound(n, p, J + 1) < K:
            J += 1
        lam = _lift_pair(self.lam_h, K)
        chi = _lift_pair(self.chi_val, K)
        return _kernel(p, self.s, self.iota, lam, chi, K), K, J

    def exp_v_image(self, c_v: PadicScalar, M: int | None = None, mode: str = "exact") -> WElement:
        """Image of exp(c_v v) * 1.

        ``mode="exact"`` sums t_j v^j * 1 with t_j = c_v^j/j! in the module.
        ``mode="scalar"`` treats x = iota lambda(h)^2 - chi(Delta) as a scalar in
        the even part, i.e. uses v^(2j) * 1 ~ (s w^2 + x)^j * 1, and keeps the
        odd part exact.
        """
        if mode not in ("exact", "scalar"):
            raise ValueError(f"unknown mode {mode!r}")
        if self.s != self.p:
            raise ValueError("exponential images are computed for g_D")
        M = self.M if M is None else M
        p = self.p
        if c_v.is_exact_zero():
            return WElement.delta(p, M, self.basis)
        if c_v.is_zero():
            raise PrecisionError("c_v is zero at working precision")
        n = c_v.val
        if n < 1:
            raise ValueError("c_v must lie in pZ_p")
        prec = self.params.prec
        ker, K, J = self._kernel_for(n, M, prec)
        mod = ker.mod
        terms = _series_terms(c_v, J)
        # t_j as ints mod p^K and their absolute precisions
        tj, tprec = [], []
        upow = 1
        for j, (v, u, fj, _, rel) in enumerate(terms):
            if j:
                upow = upow * u % mod
            val = ppow(p, v) * upow * pow(fj, -1, mod) % mod if v < K else 0
            tj.append(val)
            tprec.append(v + rel if rel != INF else INF)
        phi: dict = {}
        odd_only = mode == "scalar"
        for j in range(J + 1):
            if odd_only and j % 2 == 0:
                continue
            if tj[j] == 0:
                continue
            t = tj[j]
            for k, (z0, z1) in ker.v_power(j).items():
                a, b = phi.get(k, (0, 0))
                phi[k] = (a + t * z0, b + t * z1)
        A, B = ker.to_lattice(phi, J)
        if odd_only:
            xp = _lift_pair(self.x, K)
            xpow = [(1, 0)]
            for _ in range(J // 2 + 1):
                xpow.append(_pmul(xpow[-1], xp, p, mod))
            for j in range(0, J // 2 + 1):
                if 2 * j > J or tj[2 * j] == 0:
                    continue
                for i in range(j + 1):
                    if 2 * i > J:
                        break
                    cf = math.comb(j, i) * tj[2 * j] % mod
                    t = _pmul((cf, 0), xpow[j - i], p, mod)
                    a = A[2 * i]
                    A[2 * i] = ((a[0] + t[0]) % mod, (a[1] + t[1]) % mod)
        # absolute precision of lattice coordinates at degree m
        tail = _lower_bound(n, p, J + 1)
        suffix = [INF] * (J + 2)
        for j in range(J, -1, -1):
            suffix[j] = min(suffix[j + 1], tprec[j])
        a_out, b_out = [], []
        for m in range(M + 1):
            P_m = min(K, math.floor(tail), suffix[m] if suffix[m] == INF else math.floor(suffix[m]))
            a_out.append(self._unscale(A[m], m, P_m))
            b_out.append(self._unscale(B[m], m, P_m))
        return WElement(a_out, b_out, p, self.basis)

    def _unscale(self, pair, m: int, P) -> ExtScalar:
        """Coefficient of (sqrt(p) w)^m -> coefficient of w^m (multiply by sqrt(p)^m)."""
        p = self.p
        q, r = divmod(m, 2)
        a, b = pair
        if r:
            a, b = p * b, a
        prec = P + q
        return ExtScalar(PadicScalar.from_int(p, a * ppow(p, q), prec + r),
                         PadicScalar.from_int(p, b * ppow(p, q), prec))

    def torus_scalar(self, c_h: PadicScalar, c_I: PadicScalar) -> PadicScalar:
        """exp(c_h lambda(h) + c_I lambda(I))."""
        y = c_h * self.lam.lam_h + c_I * self.lam_I
        if y.is_exact_zero():
            return PadicScalar.exact(self.p, 1)
        C, S = hyperbolic_pair(y, 1, self.params.prec)
        return C + S

    def group_image(self, coords: SecondKindCoords, M: int | None = None, mode: str = "exact") -> WElement:
        """Image of exp(c_w w) exp(c_v v) exp(c_h h) exp(c_I I) * 1."""
        M = self.M if M is None else M
        ew = self.exp_w_image(coords.c_w, M)
        ev = self.exp_v_image(coords.c_v, M, mode)
        scal = self.torus_scalar(coords.c_h, coords.c_I)
        z = self._zero()
        wa = ew.a
        a_out, b_out = [], []
        for m in range(M + 1):
            sa, sb = z, z
            for i in range(m + 1):
                e = wa[m - i]
                if e.is_exact_zero():
                    continue
                if not ev.a[i].is_exact_zero():
                    sa = sa + e * ev.a[i]
                if not ev.b[i].is_exact_zero():
                    sb = sb + e * ev.b[i]
            a_out.append(sa * scal)
            b_out.append(sb * scal)
        return WElement(a_out, b_out, self.p, self.basis)

    def image_by_pbw(self, coords: SecondKindCoords, T: int, M: int) -> WElement:
        """Oracle: reduce the truncated product of exponential series inside the PBW engine."""
        p = self.p
        alg = self.alg
        ew = [PadicScalar.exact(p, 1)]
        ev = [PadicScalar.exact(p, 1)]
        for i in range(1, T + 1):
            ew.append(ew[-1] * coords.c_w / i)
            ev.append(ev[-1] * coords.c_v / i)
        terms = {}
        for a in range(T + 1):
            for b in range(T + 1 - a):
                c = ExtScalar(ew[a] * ev[b])
                if not c.is_zero():
                    terms[(a, b, 0, 0)] = c
        total = PBWPoly(alg, terms)
        X = self.reduce(total, M=max(M, T))
        return X.truncate(M).scale(self.torus_scalar(coords.c_h, coords.c_I))


# --- the GL_2 side -------------------------------------------------------------

def gl2_module(W: WeightModule) -> WeightModule:
    """The same module over K on the lattice (h_0, w_0, v_0) = (h/sqrt p, w, v/sqrt p)."""
    p = W.p
    sp = ExtScalar.sqrt_p(p)
    lam_h0 = W.lam_h * sp / p  # lambda(h)/sqrt(p)
    chi0 = W.chi_val / p
    return WeightModule(W.params, W.lam, W.chi, W.M, s=1, lam_h=lam_h0, chi_val=chi0, basis="GL2")


def embed_gl2(X: WElement) -> WElement:
    """(a_i, b_i) -> (a_i, sqrt(p) b_i) on the basis (w_0^i, w_0^i v_0)."""
    if X.basis != "D":
        raise ValueError("expected an element in the D basis")
    return WElement(X.a, [b.times_sqrt_p() for b in X.b], X.p, "GL2")


def _h_matrix(W0: WeightModule, M: int):
    """Matrix of h = sqrt(p) h_0 on F_M = span(w_0^m, m <= M; w_0^m v_0, m < M)."""
    idx = [(0, m) for m in range(M + 1)] + [(1, m) for m in range(M)]
    pos = {k: i for i, k in enumerate(idx)}
    z = ExtScalar.exact(W0.p, 0)
    n = len(idx)
    rows = [[z] * n for _ in range(n)]
    for j, (kind, m) in enumerate(idx):
        for key, c in W0._column("h", kind, m).items():
            if key not in pos:
                raise ArithmeticError("F_M is not stable under h")
            rows[pos[key]][j] = c.times_sqrt_p()
    return rows, idx


def _rank(rows, relprec: int) -> int:
    """Rank by Gaussian elimination with minimal-valuation pivots."""
    A = [list(r) for r in rows]
    nrows, ncols = len(A), len(A[0]) if A else 0
    rank = 0
    for col in range(ncols):
        best, bv = None, INF
        for r in range(rank, nrows):
            x = A[r][col]
            if not x.is_zero() and x.valuation < bv:
                best, bv = r, x.valuation
        if best is None:
            continue
        A[rank], A[best] = A[best], A[rank]
        inv = A[rank][col].inverse(relprec)
        for r in range(rank + 1, nrows):
            if A[r][col].is_zero():
                continue
            f = A[r][col] * inv
            A[r] = [x - f * y for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class EigenReport:
    k: int
    side: str
    eigenvalue: ExtScalar
    claimed: ExtScalar
    dimension: int
    truncation: int


def h_eigencheck(W: WeightModule, k: int, M: int = 20, side: str = "e") -> EigenReport:
    """Eigenvalue of h on the image of e_0^k * 1 (or f_0^k * 1) and its eigenspace dimension on F_M."""
    if k > M:
        raise ValueError("k must not exceed the truncation")
    p = W.p
    W0 = gl2_module(W)
    X = WElement.delta(p, M, "GL2")
    for _ in range(k):
        wX = W0.act_letter("w", X, grow=0)
        vX = W0.act_letter("v", X, grow=0)
        X = wX + vX if side == "e" else wX - vX
    rows, idx = _h_matrix(W0, M)
    vec = [X.a[m] if kind == 0 else X.b[m] for kind, m in idx]
    hv = [sum((r[j] * vec[j] for j in range(len(vec)) if not vec[j].is_zero()), ExtScalar.exact(p, 0))
          for r in rows]
    i0 = min((i for i, x in enumerate(vec) if not x.is_zero()), key=lambda i: vec[i].valuation)
    mu = hv[i0] * vec[i0].inverse(W.params.prec)
    for i, x in enumerate(vec):
        if not (hv[i] - mu * x).is_zero():
            raise ArithmeticError("image of e_0^k is not an h-eigenvector")
    n = len(idx)
    shifted = [[rows[i][j] - (mu if i == j else 0) for j in range(n)] for i in range(n)]
    dim = n - _rank(shifted, W.params.prec)
    claimed = W.lam_h + 2 * k * (1 if side == "e" else -1)
    return EigenReport(k, side, mu, claimed, dim, M)
