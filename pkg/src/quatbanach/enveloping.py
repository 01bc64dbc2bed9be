"""PBW normal forms in the enveloping algebra of g_D.

Letters are ordered w < v < h < I; a PBW monomial w^a v^b h^c I^d is stored
as its exponent tuple ``(a, b, c, d)``.  Brackets:

    [h, w] = 2v,   [h, v] = 2s w,   [w, v] = -2 iota h,   I central,

with ``s = p`` for g_D itself.  ``s = 1`` gives the lattice spanned by
h/sqrt(p), w, v/sqrt(p) on the GL_2 side.

Coefficients may be Python ints or any commutative scalar type supporting
``+``, ``-``, ``*`` (ExtScalar in practice); structure constants are ints.
"""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterable, Sequence

LETTERS = ("w", "v", "h", "I")
_INDEX = {name: i for i, name in enumerate(LETTERS)}
W, V, H, I_ = range(4)


class DegreeCapError(OverflowError):
    """A PBW computation exceeded the configured degree cap."""


def _word_to_mono(word: Sequence[int]) -> tuple:
    e = [0, 0, 0, 0]
    for x in word:
        e[x] += 1
    return tuple(e)


def _mono_to_word(mono: Sequence[int]) -> tuple:
    return tuple(i for i, k in enumerate(mono) for _ in range(k))


def _is_zero(c) -> bool:
    if isinstance(c, int):
        return c == 0
    return c.is_exact_zero() if hasattr(c, "is_exact_zero") else c == 0


class PBWPoly:
    """Finite linear combination of PBW monomials; no stored zero coefficients."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: "EnvelopingAlgebra", terms: dict | None = None):
        self.alg = alg
        self.terms = {m: c for m, c in (terms or {}).items() if not _is_zero(c)}

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_zero(self) -> bool:
        return all(c == 0 if isinstance(c, int) else c.is_zero() for c in self.terms.values())

    def top_symbol(self) -> dict:
        d = self.degree
        return {m: c for m, c in self.terms.items() if sum(m) == d}

    def _combine(self, other: "PBWPoly", sign: int) -> "PBWPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c * sign if m in out else c * sign
        return PBWPoly(self.alg, out)

    def __add__(self, other):
        return self._combine(self.alg.coerce(other), 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(self.alg.coerce(other), -1)

    def __rsub__(self, other):
        return self.alg.coerce(other) - self

    def __neg__(self):
        return PBWPoly(self.alg, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PBWPoly):
            return self.alg.mul(self, other)
        return PBWPoly(self.alg, {m: c * other for m, c in self.terms.items()})

    def __rmul__(self, other):
        return PBWPoly(self.alg, {m: other * c for m, c in self.terms.items()})

    def __eq__(self, other):
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            mono = "*".join(f"{LETTERS[i]}^{k}" if k > 1 else LETTERS[i] for i, k in enumerate(m) if k) or "1"
            parts.append(f"({self.terms[m]!r})*{mono}")
        return " + ".join(parts)


class EnvelopingAlgebra:
    """U(g) for the four-dimensional lattice with parameters (iota, s)."""

    def __init__(self, iota: int, s: int, degree_cap: int = 48):
        self.iota = iota
        self.s = s
        self.degree_cap = degree_cap
        # (x, y) with x > y in the letter order  ->  [x, y] as (coefficient, letter)
        self._bracket = {
            (H, W): (2, V),
            (H, V): (2 * s, W),
            (V, W): (2 * iota, H),
        }
        self._nf = lru_cache(maxsize=None)(self._nf_word)
        self._mono_mul = lru_cache(maxsize=None)(self._mono_mul_raw)

    @classmethod
    def for_params(cls, params, degree_cap: int = 48) -> "EnvelopingAlgebra":
        return cls(params.iota, params.p, degree_cap)

    # constructors ---------------------------------------------------------
    def one(self) -> PBWPoly:
        return PBWPoly(self, {(0, 0, 0, 0): 1})

    def zero(self) -> PBWPoly:
        return PBWPoly(self)

    def letter(self, name: str) -> PBWPoly:
        e = [0, 0, 0, 0]
        e[_INDEX[name]] = 1
        return PBWPoly(self, {tuple(e): 1})

    def mono(self, a: int, b: int, c: int = 0, d: int = 0) -> PBWPoly:
        return PBWPoly(self, {(a, b, c, d): 1})

    def coerce(self, x) -> PBWPoly:
        if isinstance(x, PBWPoly):
            return x
        return PBWPoly(self, {(0, 0, 0, 0): x})

    def bracket_letters(self, x: int, y: int) -> PBWPoly:
        """[x, y] for single letters, as an element of the algebra."""
        if x == y:
            return self.zero()
        if (x, y) in self._bracket:
            c, z = self._bracket[(x, y)]
            return PBWPoly(self, {_word_to_mono((z,)): c})
        if (y, x) in self._bracket:
            c, z = self._bracket[(y, x)]
            return PBWPoly(self, {_word_to_mono((z,)): -c})
        return self.zero()

    # normal form ------------------------------------------------------------
    def _check_degree(self, n: int) -> None:
        if n > self.degree_cap:
            raise DegreeCapError(f"degree {n} exceeds cap {self.degree_cap}")

    def _nf_word(self, word: tuple) -> tuple:
        """Memoised leftmost-swap normal form of an integer-coefficient word."""
        for i in range(len(word) - 1):
            x, y = word[i], word[i + 1]
            if x > y:
                out: dict = {}
                swapped = word[:i] + (y, x) + word[i + 2:]
                for m, c in self._nf(swapped):
                    out[m] = out.get(m, 0) + c
                if (x, y) in self._bracket:
                    k, z = self._bracket[(x, y)]
                    for m, c in self._nf(word[:i] + (z,) + word[i + 2:]):
                        out[m] = out.get(m, 0) + k * c
                return tuple((m, c) for m, c in out.items() if c)
        return ((_word_to_mono(word), 1),)

    def normal_form(self, word: Iterable, strategy: str = "left") -> PBWPoly:
        """Normal form of a word over {"I", "h", "w", "v"} interspersed with scalars.

        ``strategy`` picks which inversion is resolved first ("left" or
        "right"); the result is independent of it.
        """
        letters, scalar = [], 1
        for item in word:
            if isinstance(item, str):
                letters.append(_INDEX[item])
            else:
                scalar = scalar * item
        self._check_degree(len(letters))
        if strategy == "left":
            terms = dict(self._nf(tuple(letters)))
        elif strategy == "right":
            terms = self._rewrite(tuple(letters), rightmost=True)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
        return PBWPoly(self, {m: c * scalar if scalar != 1 else c for m, c in terms.items()})

    def _rewrite(self, word: tuple, rightmost: bool) -> dict:
        """Unmemoised worklist rewriting, used to cross-check the memoised path."""
        work = {word: 1}
        done: dict = {}
        while work:
            w, c = work.popitem()
            idx = range(len(w) - 2, -1, -1) if rightmost else range(len(w) - 1)
            pos = next((i for i in idx if w[i] > w[i + 1]), None)
            if pos is None:
                m = _word_to_mono(w)
                done[m] = done.get(m, 0) + c
                continue
            x, y = w[pos], w[pos + 1]
            sw = w[:pos] + (y, x) + w[pos + 2:]
            work[sw] = work.get(sw, 0) + c
            if (x, y) in self._bracket:
                k, z = self._bracket[(x, y)]
                br = w[:pos] + (z,) + w[pos + 2:]
                work[br] = work.get(br, 0) + k * c
        return {m: c for m, c in done.items() if c}

    def _mono_mul_raw(self, m1: tuple, m2: tuple) -> tuple:
        return self._nf(_mono_to_word(m1) + _mono_to_word(m2))

    def mul(self, P: PBWPoly, Q: PBWPoly) -> PBWPoly:
        self._check_degree(max(P.degree, 0) + max(Q.degree, 0))
        out: dict = {}
        for m1, c1 in P.terms.items():
            for m2, c2 in Q.terms.items():
                c12 = c1 * c2
                for m, k in self._mono_mul(m1, m2):
                    t = c12 * k if k != 1 else c12
                    out[m] = out[m] + t if m in out else t
        return PBWPoly(self, out)

    def commutator(self, P: PBWPoly, Q: PBWPoly) -> PBWPoly:
        return self.mul(P, Q) - self.mul(Q, P)

    def casimir(self) -> PBWPoly:
        """iota h^2 + s w^2 - v^2 (already in normal form)."""
        return PBWPoly(self, {(0, 0, 2, 0): self.iota, (2, 0, 0, 0): self.s, (0, 2, 0, 0): -1})

    def random_word(self, rng: random.Random, max_len: int) -> list[str]:
        return [rng.choice(LETTERS) for _ in range(rng.randint(0, max_len))]

    def random_poly(self, rng: random.Random, max_deg: int, terms: int = 3, coeff: int = 5) -> PBWPoly:
        out = self.zero()
        for _ in range(terms):
            out = out + self.normal_form(self.random_word(rng, max_deg)) * rng.randint(-coeff, coeff)
        return out


def jacobi(alg: EnvelopingAlgebra, x: str, y: str, z: str) -> PBWPoly:
    """[x,[y,z]] + [y,[z,x]] + [z,[x,y]] computed in the enveloping algebra."""
    X, Y, Z = (alg.letter(n) for n in (x, y, z))
    c = alg.commutator
    return c(X, c(Y, Z)) + c(Y, c(Z, X)) + c(Z, c(X, Y))
