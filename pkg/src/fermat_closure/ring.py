"""Homogeneous arithmetic in R = GF(p)[x,y,z]/(x^d + y^d - z^d).

Every element is kept in normal form: the rewrite z^d -> x^d + y^d is
applied until all z-exponents are below d.  As a K[x,y]-module R is free
on 1, z, ..., z^(d-1), so the normal form is unique.

Besides the standard grading R carries a grading by Z/d + Z/d + Z with
x -> (1,0,1), y -> (0,1,1), z -> (0,0,1).  The class of x^a y^b z^c is
(a mod d, b mod d, a+b+c); the rewrite rule respects it.  Inside one such
strand the z-exponent is pinned to (n - a - b) mod d, so a strand of
degree n has only about n/d monomials.
"""

from __future__ import annotations

import re
import threading
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from .errors import DegreeMismatch, ExponentOverflow, InvalidRing, NotHomogeneous
from .gfp import PrimeModulus, binomial_row_mod_p

Monomial = tuple[int, int, int]
Strand = tuple[int, int]

EXPONENT_LIMIT = 2**63 - 1
MAX_EXPANSION_TERMS = 5_000_000


def _order_key(m: Monomial) -> tuple[int, int, int]:
    return (m[2], m[1], m[0])


class RingContext:
    """The ring GF(p)[x,y,z]/(x^d + y^d - z^d) with cached graded bases.

    Immutable for callers; the basis caches fill lazily under a lock.
    """

    __slots__ = ("d", "modulus", "_cache", "_lock")

    def __init__(self, d: int, p: "int | PrimeModulus"):
        modulus = p if isinstance(p, PrimeModulus) else PrimeModulus(p)
        if not isinstance(d, int) or d < 3:
            raise InvalidRing(f"degree d must be an integer >= 3, got {d!r}")
        if d % modulus.p == 0:
            raise InvalidRing(
                f"p={modulus.p} divides d={d}: x^d+y^d-z^d is a p-th power and R is not a domain"
            )
        self.d = d
        self.modulus = modulus
        self._cache: dict = {}
        self._lock = threading.Lock()

    @property
    def p(self) -> int:
        return self.modulus.p

    def __eq__(self, other):
        return isinstance(other, RingContext) and (self.d, self.p) == (other.d, other.p)

    def __hash__(self):
        return hash((self.d, self.p))

    def __repr__(self):
        return f"RingContext(d={self.d}, p={self.p})"

    # -- graded pieces ------------------------------------------------------

    def _cached(self, key, build):
        try:
            return self._cache[key]
        except KeyError:
            pass
        value = build()
        with self._lock:
            return self._cache.setdefault(key, value)

    def dim(self, n: int) -> int:
        return dim_graded_piece(n, self)

    def basis(self, n: int) -> tuple[Monomial, ...]:
        """Normal monomials of degree n, ordered lexicographically on (c, b, a)."""

        def build():
            if n < 0:
                return ()
            return tuple(
                (n - b - c, b, c) for c in range(min(self.d - 1, n) + 1) for b in range(n - c + 1)
            )

        return self._cached(("basis", n), build)

    def index(self, n: int) -> Mapping[Monomial, int]:
        return self._cached(("index", n), lambda: {m: i for i, m in enumerate(self.basis(n))})

    def strand_of(self, m: Monomial) -> Strand:
        return (m[0] % self.d, m[1] % self.d)

    def strand_basis(self, n: int, strand: Strand) -> tuple[Monomial, ...]:
        """Normal monomials of degree n in the multigraded strand (a mod d, b mod d)."""

        def build():
            alpha, beta = strand[0] % self.d, strand[1] % self.d
            if n < 0:
                return ()
            c = (n - alpha - beta) % self.d
            rest = n - c
            if rest < alpha + beta:
                return ()
            out = [(a, rest - a, c) for a in range(alpha, rest - beta + 1, self.d)]
            out.sort(key=_order_key)
            return tuple(out)

        return self._cached(("strand", n, strand[0] % self.d, strand[1] % self.d), build)

    def strands(self) -> Iterator[Strand]:
        for alpha in range(self.d):
            for beta in range(self.d):
                yield (alpha, beta)

    # -- constructors -------------------------------------------------------

    def poly(self, raw: "Mapping[Monomial, int] | Iterable[tuple[Monomial, int]]", degree: int | None = None):
        return normal_form(raw, self, degree=degree)

    def monomial(self, a: int, b: int = 0, c: int = 0, coeff: int = 1) -> "NormalHomogPoly":
        return normal_form({(a, b, c): coeff}, self)

    def zero(self, degree: int) -> "NormalHomogPoly":
        return NormalHomogPoly(self, degree, {})

    def one(self) -> "NormalHomogPoly":
        return NormalHomogPoly(self, 0, {(0, 0, 0): 1})

    @property
    def x(self):
        return self.monomial(1, 0, 0)

    @property
    def y(self):
        return self.monomial(0, 1, 0)

    @property
    def z(self):
        return self.monomial(0, 0, 1)

    def parse(self, text: str) -> "NormalHomogPoly":
        return normal_form(parse_polynomial(text, self.p), self)


class NormalHomogPoly:
    """A homogeneous element of R in normal form (all z-exponents below d)."""

    __slots__ = ("ctx", "degree", "_terms", "_hash")

    def __init__(self, ctx: RingContext, degree: int, terms: Mapping[Monomial, int]):
        self.ctx = ctx
        self.degree = degree
        self._terms = {m: v for m, v in terms.items() if v}
        self._hash = None

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def coefficient(self, m: Monomial) -> int:
        return self._terms.get(m, 0)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self._terms.items(), key=lambda kv: _order_key(kv[0]))

    def strand(self) -> Strand | None:
        """The multigraded strand if the element is multihomogeneous, else None."""
        found = None
        for m in self._terms:
            s = self.ctx.strand_of(m)
            if found is None:
                found = s
            elif s != found:
                return None
        return found if found is not None else (0, 0)

    def split_strands(self) -> dict[Strand, "NormalHomogPoly"]:
        parts: dict[Strand, dict] = {}
        for m, v in self._terms.items():
            parts.setdefault(self.ctx.strand_of(m), {})[m] = v
        return {s: NormalHomogPoly(self.ctx, self.degree, t) for s, t in parts.items()}

    def _check(self, other: "NormalHomogPoly"):
        if other.ctx != self.ctx:
            raise DegreeMismatch("operands live in different rings")

    def __add__(self, other):
        if not isinstance(other, NormalHomogPoly):
            return NotImplemented
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if other.degree != self.degree:
            raise NotHomogeneous(f"cannot add degrees {self.degree} and {other.degree}")
        p = self.ctx.p
        out = dict(self._terms)
        for m, v in other._terms.items():
            out[m] = (out.get(m, 0) + v) % p
        return NormalHomogPoly(self.ctx, self.degree, out)

    def __neg__(self):
        p = self.ctx.p
        return NormalHomogPoly(self.ctx, self.degree, {m: (-v) % p for m, v in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, NormalHomogPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, c: int) -> "NormalHomogPoly":
        p = self.ctx.p
        c %= p
        return NormalHomogPoly(self.ctx, self.degree, {m: v * c % p for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, NormalHomogPoly):
            return NotImplemented
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "NormalHomogPoly":
        if n < 0:
            raise ValueError("negative powers are not defined")
        result = self.ctx.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def frobenius(self, e: int = 1) -> "NormalHomogPoly":
        """f^(p^e); in characteristic p this only scales exponents (c^p = c in GF(p))."""
        q = self.ctx.p**e
        raw = {(a * q, b * q, c * q): v for (a, b, c), v in self._terms.items()}
        return normal_form(raw, self.ctx, degree=self.degree * q)

    def shift(self, m: Monomial) -> dict[Monomial, int]:
        """Terms of m * self in normal form, as a plain dict."""
        return _shift_terms(self._terms, m, self.ctx)

    def __eq__(self, other):
        if not isinstance(other, NormalHomogPoly):
            return NotImplemented
        if self.ctx != other.ctx:
            return False
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx, self.degree, frozenset(self._terms.items())))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (a, b, c), v in self.sorted_terms():
            factors = [f"{s}^{e}" if e > 1 else s for s, e in (("x", a), ("y", b), ("z", c)) if e]
            mono = "*".join(factors)
            if not mono:
                parts.append(str(v))
            elif v == 1:
                parts.append(mono)
            else:
                parts.append(f"{v}*{mono}")
        return " + ".join(parts)

    def __repr__(self):
        return f"NormalHomogPoly(deg={self.degree}, {self})"

    def to_json(self) -> list[list[int]]:
        return [[a, b, c, v] for (a, b, c), v in self.sorted_terms()]


def _check_exponent(*values: int) -> None:
    for v in values:
        if v > EXPONENT_LIMIT:
            raise ExponentOverflow(f"exponent {v} exceeds the 64-bit budget")


def _add_reduced(out: dict, a: int, b: int, c: int, coeff: int, ctx: RingContext) -> None:
    d, p = ctx.d, ctx.p
    if c < d:
        key = (a, b, c)
        out[key] = (out.get(key, 0) + coeff) % p
        return
    k, c0 = divmod(c, d)
    if k + 1 > MAX_EXPANSION_TERMS:
        raise ExponentOverflow(f"expanding (x^{d}+y^{d})^{k} exceeds the term budget")
    row = binomial_row_mod_p(k, p) if k > 1 else (1, 1)
    for j, bj in enumerate(row):
        if bj:
            key = (a + d * j, b + d * (k - j), c0)
            out[key] = (out.get(key, 0) + coeff * bj) % p


def normal_form(raw, ctx: RingContext, degree: int | None = None) -> NormalHomogPoly:
    """Canonical representative of a homogeneous polynomial in x, y, z."""
    if isinstance(raw, NormalHomogPoly):
        if raw.ctx != ctx:
            raise DegreeMismatch("polynomial belongs to another ring")
        return raw
    if isinstance(raw, str):
        raw = parse_polynomial(raw, ctx.p)
    items = raw.items() if isinstance(raw, Mapping) else raw
    p = ctx.p
    out: dict[Monomial, int] = {}
    seen_degree = None
    for (a, b, c), coeff in items:
        if a < 0 or b < 0 or c < 0:
            raise ValueError(f"negative exponent in {(a, b, c)}")
        _check_exponent(a, b, c, a + b + c)
        if coeff % p == 0:
            continue
        n = a + b + c
        if seen_degree is None:
            seen_degree = n
        elif n != seen_degree:
            raise NotHomogeneous(f"mixed degrees {seen_degree} and {n}")
        _add_reduced(out, a, b, c, coeff % p, ctx)
    if seen_degree is None:
        seen_degree = 0 if degree is None else degree
    elif degree is not None and degree != seen_degree:
        raise NotHomogeneous(f"declared degree {degree} but terms have degree {seen_degree}")
    return NormalHomogPoly(ctx, seen_degree, out)


def _shift_terms(terms: Mapping[Monomial, int], m: Monomial, ctx: RingContext) -> dict[Monomial, int]:
    ua, ub, uc = m
    d, p = ctx.d, ctx.p
    out: dict[Monomial, int] = {}
    for (a, b, c), v in terms.items():
        cc = c + uc
        if cc < d:
            key = (a + ua, b + ub, cc)
            out[key] = (out.get(key, 0) + v) % p
        else:
            # both z-exponents are below d, so one rewrite step suffices
            cc -= d
            k1 = (a + ua + d, b + ub, cc)
            k2 = (a + ua, b + ub + d, cc)
            out[k1] = (out.get(k1, 0) + v) % p
            out[k2] = (out.get(k2, 0) + v) % p
    return {k: v for k, v in out.items() if v}


def multiply(f: NormalHomogPoly, g: NormalHomogPoly) -> NormalHomogPoly:
    if f.ctx != g.ctx:
        raise DegreeMismatch("operands live in different rings")
    ctx = f.ctx
    if len(f) > len(g):
        f, g = g, f
    p = ctx.p
    out: dict[Monomial, int] = {}
    for m, v in f.terms.items():
        for k, w in _shift_terms(g.terms, m, ctx).items():
            out[k] = (out.get(k, 0) + v * w) % p
    return NormalHomogPoly(ctx, f.degree + g.degree, out)


def dim_graded_piece(n: int, ctx: "RingContext | int") -> int:
    """dim R_n = #{(a,b,c) : a+b+c = n, 0 <= c < d}."""
    d = ctx.d if isinstance(ctx, RingContext) else ctx
    if n < 0:
        return 0
    if n >= d - 2:
        return d * n - d * (d - 3) // 2
    return (n + 1) * (n + 2) // 2


_TERM = re.compile(r"([+-]?)([^+-]+)")
_FACTOR = re.compile(r"\*?([xyz])(?:\^?(\d+))?")
_COEFF = re.compile(r"(\d+)\*?")


def parse_polynomial(text: str, p: int | None = None) -> dict[Monomial, int]:
    """Parse ``x^3*y^3``, ``x3y3``, ``2x^7 - y7`` and the like into a raw term dict."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    out: dict[Monomial, int] = {}
    pos = 0
    for match in _TERM.finditer(s):
        if match.start() != pos:
            raise ValueError(f"cannot parse {text!r}")
        pos = match.end()
        sign = -1 if match.group(1) == "-" else 1
        body = match.group(2)
        coeff = 1
        cm = _COEFF.match(body)
        if cm:
            coeff = int(cm.group(1))
            body = body[cm.end():]
        exps = [0, 0, 0]
        fpos = 0
        for fm in _FACTOR.finditer(body):
            if fm.start() != fpos:
                raise ValueError(f"cannot parse term {match.group(0)!r} in {text!r}")
            fpos = fm.end()
            exps["xyz".index(fm.group(1))] += int(fm.group(2)) if fm.group(2) else 1
        if fpos != len(body):
            raise ValueError(f"cannot parse term {match.group(0)!r} in {text!r}")
        key = tuple(exps)
        out[key] = out.get(key, 0) + sign * coeff
    if pos != len(s):
        raise ValueError(f"cannot parse {text!r}")
    if p is not None:
        out = {k: v % p for k, v in out.items() if v % p}
    return out
