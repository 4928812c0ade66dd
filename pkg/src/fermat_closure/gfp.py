"""Arithmetic over GF(p) and exact binomial coefficients.

Binomials modulo p go through Lucas' theorem so that arguments of size
p**2 and beyond never need big factorials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import isprime

from .errors import NotPrime, ZeroInverse

# Exact rationals for test oracles; Fraction keeps gcd(num, den) = 1 and den > 0.
BigRational = Fraction


@dataclass(frozen=True)
class PrimeModulus:
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or not isprime(self.p):
            raise NotPrime(f"{self.p!r} is not a prime")

    def __int__(self) -> int:
        return self.p

    def __call__(self, value: int) -> "FpElement":
        return FpElement(value, self)


def _modulus(p: "PrimeModulus | int") -> int:
    return p.p if isinstance(p, PrimeModulus) else int(p)


@dataclass(frozen=True)
class FpElement:
    """An element of GF(p), always stored fully reduced."""

    value: int
    modulus: PrimeModulus

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.modulus.p)

    @property
    def p(self) -> int:
        return self.modulus.p

    def _coerce(self, other) -> int:
        if isinstance(other, FpElement):
            if other.modulus != self.modulus:
                raise ValueError("elements live in different prime fields")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.value, self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * inv_mod_p(FpElement(o, self.modulus))

    def __pow__(self, n: int):
        if n < 0:
            return inv_mod_p(self) ** (-n)
        return FpElement(pow(self.value, n, self.p), self.modulus)

    def __eq__(self, other):
        if isinstance(other, FpElement):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.p})"


def binom_exact(n: int, k: int) -> int:
    """C(n, k) as an exact integer; zero outside 0 <= k <= n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=4096)
def _small_binom(n: int, k: int, p: int) -> int:
    # n < p here, so every denominator factor is a unit
    if k < 0 or k > n:
        return 0
    k = min(k, n - k)
    num = den = 1
    for i in range(k):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * pow(den, -1, p) % p


def binom_mod_p_int(n: int, k: int, p: int) -> int:
    """Lucas' theorem on base-p digits; returns a plain int in [0, p)."""
    if k < 0 or k > n:
        return 0
    result = 1
    while n or k:
        n, ni = divmod(n, p)
        k, ki = divmod(k, p)
        if ki > ni:
            return 0
        result = result * _small_binom(ni, ki, p) % p
    return result


def binom_mod_p(n: int, k: int, p: "PrimeModulus | int") -> FpElement:
    modulus = p if isinstance(p, PrimeModulus) else PrimeModulus(p)
    return FpElement(binom_mod_p_int(n, k, modulus.p), modulus)


@lru_cache(maxsize=256)
def binomial_row_mod_p(n: int, p: int) -> tuple[int, ...]:
    """All of C(n, 0..n) mod p, built digit-wise so the cost is O(n)."""
    if n < p:
        row = [1] * (n + 1)
        for j in range(n):
            row[j + 1] = row[j] * (n - j) % p * pow(j + 1, -1, p) % p
        return tuple(row)
    low, high = n % p, n // p
    low_row = binomial_row_mod_p(low, p)
    high_row = binomial_row_mod_p(high, p)
    out = [0] * (n + 1)
    for j_high, h in enumerate(high_row):
        if h == 0:
            continue
        base = j_high * p
        for j_low, lo in enumerate(low_row):
            if lo:
                out[base + j_low] = h * lo % p
    return tuple(out)


def inv_mod_p(a: "FpElement | int", p: "PrimeModulus | int | None" = None) -> FpElement:
    if isinstance(a, FpElement):
        modulus = a.modulus
        value = a.value
    else:
        if p is None:
            raise TypeError("a modulus is required for plain integers")
        modulus = p if isinstance(p, PrimeModulus) else PrimeModulus(p)
        value = a % modulus.p
    if value == 0:
        raise ZeroInverse(f"0 has no inverse modulo {modulus.p}")
    return FpElement(pow(value, -1, modulus.p), modulus)


def to_mod_p(q: Fraction, p: int) -> int:
    """Image of an exact rational in GF(p); the denominator must be a unit."""
    den = q.denominator % p
    if den == 0:
        raise ZeroInverse(f"denominator of {q} vanishes modulo {p}")
    return q.numerator * pow(den, -1, p) % p
