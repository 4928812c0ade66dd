"""Slope bookkeeping and instability witnesses for syzygy bundles of three forms.

Degrees are measured in units of deg O_C(1) = d throughout.  For forms of
degrees d1, d2, d3 the bundle Syz(f1, f2, f3)(m) has rank 2 and degree
2m - (d1 + d2 + d3).  A nonzero global syzygy in a twist m' whose degree
is negative is a section of a negative bundle, which is the evidence of
non-semistability used everywhere below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .errors import HypothesisFailed
from .gfp import PrimeModulus, binom_mod_p_int, binomial_row_mod_p
from .linalg import DEFAULT_MAX_DENSE
from .membership import syzygy_space
from .ring import NormalHomogPoly, RingContext


def genus_plane_curve(d: int) -> int:
    if d < 1:
        raise ValueError("degree must be positive")
    return (d - 1) * (d - 2) // 2


@dataclass(frozen=True)
class NonIntegral:
    """Marker for an odd degree sum; ``value`` is the half-integral twist."""

    value: Fraction

    def __str__(self):
        return f"NonIntegral({self.value})"


def balanced_twist(d1: int, d2: int, d3: int) -> "int | NonIntegral":
    total = d1 + d2 + d3
    if total % 2:
        return NonIntegral(Fraction(total, 2))
    return total // 2


@dataclass(frozen=True)
class SlopeData:
    degree: int
    rank: int

    @property
    def slope(self) -> Fraction:
        return Fraction(self.degree, self.rank)


def syzygy_bundle_slope(gen_degrees: Sequence[int], twist: int) -> SlopeData:
    """Rank and degree of Syz(f_1..f_n)(twist) from 0 -> Syz -> (+) O(m-d_i) -> O(m) -> 0."""
    n = len(gen_degrees)
    return SlopeData((n - 1) * twist - sum(gen_degrees), n - 1)


@dataclass
class InstabilityWitness:
    """A global syzygy of (f_i^q) in a twist of negative bundle degree."""

    e: int
    q: int
    twist: int
    syzygy: tuple[NormalHomogPoly, ...]
    gens: tuple[NormalHomogPoly, ...]
    twisted_degree: int
    sub_degree: Fraction
    quotient_degree: Fraction
    source: str

    def verify(self) -> bool:
        ctx = self.gens[0].ctx
        acc = ctx.zero(self.twist)
        for h, g in zip(self.syzygy, self.gens):
            if h.degree + g.degree != self.twist and not h.is_zero():
                return False
            if not h.is_zero():
                acc = acc + h * g
        nontrivial = any(not h.is_zero() for h in self.syzygy)
        return acc.is_zero() and nontrivial and self.twisted_degree < 0 and self.sub_degree > 0 > self.quotient_degree

    def to_json(self) -> dict:
        return {
            "e": self.e,
            "q": self.q,
            "twist": self.twist,
            "twisted_degree": self.twisted_degree,
            "sub_degree": str(self.sub_degree),
            "quotient_degree": str(self.quotient_degree),
            "source": self.source,
            "syzygy": [h.to_json() for h in self.syzygy],
        }


def _witness(gens, syz, e, q, twist, base_sum, source) -> InstabilityWitness:
    twisted = 2 * twist - q * base_sum
    # a section of Syz(twist) spans a line subbundle of degree >= q*m_bal - twist
    sub = Fraction(q * base_sum, 2) - twist
    return InstabilityWitness(e, q, twist, tuple(syz), tuple(gens), twisted, sub, -sub, source)


def lemma_window(d: int, p: int) -> tuple[int, int] | None:
    """(l, r) with p = d*l + r when d/4 <= r < d/3, else None."""
    ell, r = divmod(p, d)
    if 0 < r and 4 * r >= d and 3 * r < d:
        return ell, r
    return None


def lemma_syzygy_construction(d: int, p: int) -> InstabilityWitness:
    """Explicit low-degree syzygy of (x^{4p}, y^{4p}, z^{4p}) on the degree-d Fermat curve.

    Write p = d*l + r and t = 4r - d.  In K[x,y] the form
    h3 = x^t y^t * sum_k c_k x^{dk} y^{d(2l-k)} times (x^d+y^d)^{4l+1} only
    has 2l monomials outside (x^{4p}, y^{4p}), so some nonzero c kills them;
    the remainder splits as -h1 x^{4p} - h2 y^{4p}.  Since z^{4p} =
    z^t (x^d+y^d)^{4l+1} in R, (z^t h1, z^t h2, h3) is a syzygy of total
    degree d(6l+1) + 3t.
    """
    PrimeModulus(p)
    window = lemma_window(d, p)
    if window is None:
        raise HypothesisFailed(f"p={p} mod d={d} is outside the window d/4 <= r < d/3")
    ell, r = window
    ctx = RingContext(d, p)
    t = 4 * r - d
    power = 4 * ell + 1
    four_p = 4 * p
    if ell == 0:
        c = [1]
    else:
        rows = [
            [binom_mod_p_int(power, i - k, p) for k in range(2 * ell + 1)]
            for i in range(2 * ell + 1, 4 * ell + 1)
        ]
        kernel = linalg.nullspace(np.array(rows, dtype=np.int64 if p < 2**31 else object), p)
        if not kernel:
            raise HypothesisFailed("coefficient system has no kernel")  # impossible: more unknowns than equations
        c = [int(v) for v in kernel[0]]
    h3 = {(t + d * k, t + d * (2 * ell - k), 0): ck for k, ck in enumerate(c) if ck}
    binoms = binomial_row_mod_p(power, p)
    product: dict[tuple[int, int], int] = {}
    for k, ck in enumerate(c):
        if not ck:
            continue
        for j, bj in enumerate(binoms):
            if bj:
                key = (t + d * (k + j), t + d * (2 * ell - k + power - j))
                product[key] = (product.get(key, 0) + ck * bj) % p
    h1: dict = {}
    h2: dict = {}
    for (a, b), v in product.items():
        if not v:
            continue
        if a >= four_p:
            h1[(a - four_p, b, t)] = (-v) % p
        elif b >= four_p:
            h2[(a, b - four_p, t)] = (-v) % p
        else:
            raise HypothesisFailed(f"monomial x^{a} y^{b} was not cancelled")
    twist = d * (6 * ell + 1) + 3 * t
    syz = (
        ctx.poly(h1, degree=twist - four_p),
        ctx.poly(h2, degree=twist - four_p),
        ctx.poly(h3, degree=twist - four_p),
    )
    gens = (ctx.monomial(four_p), ctx.monomial(0, four_p), ctx.monomial(0, 0, four_p))
    w = _witness(gens, syz, 1, p, twist, 12, "lemma")
    if not w.verify():
        raise AssertionError(f"constructed syzygy fails to verify for d={d}, p={p}")
    return w


def detect_instability(
    gens: Sequence[NormalHomogPoly],
    e_max: int = 2,
    ctx: RingContext | None = None,
    max_dense: int = DEFAULT_MAX_DENSE,
) -> InstabilityWitness | None:
    """Search Frobenius pull-backs e = 1..e_max for a syzygy in a negative twist.

    R is a domain, so a syzygy in twist m' multiplies up to twist m'+1; the
    lowest such twist below the slope-zero twist is found by bisection.
    """
    gens = tuple(gens)
    if len(gens) != 3:
        raise ValueError("instability detection is for three generators")
    ctx = ctx or gens[0].ctx
    base_sum = sum(g.degree for g in gens)
    for e in range(1, e_max + 1):
        q = ctx.p**e
        lifted = tuple(g.frobenius(e) for g in gens)
        low = min(g.degree for g in lifted)
        top = math.ceil(Fraction(q * base_sum, 2)) - 1
        if low > top:
            continue

        def first(m):
            found = syzygy_space(lifted, m, ctx, limit=1, max_dense=max_dense)
            return found[0] if found else None

        best = first(top)
        if best is None:
            continue
        best_twist = top
        lo, hi = low, top - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            syz = first(mid)
            if syz is None:
                lo = mid + 1
            else:
                best, best_twist = syz, mid
                hi = mid - 1
        w = _witness(lifted, best, e, q, best_twist, base_sum, "search")
        if not w.verify():
            raise AssertionError("instability witness fails to verify")
        return w
    return None
