"""Binomial-matrix certificates for x^3y^3 against (x^4, y^4, z^4) in degree 7.

Both routes reduce a question in R = K[x,y,z]/(x^7+y^7-z^7) to banded
matrices of binomial coefficients C(a, b+i-j):

* p = 7l+3: x^{3p}y^{3p} lies in (x^{4p}, y^{4p}, z^{4p}).  The witness is
  the solution a_0..a_{2l} of a (2l+1)-square binomial system whose
  determinant is a unit by the van Zeipel product.
* p = 7l+2: x^{3p^2}y^{3p^2} is not in (x^{4p^2}, y^{4p^2}, z^{4p^2}).  The
  witness is the unit det M5 = prod (3l-t)/(1+t) together with the integer
  exponent bookkeeping that lifts the bivariate statement from level p to
  p^2 and beyond.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .errors import (
    ConsistencyFailure,
    DenominatorZero,
    FermatClosureError,
    HypothesisFailed,
    PDividesDenominator,
    SingularSystem,
    ZeroDeterminant,
)
from .gfp import PrimeModulus, binom_exact, binom_mod_p_int, binomial_row_mod_p
from .ring import RingContext

FAMILY_DEGREE = 7
DEFAULT_ORACLE_BOUND = 40


@dataclass(frozen=True)
class BinomialMatrixSpec:
    """The r x s matrix with (i, j) entry C(a, b+i-j), 1-indexed."""

    a: int
    b: int
    r: int
    s: int

    def __post_init__(self):
        if self.r < 1 or self.s < 1:
            raise ValueError("a binomial matrix needs r, s >= 1")

    def entry(self, i: int, j: int, p: int | None = None) -> int:
        k = self.b + i - j
        if p is None:
            return binom_exact(self.a, k)
        return binom_mod_p_int(self.a, k, p) if self.a >= 0 else binom_exact(self.a, k) % p

    def materialize(self, p: int | None = None) -> list[list[int]]:
        return [[self.entry(i, j, p) for j in range(1, self.s + 1)] for i in range(1, self.r + 1)]


def column_reduce_binomial(spec: BinomialMatrixSpec, p: int | None = None, with_transform: bool = False):
    """Adjacent column additions turning C(a, b+i-j) into C(a+j-1, b+i-1).

    Pass k adds column j-1 to column j for j = s, s-1, ..., k+1 (right to left,
    so every addition reads an untouched column), then recurses on columns
    k+1..s.  The accumulated transform T is unit upper triangular, so the
    column span is preserved: reduced = A @ T.
    """
    A = spec.materialize(p)
    cols = [[A[i][j] for i in range(spec.r)] for j in range(spec.s)]
    T = [[int(i == j) for i in range(spec.s)] for j in range(spec.s)]  # T[j] is column j
    for start in range(spec.s - 1):
        for j in range(spec.s - 1, start, -1):
            cols[j] = [u + v for u, v in zip(cols[j], cols[j - 1])]
            T[j] = [u + v for u, v in zip(T[j], T[j - 1])]
            if p is not None:
                cols[j] = [u % p for u in cols[j]]
                T[j] = [u % p for u in T[j]]
    reduced = [[cols[j][i] for j in range(spec.s)] for i in range(spec.r)]
    if with_transform:
        transform = [[T[j][i] for j in range(spec.s)] for i in range(spec.s)]
        return reduced, transform
    return reduced


def van_zeipel_det(a: int, b: int, r: int) -> Fraction:
    """det(C(a, b+i-j))_{r x r} = prod_{t<r} C(a+r-1-t, b) / C(b+t, b)."""
    if r < 1:
        raise ValueError("r must be at least 1")
    value = Fraction(1)
    for t in range(r):
        den = binom_exact(b + t, b)
        if den == 0:
            raise DenominatorZero(f"C({b + t}, {b}) vanishes")
        value *= Fraction(binom_exact(a + r - 1 - t, b), den)
    return value


def van_zeipel_det_mod_p(a: int, b: int, r: int, p: int) -> int:
    if r < 1:
        raise ValueError("r must be at least 1")
    if b < 0:
        raise DenominatorZero(f"C(b+t, b) vanishes for b = {b}")
    value = 1
    for t in range(r):
        den = binom_mod_p_int(b + t, b, p)
        if den == 0:
            raise PDividesDenominator(f"p={p} divides C({b + t}, {b})")
        value = value * binom_mod_p_int(a + r - 1 - t, b, p) * pow(den, -1, p) % p
    return value


def _check_prime(p: int, residue: int) -> int:
    PrimeModulus(p)
    if p % FAMILY_DEGREE != residue:
        raise HypothesisFailed(f"p={p} is not congruent to {residue} mod {FAMILY_DEGREE}")
    return (p - residue) // FAMILY_DEGREE


@dataclass(frozen=True)
class MembershipCertificate37:
    """x^{3p}y^{3p} in (x^{4p}, y^{4p}, z^{4p}) for p = 7l+3."""

    p: int
    ell: int
    coefficients: tuple[int, ...]
    kind: str = field(default="membership", init=False)

    @property
    def level(self) -> int:
        return self.p

    @property
    def target_exponents(self) -> tuple[int, int]:
        # (4p as an x/y exponent, power of (x^7+y^7) absorbed by z^{4p+2})
        return (28 * self.ell + 12, 4 * self.ell + 2)

    def matrix(self) -> list[list[int]]:
        n = 2 * self.ell + 1
        return BinomialMatrixSpec(4 * self.ell + 2, n, n, n).materialize(self.p)

    def to_json(self) -> dict:
        x_exp, power = self.target_exponents
        return {
            "kind": self.kind,
            "p": self.p,
            "ell": self.ell,
            "coefficients": list(self.coefficients),
            "exponent_identities": {
                "4p": x_exp,
                "4p == 28*ell+12": 4 * self.p == x_exp,
                "4p+2 == 7*(4*ell+2)": 4 * self.p + 2 == 7 * power,
                "3p == 7*(3*ell+1)+2": 3 * self.p == 7 * (3 * self.ell + 1) + 2,
            },
        }


@dataclass(frozen=True)
class NonMembershipCertificate27:
    """x^{3p^2}y^{3p^2} not in (x^{4p^2}, y^{4p^2}, z^{4p^2}) for p = 7l+2."""

    p: int
    ell: int
    det_m5: int
    k: int
    identities: dict
    kind: str = field(default="non-membership", init=False)

    @property
    def level(self) -> int:
        return self.p**2

    def covers_level(self, q: int) -> bool:
        """Whether the lifted bivariate statement certifies exclusion at level q = p^n, n >= 1.

        z^{4q} is a multiple of (x^7+y^7)^{floor(4q/7)}, and F-purity of K[x,y]
        keeps x^{3q}y^{3q} outside (x^{4q}, y^{4q}, (x^7+y^7)^{(4l+1)q/p}).
        """
        if q < self.p or q % self.p:
            return False
        n = q
        while n % self.p == 0:
            n //= self.p
        if n != 1:
            return False
        return (4 * q) // 7 >= (4 * self.ell + 1) * (q // self.p)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "p": self.p,
            "ell": self.ell,
            "det_m5": self.det_m5,
            "exponent_identities": dict(self.identities),
        }


Certificate = MembershipCertificate37 | NonMembershipCertificate27


def build_membership_certificate(p: int) -> MembershipCertificate37:
    ell = _check_prime(p, 3)
    n = 2 * ell + 1
    if van_zeipel_det_mod_p(4 * ell + 2, n, n, p) == 0:
        raise SingularSystem(f"binomial system for p={p} is singular", {"p": p, "ell": ell})
    spec = BinomialMatrixSpec(4 * ell + 2, n, n, n)
    A = np.array(spec.materialize(p), dtype=np.int64 if p < 2**31 else object)
    rhs = np.zeros(n, dtype=A.dtype)
    rhs[ell] = 1
    sol = linalg.solve(A, rhs, p)
    if sol is None:
        raise SingularSystem(
            f"no solution of the binomial system for p={p}", {"p": p, "ell": ell, "matrix": A.tolist()}
        )
    coeffs = tuple(int(v) for v in sol)
    for i in range(n):
        if sum(int(A[i, j]) * coeffs[j] for j in range(n)) % p != int(i == ell):
            raise SingularSystem(f"solution check failed for p={p}", {"p": p, "row": i})
    return MembershipCertificate37(p, ell, coeffs)


def det_m5_mod_p(ell: int, p: int) -> int:
    value = 1
    for t in range(ell):
        value = value * (3 * ell - t) % p * pow(1 + t, -1, p) % p
    return value


def nonmembership_identities(p: int, ell: int) -> dict:
    k = 7 * ell * ell + 4 * ell
    frob = p * (4 * ell + 1)
    return {
        "k": k,
        "k == p*ell + 2*ell": k == p * ell + 2 * ell,
        "p^2 == 7k+4": p * p == 7 * k + 4,
        "4p^2 == 28k+16": 4 * p * p == 28 * k + 16,
        "p(4ell+1) == 4k-ell+2": frob == 4 * k - ell + 2,
        # the lift needs <=; equality happens only at ell = 0 (p = 2)
        "4k-ell+2 <= 4k+2": 4 * k - ell + 2 <= 4 * k + 2,
    }


_INFORMATIONAL = {"k"}


def build_nonmembership_certificate(p: int) -> NonMembershipCertificate27:
    ell = _check_prime(p, 2)
    det = det_m5_mod_p(ell, p)
    if det == 0:
        raise ZeroDeterminant(f"det M5 vanishes modulo {p}", {"p": p, "ell": ell})
    ids = nonmembership_identities(p, ell)
    if not all(v for key, v in ids.items() if key not in _INFORMATIONAL):
        raise ConsistencyFailure(f"exponent identities fail for p={p}", {"p": p, "identities": ids})
    return NonMembershipCertificate27(p, ell, det, ids["k"], ids)


def build_certificate(p: int) -> Certificate | None:
    if p % FAMILY_DEGREE == 3:
        return build_membership_certificate(p)
    if p % FAMILY_DEGREE == 2:
        return build_nonmembership_certificate(p)
    return None


def certificate_json(cert: Certificate) -> str:
    return json.dumps(cert.to_json(), sort_keys=True)


# -- verification ---------------------------------------------------------------

def surviving_terms(cert: MembershipCertificate37) -> dict[int, int]:
    """Expand (sum a_i X^i Y^{2l-i}) (X+Y)^{4l+2} and keep terms below the cutoffs.

    Keys are X-exponents s (the Y-exponent is 6l+2-s).  X = x^7 and the cutoff
    x^{28l+12} leaves exactly 2l+1 <= s <= 4l+1.
    """
    p, ell = cert.p, cert.ell
    row = binomial_row_mod_p(4 * ell + 2, p)
    out: dict[int, int] = {}
    top = 6 * ell + 2
    cutoff = 28 * ell + 12
    for i, a in enumerate(cert.coefficients):
        if not a:
            continue
        for j, c in enumerate(row):
            s = i + j
            if 7 * s < cutoff and 7 * (top - s) < cutoff and c:
                out[s] = (out.get(s, 0) + a * c) % p
    return {s: v for s, v in out.items() if v}


def membership_combination(cert: MembershipCertificate37, ctx: RingContext | None = None):
    """(h1, h2, h3) with h1 x^{4p} + h2 y^{4p} + h3 z^{4p} = x^{3p} y^{3p} in R."""
    p, ell = cert.p, cert.ell
    ctx = ctx or RingContext(FAMILY_DEGREE, p)
    four_p = 4 * p
    row = binomial_row_mod_p(4 * ell + 2, p)
    product: dict[int, int] = {}
    for i, a in enumerate(cert.coefficients):
        for j, c in enumerate(row):
            if a and c:
                product[i + j] = (product.get(i + j, 0) + a * c) % p
    top = 6 * ell + 2
    h1: dict = {}
    h2: dict = {}
    target = (3 * p, 3 * p)
    for s, v in product.items():
        if not v:
            continue
        xe, ye = 7 * s + 2, 7 * (top - s) + 2
        if (xe, ye) == target:
            v = (v - 1) % p
            if not v:
                continue
        if xe >= four_p:
            h1[(xe - four_p, ye, 0)] = (-v) % p
        elif ye >= four_p:
            h2[(xe, ye - four_p, 0)] = (-v) % p
        else:
            raise ConsistencyFailure(f"term x^{xe} y^{ye} survives for p={p}", {"p": p})
    if (target[0] - 2) // 7 not in product:
        raise ConsistencyFailure("target term missing from the expansion", {"p": p})
    h3 = {(7 * i + 2, 7 * (2 * ell - i) + 2, 2): a for i, a in enumerate(cert.coefficients) if a}
    deg = 2 * p
    return (
        ctx.poly(h1, degree=deg),
        ctx.poly(h2, degree=deg),
        ctx.poly(h3, degree=deg),
    )


def bivariate_oracle(p: int, ell: int):
    """Generic-engine check of x^{3p}y^{3p} against (x^{4p}, y^{4p}, (x^7+y^7)^{4l+1})."""
    from .membership import membership

    ctx = RingContext(FAMILY_DEGREE, p)
    gens = [ctx.monomial(4 * p), ctx.monomial(0, 4 * p), ctx.parse("x^7+y^7") ** (4 * ell + 1)]
    return membership(ctx.monomial(3 * p, 3 * p), gens, ctx)


def ring_oracle(p: int, level: int):
    """Generic-engine check of x^{3q}y^{3q} against (x^{4q}, y^{4q}, z^{4q}) at q = level."""
    from .membership import membership

    ctx = RingContext(FAMILY_DEGREE, p)
    gens = [ctx.monomial(4 * level), ctx.monomial(0, 4 * level), ctx.monomial(0, 0, 4 * level)]
    return membership(ctx.monomial(3 * level, 3 * level), gens, ctx)


def verify_certificate(
    cert: Certificate, ctx: RingContext | None = None, oracle_bound: int = DEFAULT_ORACLE_BOUND
) -> bool:
    """Independent re-check of a certificate; False on any mismatch."""
    try:
        if isinstance(cert, MembershipCertificate37):
            return _verify_membership(cert, ctx)
        if isinstance(cert, NonMembershipCertificate27):
            return _verify_nonmembership(cert, oracle_bound)
    except FermatClosureError:
        return False
    return False


def _verify_membership(cert: MembershipCertificate37, ctx: RingContext | None) -> bool:
    p, ell = cert.p, cert.ell
    if p % 7 != 3 or (p - 3) // 7 != ell or len(cert.coefficients) != 2 * ell + 1:
        return False
    if surviving_terms(cert) != {3 * ell + 1: 1}:
        return False
    ctx = ctx or RingContext(FAMILY_DEGREE, p)
    if (ctx.d, ctx.p) != (FAMILY_DEGREE, p):
        return False
    h1, h2, h3 = membership_combination(cert, ctx)
    lhs = h1 * ctx.monomial(4 * p) + h2 * ctx.monomial(0, 4 * p) + h3 * ctx.monomial(0, 0, 4 * p)
    return lhs == ctx.monomial(3 * p, 3 * p)


def _verify_nonmembership(cert: NonMembershipCertificate27, oracle_bound: int) -> bool:
    p, ell = cert.p, cert.ell
    if p % 7 != 2 or (p - 2) // 7 != ell:
        return False
    if cert.det_m5 % p == 0 or det_m5_mod_p(ell, p) != cert.det_m5 % p:
        return False
    ids = nonmembership_identities(p, ell)
    if ids != dict(cert.identities) or not all(v for key, v in ids.items() if key not in _INFORMATIONAL):
        return False
    if p <= oracle_bound:
        if bivariate_oracle(p, ell).member:
            return False
    return True
