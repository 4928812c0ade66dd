"""Colengths of homogeneous ideals of R and Hilbert-Kunz sequences.

The colength of J is summed degree by degree as dim R_n - rank J_n.  R is
generated in degree 1, so once J_n = R_n every later degree saturates as
well; three further degrees are still checked as a guard.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import ConsistencyFailure, NotCofinite
from .linalg import DEFAULT_MAX_DENSE
from .membership import _compressible, _validate, build_system, membership
from .ring import NormalHomogPoly, RingContext

SATURATION_CHECKS = 3


def _rank_in_degree(gens, n, ctx, compress, max_dense) -> int:
    if all(g.degree > n for g in gens):
        return 0
    if not compress:
        return build_system(gens, n, ctx, None, max_dense).system.rank()
    return sum(build_system(gens, n, ctx, s, max_dense).system.rank() for s in ctx.strands())


def colength(
    gens: Sequence[NormalHomogPoly],
    ctx: RingContext | None = None,
    degree_bound: int | None = None,
    max_dense: int = DEFAULT_MAX_DENSE,
) -> int:
    """dim_K R / (gens); raises NotCofinite when nothing saturates by ``degree_bound``."""
    gens = tuple(gens)
    ctx = _validate(gens, ctx)
    top = max(g.degree for g in gens)
    bound = degree_bound if degree_bound is not None else 3 * top + ctx.d
    compress = _compressible(gens)
    total = 0
    for n in range(bound + 1):
        gap = ctx.dim(n) - _rank_in_degree(gens, n, ctx, compress, max_dense)
        total += gap
        if gap == 0 and n >= top:
            for k in range(n + 1, n + 1 + SATURATION_CHECKS):
                if ctx.dim(k) != _rank_in_degree(gens, k, ctx, compress, max_dense):
                    raise ConsistencyFailure("saturation did not persist", {"degree": k})
            return total
    raise NotCofinite(f"no saturation up to degree {bound}")


def is_primary(gens: Sequence[NormalHomogPoly], ctx: RingContext | None = None) -> bool:
    """Whether (gens) has finite colength; pure powers of x, y, z settle it at once."""
    gens = tuple(gens)
    ctx = ctx or gens[0].ctx
    seen = set()
    for g in gens:
        if g.is_monomial():
            (a, b, c), = g.terms
            if (a > 0) + (b > 0) + (c > 0) == 1:
                seen.add(0 if a else 1 if b else 2)
    # z^c with c >= d is not a monomial in normal form, but x and y powers suffice
    if {0, 1} <= seen:
        return True
    try:
        colength(gens, ctx)
    except NotCofinite:
        return False
    return True


@dataclass(frozen=True)
class HKRow:
    e: int
    q: int
    colength: int

    @property
    def normalized(self) -> Fraction:
        return Fraction(self.colength, self.q * self.q)


@dataclass
class HKSequence:
    p: int
    d: int
    rows: list[HKRow]

    CSV_HEADER = ("p", "e", "q", "colength", "normalized")

    def csv_rows(self) -> list[tuple]:
        return [(self.p, r.e, r.q, r.colength, str(r.normalized)) for r in self.rows]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "d": self.d,
            "rows": [
                {"e": r.e, "q": r.q, "colength": r.colength, "normalized": str(r.normalized)} for r in self.rows
            ],
        }


def hk_sequence(
    gens: Sequence[NormalHomogPoly],
    e_range: Sequence[int] | range,
    ctx: RingContext | None = None,
    max_dense: int = DEFAULT_MAX_DENSE,
) -> HKSequence:
    from .closure import frobenius_power

    gens = tuple(gens)
    ctx = _validate(gens, ctx)
    rows = []
    for e in e_range:
        fi = frobenius_power(gens, e, ctx)
        rows.append(HKRow(e, fi.q, colength(fi.effective, ctx, max_dense=max_dense)))
    ordered = sorted(rows, key=lambda r: r.e)
    for a, b in zip(ordered, ordered[1:]):
        if b.colength <= a.colength:
            raise ConsistencyFailure("colengths of Frobenius powers must increase", {"rows": [a, b]})
    return HKSequence(ctx.p, ctx.d, rows)


@dataclass(frozen=True)
class HKComparison:
    e: int
    q: int
    colength_i: int
    colength_if: int
    member: bool

    @property
    def equal(self) -> bool:
        return self.colength_i == self.colength_if


def hk_compare(
    gens: Sequence[NormalHomogPoly],
    f: NormalHomogPoly,
    e_range: Sequence[int] | range,
    ctx: RingContext | None = None,
    max_dense: int = DEFAULT_MAX_DENSE,
) -> list[HKComparison]:
    """Compare the colengths of I^[q] and (I + (f))^[q]; equality must match membership of f^q."""
    from .closure import frobenius_power

    gens = tuple(gens)
    ctx = _validate(gens, ctx)
    out = []
    for e in e_range:
        fi = frobenius_power(gens, e, ctx)
        fq = f.frobenius(e)
        li = colength(fi.effective, ctx, max_dense=max_dense)
        lf = colength(fi.effective + (fq,), ctx, max_dense=max_dense)
        member = membership(fq, fi.effective, ctx, max_dense=max_dense).member
        row = HKComparison(e, fi.q, li, lf, member)
        if row.equal != member:
            raise ConsistencyFailure(
                "colength equality disagrees with membership", {"e": e, "colengths": (li, lf), "member": member}
            )
        out.append(row)
    return out
