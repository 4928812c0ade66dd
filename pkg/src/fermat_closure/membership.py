"""Ideal membership and syzygies in R through graded linear algebra.

For a target degree m the multiplication map
    (+)_i R_{m - deg g_i} -> R_m,   (h_i) -> sum h_i g_i
is written as a sparse matrix whose columns are normal forms of
(basis monomial) * g_i.  Membership of f is a solve against that matrix,
syzygies are its kernel.  When every generator is multihomogeneous the
map splits along the Z/d + Z/d strands and each strand is solved alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .errors import DegreeMismatch, EmptyGenerators, ExponentOverflow
from .linalg import DEFAULT_MAX_DENSE, SparseSystem
from .ring import Monomial, NormalHomogPoly, RingContext, Strand

# a system is refused before enumeration once its target space is this many
# times larger than the dense budget
ROWS_PER_DENSE = 20


@dataclass
class GradedLinearSystem:
    """Multiplication map onto R_m, optionally restricted to one strand."""

    ctx: RingContext
    gens: tuple[NormalHomogPoly, ...]
    degree: int
    strand: Strand | None
    rows: tuple[Monomial, ...]
    labels: list[tuple[int, Monomial]]
    system: SparseSystem

    @property
    def source_degrees(self) -> tuple[int, ...]:
        return tuple(self.degree - g.degree for g in self.gens)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.labels)

    def vector(self, f: NormalHomogPoly) -> dict[int, int]:
        index = {m: i for i, m in enumerate(self.rows)}
        out = {}
        for m, v in f.terms.items():
            if m not in index:
                raise ValueError(f"monomial {m} is outside this system's target space")
            out[index[m]] = v
        return out

    def combination(self, x: Mapping[int, int]) -> tuple[NormalHomogPoly, ...]:
        """Turn a solution vector back into coefficient polynomials h_i."""
        parts: list[dict] = [{} for _ in self.gens]
        for j, v in x.items():
            i, u = self.labels[j]
            parts[i][u] = v
        return tuple(
            NormalHomogPoly(self.ctx, self.degree - g.degree, part) for g, part in zip(self.gens, parts)
        )


def build_system(
    gens: Sequence[NormalHomogPoly],
    degree: int,
    ctx: RingContext,
    strand: Strand | None = None,
    max_dense: int = DEFAULT_MAX_DENSE,
) -> GradedLinearSystem:
    """Columns are u * g_i for every normal monomial u of degree ``degree - deg g_i``.

    With ``strand`` set, every generator must be multihomogeneous and only the
    monomials u that land in the strand are used.
    """
    gens = tuple(gens)
    d = ctx.d
    estimate = ctx.dim(degree) // (d * d if strand is not None else 1)
    if estimate > ROWS_PER_DENSE * max_dense:
        raise ExponentOverflow(f"degree {degree} target space (~{estimate} rows) exceeds the budget")
    if strand is None:
        rows = ctx.basis(degree)
        index = ctx.index(degree)
    else:
        rows = ctx.strand_basis(degree, strand)
        index = {m: i for i, m in enumerate(rows)}
    labels: list[tuple[int, Monomial]] = []
    columns: list[dict[int, int]] = []
    for i, g in enumerate(gens):
        s = degree - g.degree
        if s < 0 or g.is_zero():
            continue
        if strand is None:
            sources = ctx.basis(s)
        else:
            gs = g.strand()
            if gs is None:
                raise ValueError("strand restriction needs multihomogeneous generators")
            sources = ctx.strand_basis(s, ((strand[0] - gs[0]) % d, (strand[1] - gs[1]) % d))
        terms = g.terms
        for u in sources:
            col = g.shift(u) if len(terms) > 1 else _monomial_shift(terms, u, ctx)
            columns.append({index[m]: v for m, v in col.items()})
            labels.append((i, u))
    return GradedLinearSystem(
        ctx, gens, degree, strand, rows, labels, SparseSystem(len(rows), columns, ctx.p, max_dense)
    )


def _monomial_shift(terms, u, ctx):
    (m, v), = terms.items()
    c = m[2] + u[2]
    if c < ctx.d:
        return {(m[0] + u[0], m[1] + u[1], c): v}
    return NormalHomogPoly(ctx, 0, terms).shift(u)


@dataclass
class MembershipResult:
    """Verdict of ``f in (g_1, ..., g_n)`` with its witness.

    IN carries coefficient polynomials h_i with sum h_i g_i = f.  OUT carries a
    linear functional on R_m (monomial -> coefficient) that kills every
    generator multiple of degree m but not f.
    """

    member: bool
    f: NormalHomogPoly
    gens: tuple[NormalHomogPoly, ...]
    coefficients: tuple[NormalHomogPoly, ...] | None = None
    functional: dict[Monomial, int] | None = None
    strands: tuple[Strand, ...] | None = None
    shapes: list[tuple[int, int]] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "IN" if self.member else "OUT"

    def evaluate(self, g: NormalHomogPoly) -> int:
        p = g.ctx.p
        return sum(self.functional.get(m, 0) * v for m, v in g.terms.items()) % p

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "degree": self.f.degree}
        if self.member:
            out["coefficients"] = [h.to_json() for h in self.coefficients]
        else:
            out["functional"] = [[*m, v] for m, v in sorted(self.functional.items(), key=lambda kv: (kv[0][2], kv[0][1], kv[0][0]))]
        return out


def _validate(gens: Sequence[NormalHomogPoly], ctx: RingContext | None):
    if not gens:
        raise EmptyGenerators("at least one generator is required")
    ctx = ctx or gens[0].ctx
    for g in gens:
        if g.ctx != ctx:
            raise DegreeMismatch("generators live in different rings")
        if g.is_zero():
            raise DegreeMismatch("the zero polynomial has no degree and cannot be a generator")
    return ctx


def _compressible(polys: Sequence[NormalHomogPoly]) -> bool:
    return all(g.strand() is not None for g in polys)


def membership(
    f: NormalHomogPoly,
    gens: Sequence[NormalHomogPoly],
    ctx: RingContext | None = None,
    strand_compression: bool = True,
    max_dense: int = DEFAULT_MAX_DENSE,
    verify: bool = True,
) -> MembershipResult:
    """Decide f in (gens) in R and return a checkable witness either way."""
    gens = tuple(gens)
    ctx = _validate(gens, ctx or f.ctx)
    if f.ctx != ctx:
        raise DegreeMismatch("f lives in another ring")
    m = f.degree
    if f.is_zero():
        zero = tuple(ctx.zero(m - g.degree) for g in gens)
        return MembershipResult(True, f, gens, coefficients=zero)

    if strand_compression and _compressible(gens):
        pieces = sorted(f.split_strands().items())
    else:
        pieces = [(None, f)]

    total = [ctx.zero(m - g.degree) for g in gens]
    shapes = []
    for strand, part in pieces:
        gls = build_system(gens, m, ctx, strand, max_dense)
        shapes.append(gls.shape)
        ok, vec = gls.system.solve(gls.vector(part))
        if not ok:
            functional = {gls.rows[r]: v for r, v in vec.items()}
            result = MembershipResult(
                False, f, gens, functional=functional, strands=(strand,) if strand else None, shapes=shapes
            )
            if verify:
                _verify_out(result, gls)
            return result
        for i, h in enumerate(gls.combination(vec)):
            total[i] = total[i] + h
    result = MembershipResult(
        True, f, gens, coefficients=tuple(total),
        strands=tuple(s for s, _ in pieces) if pieces[0][0] is not None else None, shapes=shapes,
    )
    if verify:
        verify_combination(f, gens, result.coefficients)
    return result


def verify_combination(f, gens, coefficients) -> None:
    ctx = f.ctx
    acc = ctx.zero(f.degree)
    for h, g in zip(coefficients, gens):
        if not h.is_zero():
            acc = acc + h * g
    if acc != f:
        raise AssertionError("membership combination does not reproduce f")


def _verify_out(result: MembershipResult, gls: GradedLinearSystem) -> None:
    if result.evaluate(result.f) == 0:
        raise AssertionError("separating functional vanishes on f")
    for i, u in gls.labels:
        col = gls.gens[i].shift(u)
        image = NormalHomogPoly(gls.ctx, gls.degree, col)
        if result.evaluate(image) != 0:
            raise AssertionError(f"separating functional does not vanish on {u}*g_{i}")


def syzygy_space(
    gens: Sequence[NormalHomogPoly],
    m: int,
    ctx: RingContext | None = None,
    strand_compression: bool = True,
    limit: int | None = None,
    max_dense: int = DEFAULT_MAX_DENSE,
) -> list[tuple[NormalHomogPoly, ...]]:
    """Basis of the degree-m syzygies (h_1..h_n), sum h_i g_i = 0, each re-verified.

    With ``limit`` set the search stops after that many vectors.
    """
    gens = tuple(gens)
    ctx = _validate(gens, ctx)
    if strand_compression and _compressible(gens):
        strands = list(ctx.strands())
    else:
        strands = [None]
    out: list[tuple[NormalHomogPoly, ...]] = []
    for strand in strands:
        gls = build_system(gens, m, ctx, strand, max_dense)
        if not gls.labels:
            continue
        for vec in gls.system.kernel():
            hs = gls.combination(vec)
            acc = ctx.zero(m)
            for h, g in zip(hs, gens):
                if not h.is_zero():
                    acc = acc + h * g
            if not acc.is_zero():
                raise AssertionError("kernel vector is not a syzygy")
            out.append(hs)
            if limit is not None and len(out) >= limit:
                return out
    return out
