"""Frobenius powers, Frobenius-closure search and the tight-closure decision.

The tight-closure decision never materializes a test element.  It relies
on the criterion: if the Frobenius pull-back at level e of the syzygy
bundle of three forms is not semistable, with a destabilizing sub-line
bundle of positive degree, and p^u >= 2g + 1, then for f of the balanced
degree, f is in the tight closure iff f^Q is in I^[Q] where Q = p^(u+e).
The arithmetic hypotheses are checked here; the criterion itself is trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from . import certificates as certs
from .errors import ConsistencyFailure, ExponentOverflow, UnbalancedDegrees
from .hilbert_kunz import is_primary
from .linalg import DEFAULT_MAX_DENSE
from .membership import MembershipResult, membership
from .ring import EXPONENT_LIMIT, NormalHomogPoly, RingContext
from .semistability import (
    InstabilityWitness,
    NonIntegral,
    balanced_twist,
    detect_instability,
    genus_plane_curve,
    lemma_syzygy_construction,
    lemma_window,
)


class VerdictKind(str, Enum):
    IN_IDEAL = "InIdeal"
    IN_FROBENIUS_CLOSURE = "InFrobeniusClosure"
    OUT_AT_ALL_TESTED = "OutAtAllTested"
    TIGHT_IN = "TightIn"
    TIGHT_OUT = "TightOut"
    UNDECIDED = "Undecided"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class FrobeniusIdeal:
    base: tuple[NormalHomogPoly, ...]
    e: int
    effective: tuple[NormalHomogPoly, ...]

    @property
    def q(self) -> int:
        return self.base[0].ctx.p ** self.e

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(g.degree for g in self.effective)


def frobenius_power(gens: Sequence[NormalHomogPoly], e: int, ctx: RingContext | None = None) -> FrobeniusIdeal:
    """I^[p^e]: each generator raised to p^e (exponent scaling, then normal form)."""
    gens = tuple(gens)
    if e < 0:
        raise ValueError("Frobenius exponent must be nonnegative")
    ctx = ctx or gens[0].ctx
    q = ctx.p**e
    if max(g.degree for g in gens) * q > EXPONENT_LIMIT:
        raise ExponentOverflow(f"degree {max(g.degree for g in gens)} * {q} exceeds the exponent limit")
    return FrobeniusIdeal(gens, e, tuple(g.frobenius(e) for g in gens))


@dataclass
class ClosureVerdict:
    """Outcome of a closure test.

    ``e`` is the Frobenius level at which membership was settled (or the
    last level tested), ``q`` the matching exponent.  For tight-closure
    verdicts ``q`` is the exponent whose membership decided the answer,
    ``witness`` the instability witness used, and ``route`` records which
    engine produced the answer.
    """

    kind: VerdictKind
    e: int | None = None
    q: int | None = None
    route: str = "generic"
    reason: str | None = None
    membership: MembershipResult | None = None
    certificate: object | None = None
    witness: InstabilityWitness | None = None
    levels: list[tuple[int, str]] = field(default_factory=list)

    @property
    def is_in(self) -> bool:
        return self.kind in (VerdictKind.IN_IDEAL, VerdictKind.IN_FROBENIUS_CLOSURE, VerdictKind.TIGHT_IN)

    def __str__(self):
        if self.kind in (VerdictKind.TIGHT_IN, VerdictKind.TIGHT_OUT):
            return f"{self.kind} Q={self.q}"
        if self.kind == VerdictKind.IN_FROBENIUS_CLOSURE:
            return f"{self.kind}(e={self.e})"
        if self.kind == VerdictKind.OUT_AT_ALL_TESTED:
            return f"{self.kind}(e_max={self.e})"
        if self.kind == VerdictKind.UNDECIDED:
            return f"{self.kind}({self.reason})"
        return str(self.kind)

    def to_json(self) -> dict:
        out = {"kind": str(self.kind), "e": self.e, "q": self.q, "route": self.route}
        if self.reason:
            out["reason"] = self.reason
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        out["levels"] = [list(lv) for lv in self.levels]
        return out


def in_frobenius_closure(
    f: NormalHomogPoly,
    gens: Sequence[NormalHomogPoly],
    e_max: int = 2,
    ctx: RingContext | None = None,
    max_dense: int = DEFAULT_MAX_DENSE,
) -> ClosureVerdict:
    """Smallest e <= e_max with f^(p^e) in I^[p^e]; e = 0 is plain membership.

    When the budget runs out at some level e >= 1 the search stops and
    reports OutAtAllTested for the levels actually completed.
    """
    gens = tuple(gens)
    ctx = ctx or f.ctx
    levels: list[tuple[int, str]] = []
    for e in range(0, e_max + 1):
        fq = f.frobenius(e)
        try:
            res = membership(fq, frobenius_power(gens, e, ctx).effective, ctx, max_dense=max_dense)
        except ExponentOverflow as exc:
            if e == 0:
                raise
            return ClosureVerdict(
                VerdictKind.OUT_AT_ALL_TESTED, e - 1, ctx.p ** (e - 1), "generic",
                reason=f"budget reached at e={e}: {exc}", levels=levels,
            )
        levels.append((e, res.verdict))
        if res.member:
            kind = VerdictKind.IN_IDEAL if e == 0 else VerdictKind.IN_FROBENIUS_CLOSURE
            return ClosureVerdict(kind, e, ctx.p**e, "generic", membership=res, levels=levels)
    return ClosureVerdict(VerdictKind.OUT_AT_ALL_TESTED, e_max, ctx.p**e_max, "generic", levels=levels)


@dataclass(frozen=True)
class SearchBounds:
    """Knobs for ``decide_tight_closure``.

    route: "auto" uses the binomial certificates for the degree-7 family
    when they apply, "generic" never does, "certificate" insists on them.
    """

    instability_e_max: int = 2
    frobenius_e_max: int = 1
    max_dense: int = DEFAULT_MAX_DENSE
    oracle_bound: int = certs.DEFAULT_ORACLE_BOUND
    route: str = "auto"

    def __post_init__(self):
        if self.route not in ("auto", "generic", "certificate"):
            raise ValueError(f"unknown route {self.route!r}")


def minimal_u(p: int, d: int) -> int:
    """Least u >= 0 with p^u >= 2g + 1."""
    bound = 2 * genus_plane_curve(d) + 1
    u = 0
    while p**u < bound:
        u += 1
    return u


def is_certificate_family(f: NormalHomogPoly, gens: Sequence[NormalHomogPoly], ctx: RingContext) -> bool:
    """f = x^3 y^3 and I = (x^4, y^4, z^4) on the degree-7 curve."""
    if ctx.d != certs.FAMILY_DEGREE or len(gens) != 3:
        return False
    target = {ctx.monomial(4), ctx.monomial(0, 4), ctx.monomial(0, 0, 4)}
    return f == ctx.monomial(3, 3) and set(gens) == target


def _is_pure_fourth_powers(gens, ctx) -> bool:
    return set(gens) == {ctx.monomial(4), ctx.monomial(0, 4), ctx.monomial(0, 0, 4)}


def _check_hypotheses(f, gens, ctx):
    if len(gens) != 3:
        raise ValueError("the tight-closure decision needs exactly three generators")
    m = balanced_twist(*(g.degree for g in gens))
    if isinstance(m, NonIntegral) or f.degree != m:
        raise UnbalancedDegrees(
            f"deg f = {f.degree} but the generator degrees {[g.degree for g in gens]} need 2m = their sum"
        )
    if not is_primary(gens, ctx):
        raise ValueError("the generators do not define an ideal primary to the irrelevant ideal")


def decide_tight_closure(
    f: NormalHomogPoly,
    gens: Sequence[NormalHomogPoly],
    ctx: RingContext | None = None,
    bounds: SearchBounds | None = None,
) -> ClosureVerdict:
    gens = tuple(gens)
    ctx = ctx or f.ctx
    bounds = bounds or SearchBounds()
    _check_hypotheses(f, gens, ctx)
    family = is_certificate_family(f, gens, ctx) and ctx.p % certs.FAMILY_DEGREE in (2, 3)
    if bounds.route == "certificate" and not family:
        raise ValueError("no binomial certificate applies to this input")
    if family and bounds.route != "generic":
        return _certificate_route(ctx, bounds)
    return _generic_route(f, gens, ctx, bounds)


def _certificate_route(ctx: RingContext, bounds: SearchBounds) -> ClosureVerdict:
    p = ctx.p
    cert = certs.build_certificate(p)
    if not certs.verify_certificate(cert, ctx, bounds.oracle_bound):
        raise ConsistencyFailure(f"certificate for p={p} failed verification", {"p": p, "certificate": cert.to_json()})
    if p % certs.FAMILY_DEGREE == 3:
        # membership at level p lifts to every higher level: f is in the Frobenius closure
        return ClosureVerdict(
            VerdictKind.TIGHT_IN, 1, cert.level, "certificate", certificate=cert,
            reason="Frobenius closure is contained in the tight closure", levels=[(1, "IN")],
        )
    witness = lemma_syzygy_construction(certs.FAMILY_DEGREE, p)
    q = p ** (minimal_u(p, ctx.d) + witness.e)
    if not cert.covers_level(q):
        raise ConsistencyFailure(f"non-membership certificate does not reach Q={q}", {"p": p, "Q": q})
    return ClosureVerdict(
        VerdictKind.TIGHT_OUT, witness.e, q, "certificate", certificate=cert, witness=witness,
        levels=[(minimal_u(p, ctx.d) + witness.e, "OUT")],
    )


def _find_witness(gens, ctx, bounds) -> InstabilityWitness | None:
    if _is_pure_fourth_powers(gens, ctx) and lemma_window(ctx.d, ctx.p) is not None:
        return lemma_syzygy_construction(ctx.d, ctx.p)
    return detect_instability(gens, bounds.instability_e_max, ctx, bounds.max_dense)


def _generic_route(f, gens, ctx, bounds) -> ClosureVerdict:
    fc = in_frobenius_closure(f, gens, bounds.frobenius_e_max, ctx, bounds.max_dense)
    if fc.is_in:
        return ClosureVerdict(
            VerdictKind.TIGHT_IN, fc.e, fc.q, "frobenius-closure", membership=fc.membership,
            reason="Frobenius closure is contained in the tight closure", levels=fc.levels,
        )
    witness = _find_witness(gens, ctx, bounds)
    if witness is None:
        return ClosureVerdict(VerdictKind.UNDECIDED, reason="no instability witness", levels=fc.levels)
    level = minimal_u(ctx.p, ctx.d) + witness.e
    try:
        res = membership(f.frobenius(level), frobenius_power(gens, level, ctx).effective, ctx, max_dense=bounds.max_dense)
    except ExponentOverflow as exc:
        raise ExponentOverflow(f"level Q={ctx.p ** level}: {exc}; the certificate route may apply") from exc
    kind = VerdictKind.TIGHT_IN if res.member else VerdictKind.TIGHT_OUT
    return ClosureVerdict(
        kind, witness.e, ctx.p**level, "generic", membership=res, witness=witness,
        levels=fc.levels + [(level, res.verdict)],
    )
