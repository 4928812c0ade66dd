from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermat_closure.errors import DegreeMismatch, ExponentOverflow, InvalidRing, NotHomogeneous, NotPrime
from fermat_closure.ring import RingContext, dim_graded_piece, normal_form, parse_polynomial

from oracles import X, Y, Z, sympy_normal_form, to_expr


class TestRingContext:
    def test_rejects_bad_parameters(self):
        with pytest.raises(InvalidRing):
            RingContext(2, 3)
        with pytest.raises(InvalidRing):
            RingContext(7, 7)
        with pytest.raises(NotPrime):
            RingContext(7, 9)

    def test_equality_by_parameters(self):
        assert RingContext(7, 3) == RingContext(7, 3)
        assert hash(RingContext(7, 3)) == hash(RingContext(7, 3))
        assert RingContext(7, 3) != RingContext(7, 5)

    @pytest.mark.parametrize("d", [3, 5, 7])
    def test_dimension_matches_basis(self, d):
        ctx = RingContext(d, 2 if d != 2 else 3)
        for n in range(0, 3 * d):
            assert len(ctx.basis(n)) == ctx.dim(n) == dim_graded_piece(n, d)

    def test_dimension_values(self):
        assert dim_graded_piece(6, 7) == 28
        assert dim_graded_piece(7, 7) == 35
        assert dim_graded_piece(100, 7) == 700 - 14

    def test_strands_partition_the_basis(self):
        ctx = RingContext(7, 3)
        n = 30
        pieces = [ctx.strand_basis(n, s) for s in ctx.strands()]
        assert sum(len(b) for b in pieces) == ctx.dim(n)
        assert set().union(*map(set, pieces)) == set(ctx.basis(n))


class TestNormalForm:
    def test_fermat_relation(self):
        ctx = RingContext(7, 3)
        assert ctx.z**7 == ctx.parse("x7 + y7")
        assert str(ctx.z**8) == "x^7*z + y^7*z"
        assert ctx.z**3 * ctx.z**5 == ctx.z**8

    def test_parse_formats(self):
        assert parse_polynomial("x^3*y^3") == {(3, 3, 0): 1}
        assert parse_polynomial("x3y3") == {(3, 3, 0): 1}
        assert parse_polynomial("2x^7 - y7", 5) == {(7, 0, 0): 2, (0, 7, 0): 4}
        assert parse_polynomial("1") == {(0, 0, 0): 1}
        with pytest.raises(ValueError):
            parse_polynomial("x^^2")

    def test_inhomogeneous_rejected(self):
        with pytest.raises(NotHomogeneous):
            RingContext(7, 3).parse("x + y^2")

    def test_exponent_budget(self):
        with pytest.raises(ExponentOverflow):
            normal_form({(2**64, 0, 0): 1}, RingContext(7, 3))

    def test_mixed_rings(self):
        with pytest.raises(DegreeMismatch):
            RingContext(7, 3).x + RingContext(7, 5).x

    @settings(max_examples=40, deadline=None)
    @given(
        st.sampled_from([(3, 2), (5, 3), (7, 2), (7, 3)]),
        st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9), st.integers(1, 6)), min_size=1, max_size=4),
        st.integers(0, 25),
    )
    def test_matches_sympy_reduction(self, dp, coeffs, c):
        d, p = dp
        ctx = RingContext(d, p)
        n = 9 + c
        raw = {(a, n - a - min(b, n - a), min(b, n - a)): v for a, b, v in coeffs if a <= n}
        f = normal_form(raw, ctx)
        expr = sum(v * X**a * Y**b * Z**cc for (a, b, cc), v in raw.items())
        assert dict(f.terms) == sympy_normal_form(expr, d, p)


def polys(ctx, degree):
    monomials = ctx.basis(degree)
    return st.dictionaries(st.sampled_from(monomials), st.integers(1, ctx.p - 1), max_size=5).map(
        lambda t: ctx.poly(t, degree=degree)
    )


class TestArithmetic:
    ctx = RingContext(7, 3)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_product_matches_sympy(self, data):
        f = data.draw(polys(self.ctx, 5))
        g = data.draw(polys(self.ctx, 6))
        assert dict((f * g).terms) == sympy_normal_form(to_expr(f) * to_expr(g), 7, 3)

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_ring_laws(self, data):
        f, g, h = (data.draw(polys(self.ctx, k)) for k in (3, 4, 4))
        assert f * (g + h) == f * g + f * h
        assert f * g == g * f
        assert (g - h) + h == g

    @settings(max_examples=30, deadline=None)
    @given(st.data(), st.integers(1, 3))
    def test_frobenius_is_repeated_power(self, data, e):
        ctx = RingContext(7, 2)
        f = data.draw(polys(ctx, 3))
        assert f.frobenius(e) == f ** (2**e)

    def test_frobenius_additive(self):
        ctx = RingContext(7, 3)
        f = ctx.parse("x + y + z")
        assert f.frobenius(1) == ctx.parse("x3 + y3 + z3")
        assert f**3 == f.frobenius(1)

    def test_strand_split_recombines(self):
        f = self.ctx.parse("x3y3 + x z^5 + y^6")
        parts = f.split_strands()
        assert len(parts) == 3
        total = self.ctx.zero(6)
        for piece in parts.values():
            total = total + piece
        assert total == f

    def test_json_round_trip(self):
        f = self.ctx.parse("x7 + 2y3z4")
        rebuilt = self.ctx.poly({(a, b, c): v for a, b, c, v in f.to_json()}, degree=7)
        assert rebuilt == f
