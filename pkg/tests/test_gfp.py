from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermat_closure.errors import NotPrime, ZeroInverse
from fermat_closure.gfp import (
    FpElement,
    PrimeModulus,
    binom_exact,
    binom_mod_p,
    binom_mod_p_int,
    binomial_row_mod_p,
    inv_mod_p,
    to_mod_p,
)

PRIMES = [2, 3, 5, 7, 11, 13, 23, 31, 37, 101]


class TestPrimeModulus:
    def test_rejects_composites_and_small_values(self):
        for bad in (0, 1, 4, 9, 49, 91):
            with pytest.raises(NotPrime):
                PrimeModulus(bad)

    def test_rejects_non_integers(self):
        with pytest.raises(NotPrime):
            PrimeModulus(7.0)

    def test_elements_are_reduced(self):
        F = PrimeModulus(7)
        assert F(10).value == 3
        assert F(-1).value == 6
        assert F(3) == 10


class TestBinomials:
    def test_exact_out_of_range_is_zero(self):
        assert binom_exact(5, -1) == 0
        assert binom_exact(5, 6) == 0
        assert binom_exact(10, 3) == 120

    def test_lucas_examples(self):
        # C(228, 114) mod 7: 228 = 4*49 + 4*7 + 4, 114 = 2*49 + 2*7 + 2 -> C(4,2)^3 = 216 = 6 mod 7
        assert binom_mod_p_int(228, 114, 7) == 6
        assert binom_mod_p_int(2 * 23**2, 23**2, 23) == 2
        assert binom_mod_p(10, 3, 7) == FpElement(120, PrimeModulus(7))

    @given(st.integers(0, 400), st.integers(-3, 400), st.sampled_from(PRIMES))
    def test_lucas_matches_exact(self, n, k, p):
        assert binom_mod_p_int(n, k, p) == binom_exact(n, k) % p

    @settings(max_examples=40)
    @given(st.integers(0, 700), st.sampled_from(PRIMES))
    def test_row_matches_exact(self, n, p):
        assert binomial_row_mod_p(n, p) == tuple(math.comb(n, k) % p for k in range(n + 1))


class TestFieldArithmetic:
    @given(st.integers(), st.integers(), st.integers(), st.sampled_from(PRIMES))
    def test_ring_axioms(self, a, b, c, p):
        F = PrimeModulus(p)
        x, y, w = F(a), F(b), F(c)
        assert x * (y + w) == x * y + x * w
        assert (x + y) - y == x
        assert -x + x == 0

    @given(st.integers(), st.sampled_from(PRIMES))
    def test_inverse(self, a, p):
        if a % p == 0:
            with pytest.raises(ZeroInverse):
                inv_mod_p(a, p)
        else:
            assert (inv_mod_p(a, p) * a).value == 1

    @given(st.integers(1, 10**6), st.sampled_from(PRIMES))
    def test_fermat_little(self, a, p):
        if a % p:
            assert PrimeModulus(p)(a) ** (p - 1) == 1

    def test_division_by_zero(self):
        F = PrimeModulus(5)
        with pytest.raises(ZeroInverse):
            F(3) / F(0)

    def test_mixed_fields_rejected(self):
        with pytest.raises(ValueError):
            PrimeModulus(5)(1) + PrimeModulus(7)(1)


class TestRationals:
    def test_image_of_fraction(self):
        assert to_mod_p(Fraction(1, 2), 7) == 4
        assert to_mod_p(Fraction(-3, 4), 11) == (-3 * pow(4, -1, 11)) % 11

    def test_denominator_divisible_by_p(self):
        with pytest.raises(ZeroInverse):
            to_mod_p(Fraction(1, 14), 7)
