from __future__ import annotations

import json
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, binomial

from fermat_closure.certificates import (
    BinomialMatrixSpec,
    MembershipCertificate37,
    bivariate_oracle,
    build_certificate,
    build_membership_certificate,
    build_nonmembership_certificate,
    certificate_json,
    column_reduce_binomial,
    det_m5_mod_p,
    nonmembership_identities,
    ring_oracle,
    surviving_terms,
    van_zeipel_det,
    van_zeipel_det_mod_p,
    verify_certificate,
)
from fermat_closure.errors import DenominatorZero, HypothesisFailed, NotPrime, PDividesDenominator
from fermat_closure.linalg import rank, solve


def exact_det(a, b, r):
    return Fraction(int(Matrix(r, r, lambda i, j: binomial(a, b + i - j)).det()))


class TestColumnReduction:
    def test_single_column_unchanged(self):
        spec = BinomialMatrixSpec(9, 3, 4, 1)
        assert column_reduce_binomial(spec) == spec.materialize()

    def test_hand_example(self):
        assert column_reduce_binomial(BinomialMatrixSpec(4, 1, 2, 2)) == [[4, 5], [6, 10]]

    @settings(max_examples=60)
    @given(st.integers(0, 30), st.integers(0, 30), st.integers(1, 7), st.integers(1, 7))
    def test_reaches_shifted_binomials_with_same_span(self, a, b, r, s):
        spec = BinomialMatrixSpec(a, b, r, s)
        reduced, T = column_reduce_binomial(spec, with_transform=True)
        target = [[int(binomial(a + j, b + i)) for j in range(s)] for i in range(r)]
        assert reduced == target
        A = np.array(spec.materialize(), dtype=object)
        assert (A.dot(np.array(T, dtype=object)) == np.array(reduced, dtype=object)).all()
        # unit upper triangular transform: invertible, so spans agree
        assert all(T[i][i] == 1 for i in range(s)) and all(T[i][j] == 0 for i in range(s) for j in range(i))


class TestVanZeipel:
    def test_full_suite_against_direct_determinant(self):
        checked = 0
        for r in range(1, 7):
            for a in range(0, 13):
                for b in range(0, a + 1):
                    assert van_zeipel_det(a, b, r) == exact_det(a, b, r), (a, b, r)
                    checked += 1
        assert checked == 6 * 91

    def test_small_values(self):
        assert van_zeipel_det(4, 1, 2) == 10
        assert van_zeipel_det(11, 4, 1) == 330

    def test_mod_p_image(self):
        ell, p = 3, 23
        n = 2 * ell + 1
        value = van_zeipel_det_mod_p(4 * ell + 2, n, n, p)
        assert value != 0
        assert value == to_mod(exact_det(4 * ell + 2, n, n), p)

    def test_errors(self):
        with pytest.raises(DenominatorZero):
            van_zeipel_det(3, -2, 2)
        with pytest.raises(PDividesDenominator):
            van_zeipel_det_mod_p(10, 1, 3, 2)


def to_mod(q: Fraction, p: int) -> int:
    return q.numerator * pow(q.denominator, -1, p) % p


class TestMembershipCertificates:
    def test_p3_coefficient(self):
        cert = build_membership_certificate(3)
        assert cert.coefficients == (2,)
        assert surviving_terms(cert) == {1: 1}
        assert verify_certificate(cert)

    @pytest.mark.parametrize("p", [17, 31, 59, 73])
    def test_certificates_verify(self, p):
        cert = build_membership_certificate(p)
        ell = (p - 3) // 7
        A = np.array(cert.matrix(), dtype=np.int64)
        e = np.zeros(2 * ell + 1, dtype=np.int64)
        e[ell] = 1
        assert np.array_equal(A.dot(np.array(cert.coefficients)) % p, e)
        assert verify_certificate(cert)

    def test_tampered_certificate_rejected(self):
        cert = build_membership_certificate(17)
        bad = MembershipCertificate37(17, 2, (cert.coefficients[0] + 1,) + cert.coefficients[1:])
        assert not verify_certificate(bad)

    def test_wrong_residue(self):
        with pytest.raises(HypothesisFailed):
            build_membership_certificate(23)
        with pytest.raises(NotPrime):
            build_membership_certificate(10)

    def test_json(self):
        data = json.loads(certificate_json(build_membership_certificate(17)))
        assert data["kind"] == "membership" and data["ell"] == 2 and len(data["coefficients"]) == 5


def m5_by_elimination(ell: int) -> Fraction:
    if ell == 0:
        return Fraction(1)
    M = Matrix(ell, ell, lambda i, j: binomial(2 * ell + 1, 1 + i - j))
    return Fraction(int(M.det()))


class TestNonMembershipCertificates:
    @pytest.mark.parametrize("p,det", [(2, 1), (23, 15), (37, 6), (107, 20)])
    def test_det_m5(self, p, det):
        cert = build_nonmembership_certificate(p)
        assert cert.det_m5 == det
        assert cert.det_m5 == to_mod(m5_by_elimination(cert.ell), p)

    def test_p23_bookkeeping(self):
        cert = build_nonmembership_certificate(23)
        assert cert.k == 75 and 4 * 23**2 == 28 * 75 + 16
        assert cert.covers_level(23**2) and cert.covers_level(23**3)
        assert not cert.covers_level(24)

    def test_identities_hold_for_many_ell(self):
        for ell in range(0, 100_001):
            ids = nonmembership_identities(7 * ell + 2, ell)
            assert all(v for key, v in ids.items() if key != "k"), ell

    @pytest.mark.parametrize("ell", range(1, 9))
    def test_m5_closed_form(self, ell):
        assert m5_by_elimination(ell) == Fraction(int(binomial(3 * ell, ell)))

    @pytest.mark.parametrize("p", [23, 37])
    def test_elimination_chain(self, p):
        # e_{l+1} is outside the column span of M1, and M4 minus row l+1 has full rank
        ell = (p - 2) // 7
        M1 = np.array(BinomialMatrixSpec(4 * ell + 1, 2 * ell, 2 * ell + 1, 2 * ell).materialize(p), dtype=np.int64)
        e = np.zeros(2 * ell + 1, dtype=np.int64)
        e[ell] = 1
        assert solve(M1, e, p) is None
        M4 = np.array(BinomialMatrixSpec(2 * ell + 1, 0, 2 * ell + 1, 2 * ell).materialize(p), dtype=np.int64)
        assert rank(np.delete(M4, ell, axis=0), p) == 2 * ell

    def test_tampered_rejected(self):
        cert = build_nonmembership_certificate(23)
        assert not verify_certificate(replace(cert, det_m5=0))
        assert not verify_certificate(replace(cert, ell=2))

    def test_det_formula_mod_p(self):
        assert det_m5_mod_p(3, 23) == 84 % 23


class TestOracleAgreement:
    @pytest.mark.parametrize("p", [2, 3, 17, 23, 31])
    def test_certificate_matches_generic_membership(self, p):
        cert = build_certificate(p)
        generic = ring_oracle(p, cert.level)
        assert generic.member == (cert.kind == "membership")

    @pytest.mark.parametrize("p", [2, 23])
    def test_bivariate_statement(self, p):
        assert not bivariate_oracle(p, (p - 2) // 7).member

    def test_other_residues_have_no_certificate(self):
        assert build_certificate(5) is None and build_certificate(11) is None
