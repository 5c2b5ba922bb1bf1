"""Curve arithmetic: traces vs brute-force enumeration, reduction types vs
singular point counts, surjectivity witnesses, local torsion criterion."""

import pytest

from selmercert import curve as cv
from selmercert.errors import BadReductionError, GoodReductionError, SizeLimitError
from selmercert.ntheory import primes_up_to


class TestModelValidation:
    def test_bad_discriminant_rejected(self):
        with pytest.raises(ValueError):
            cv.CurveModel(0, -1, 1, -10, -20, cv.factorize(11), -161050)

    def test_conductor_support_mismatch_rejected(self):
        with pytest.raises(ValueError):
            cv.CurveModel.from_a_invariants((0, -1, 1, -10, -20), 7)

    def test_fixture_discriminants(self, e11a1, e37a1, e27a1, e14a1):
        assert e11a1.discriminant == -(11**5)
        assert e37a1.discriminant == 37
        assert e27a1.discriminant == -(3**9)
        assert e14a1.discriminant == -(2**6) * 7**3


class TestTraces:
    def test_pinned_small_traces(self, e11a1):
        # Oracle: naive affine point enumeration.
        assert cv.trace_of_frobenius(e11a1, 2) == 3 - cv.count_points_brute(e11a1, 2) == -2
        assert cv.trace_of_frobenius(e11a1, 5) == 6 - cv.count_points_brute(e11a1, 5) == 1

    def test_supersingular_count_identity(self, e11a1):
        # q = 19 is supersingular for 11a1: the count equals q + 1.
        assert cv.count_points_brute(e11a1, 19) == 20
        assert cv.trace_of_frobenius(e11a1, 19) == 0

    def test_against_brute_force_up_to_100(self, e11a1, e37a1, e27a1):
        for E in (e11a1, e37a1, e27a1):
            for q in primes_up_to(100):
                if E.conductor_value % q == 0:
                    continue
                assert cv.trace_of_frobenius(E, q) == q + 1 - cv.count_points_brute(E, q)

    def test_hasse_bound_up_to_1000(self, e11a1, e37a1, e27a1):
        for E in (e11a1, e37a1, e27a1):
            for q in primes_up_to(1000):
                if E.conductor_value % q == 0:
                    continue
                a = cv.trace_of_frobenius(E, q)
                assert a * a <= 4 * q

    def test_bsgs_matches_naive_count(self, e11a1, e14a1):
        for E in (e11a1, e14a1):
            for q in [101, 1009, 10007, 10009]:
                assert cv._group_order_bsgs(E, q) == cv.count_points(E, q)

    def test_bad_prime_rejected(self, e11a1):
        with pytest.raises(BadReductionError):
            cv.trace_of_frobenius(e11a1, 11)

    def test_size_cap(self, e11a1):
        with pytest.raises(SizeLimitError):
            cv.trace_of_frobenius(e11a1, 1_000_003)


def nonsingular_reduction_count(E, q):
    # Oracle: total point count on the (singular) reduction minus the
    # rational node; equals q-1 for split and q+1 for nonsplit tori.
    return cv.count_points_brute(E, q) - 1


class TestReductionData:
    def test_11a1_at_11(self, e11a1):
        rd = cv.reduction_data(e11a1, 11)
        assert rd.kind == cv.SPLIT_MULT and rd.v_disc == 5
        assert nonsingular_reduction_count(e11a1, 11) == 10  # = q - 1

    def test_37a1_nonsplit(self, e37a1):
        rd = cv.reduction_data(e37a1, 37)
        assert rd.kind == cv.NONSPLIT_MULT and rd.v_disc == 1
        assert nonsingular_reduction_count(e37a1, 37) == 38  # = q + 1

    def test_14a1_both_bad_primes(self, e14a1):
        rd2 = cv.reduction_data(e14a1, 2)
        rd7 = cv.reduction_data(e14a1, 7)
        assert rd2.kind == cv.NONSPLIT_MULT and rd2.v_disc == 6
        assert rd7.kind == cv.SPLIT_MULT and rd7.v_disc == 3
        assert nonsingular_reduction_count(e14a1, 2) == 3  # = q + 1
        assert nonsingular_reduction_count(e14a1, 7) == 6  # = q - 1

    def test_additive(self, e27a1):
        rd = cv.reduction_data(e27a1, 3)
        assert rd.kind == cv.ADDITIVE and rd.v_disc == 9 >= 2

    def test_good_prime_rejected(self, e11a1):
        with pytest.raises(GoodReductionError):
            cv.reduction_data(e11a1, 7)


class TestSurjectivityWitness:
    def test_11a1_p7(self, e11a1):
        w = cv.surjectivity_witness(e11a1, 7, 20)
        # First-found witnesses under the increasing-l scan. The split
        # witness l=5 has disc 1-20 = 2 mod 7, a nonzero square; the
        # nonsplit witness l=2 has disc 4-8 = 3 mod 7, a nonsquare.
        assert w == cv.SurjectivityWitness(7, 5, 2, 3)
        # l=5 is also a valid exceptional witness: u = 1/5 = 3 mod 7.
        assert pow(5, -1, 7) == 3

    def test_no_data_is_undetermined(self, e11a1):
        assert cv.surjectivity_witness(e11a1, 7, 1) is None

    def test_cm_curve_never_certified(self, e27a1):
        # 27a1 has CM; the image is contained in a Cartan normalizer, so a
        # correct one-sided test must stay undetermined.
        assert cv.surjectivity_witness(e27a1, 5, 500) is None
        assert cv.surjectivity_witness(e27a1, 7, 500) is None

    def test_monotone_in_bound(self, e11a1):
        got = False
        for bound in [2, 5, 10, 20, 50, 100]:
            w = cv.surjectivity_witness(e11a1, 7, bound)
            if got:
                assert w is not None
            got = got or (w is not None)
        assert got


class TestLocalTorsion:
    def test_split_mult_verified(self, e11a1):
        assert cv.local_torsion_pfree(e11a1, 11, 2, 7) is True  # 7 | neither 5 nor 120

    def test_split_mult_undetermined(self, e11a1):
        # 5 divides 11^2 - 1 = 120.
        assert cv.local_torsion_pfree(e11a1, 11, 2, 5) is False

    def test_additive_always_verified(self, e27a1):
        for p in [5, 7, 11, 13, 101]:
            for f in [1, 2, 3, 6]:
                assert cv.local_torsion_pfree(e27a1, 3, f, p) is True

    def test_nonsplit_odd_degree_uses_q_plus_one(self, e37a1):
        # f = 1, nonsplit: bound q + 1 = 38 = 2 * 19; p = 19 undetermined.
        assert cv.local_torsion_pfree(e37a1, 37, 1, 19) is False
        assert cv.local_torsion_pfree(e37a1, 37, 1, 7) is True

    def test_preconditions(self, e11a1):
        with pytest.raises(ValueError):
            cv.local_torsion_pfree(e11a1, 11, 2, 3)
        with pytest.raises(ValueError):
            cv.local_torsion_pfree(e11a1, 11, 0, 7)
