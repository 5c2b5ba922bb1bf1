"""Number-theory primitives, each pinned against an independent oracle."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selmercert import ntheory as nt
from selmercert.errors import SizeLimitError


def trial_division_is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def legendre_by_squares(a, p):
    # Exhaustive quadratic-residue table; the stated oracle for small p.
    if a % p == 0:
        return 0
    squares = {x * x % p for x in range(1, p)}
    return 1 if a % p in squares else -1


class TestPrimality:
    def test_small_range_against_trial_division(self):
        for n in range(2000):
            assert nt.is_prime(n) == trial_division_is_prime(n)

    def test_pinned_prime(self):
        assert nt.is_prime(7919)  # oracle: trial division
        assert trial_division_is_prime(7919)

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            nt.is_prime(2**65 + 1)


class TestFactorize:
    def test_unit(self):
        assert nt.factorize(1).factors == ()
        assert nt.factorize(-1).factors == ()

    def test_prime_input(self):
        assert nt.factorize(11).factors == ((11, 1),)

    def test_pinned(self):
        assert nt.factorize(75).factors == ((3, 1), (5, 2))  # oracle: trial division

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            nt.factorize(0)

    @given(st.lists(st.sampled_from([2, 3, 5, 7, 11, 13, 97, 101, 65537]),
                    min_size=0, max_size=6),
           st.booleans())
    @settings(max_examples=200)
    def test_round_trip(self, primes, negate):
        n = 1
        for p in primes:
            n *= p
        if n.bit_length() > 63:
            return  # stay inside the supported size bound
        if negate:
            n = -n
        fi = nt.factorize(n)
        prod = 1
        for p, e in fi.factors:
            prod *= p**e
        assert prod == abs(n)
        assert fi.value == n

    def test_rho_on_semiprime(self):
        n = 1000003 * 999983
        fi = nt.factorize(n)
        assert fi.factors == ((999983, 1), (1000003, 1))


class TestKronecker:
    def test_pinned_examples(self):
        assert nt.kronecker(1, 7) == 1
        assert nt.kronecker(-3, 5) == legendre_by_squares(-3, 5) == -1
        assert nt.kronecker(-3, 11) == legendre_by_squares(-3, 11) == -1

    def test_matches_legendre_for_odd_primes(self):
        for p in [3, 5, 7, 11, 13, 17, 19, 23, 199]:
            for a in range(-2 * p, 2 * p):
                assert nt.kronecker(a, p) == legendre_by_squares(a, p)

    def test_completely_multiplicative_both_arguments(self):
        # Exhaustive for |a|, |n| <= 200 via factor-based recomposition.
        for n in range(-200, 201):
            if n == 0:
                continue
            for a in range(-200, 201):
                lhs = nt.kronecker(a, n)
                rhs = 1
                if n < 0:
                    rhs *= nt.kronecker(a, -1)
                for p, e in (nt.factorize(n).factors if abs(n) > 1 else ()):
                    rhs *= nt.kronecker(a, p) ** e
                assert lhs == rhs, (a, n)

    def test_top_multiplicativity_sampled(self):
        rng = random.Random(5)
        for _ in range(500):
            a, b = rng.randint(-50, 50), rng.randint(-50, 50)
            n = rng.randint(1, 120)
            assert nt.kronecker(a * b, n) == nt.kronecker(a, n) * nt.kronecker(b, n)

    def test_n_zero_rejected(self):
        with pytest.raises(ValueError):
            nt.kronecker(3, 0)


class TestSqrtMod:
    def test_zero(self):
        for p in [2, 3, 7, 11]:
            assert nt.sqrt_mod(0, p) == 0

    def test_nonresidue(self):
        assert nt.sqrt_mod(3, 7) is None  # squares mod 7 are {0,1,2,4}

    def test_exhaustive_small_primes(self):
        for p in [2, 3, 5, 7, 11, 13, 17, 97, 193]:
            squares = {x * x % p for x in range(p)}
            for a in range(p):
                r = nt.sqrt_mod(a, p)
                if a in squares:
                    assert r is not None and r * r % p == a
                else:
                    assert r is None


class TestPolyModP:
    def test_factor_pinned_x2_plus_1_mod_2(self):
        f = nt.PolyModP.make([1, 0, 1], 2)
        xp1 = nt.PolyModP.make([1, 1], 2)
        assert nt.poly_factor_mod_p(f) == [xp1, xp1]  # oracle: roots mod 2

    def test_factor_linear(self):
        f = nt.PolyModP.make([-1, 1], 7)
        assert nt.poly_factor_mod_p(f) == [nt.PolyModP.make([6, 1], 7)]

    def test_factor_cyclotomic_2_mod_7(self):
        f = nt.PolyModP.make(list(nt.cyclotomic_polynomial(2)), 7)
        assert nt.poly_factor_mod_p(f) == [nt.PolyModP.make([1, 1], 7)]

    def test_remultiplication_random(self):
        rng = random.Random(17)
        primes = [2, 3, 5, 7, 11, 13, 97]
        for _ in range(1000):
            p = rng.choice(primes)
            deg = rng.randint(1, 8)
            coeffs = [rng.randrange(p) for _ in range(deg)] + [rng.randrange(1, p)]
            f = nt.PolyModP.make(coeffs, p)
            factors = nt.poly_factor_mod_p(f)
            prod = nt.PolyModP.make([f.coeffs[-1]], p)
            for g in factors:
                assert g.is_monic()
                prod = prod * g
            assert prod == f

    def test_zero_poly_rejected(self):
        with pytest.raises(ValueError):
            nt.poly_factor_mod_p(nt.PolyModP((), 5))


class TestCyclotomic:
    def test_small(self):
        assert nt.cyclotomic_polynomial(1) == (-1, 1)
        assert nt.cyclotomic_polynomial(2) == (1, 1)
        assert nt.cyclotomic_polynomial(4) == (1, 0, 1)
        assert nt.cyclotomic_polynomial(6) == (1, -1, 1)
        assert nt.cyclotomic_polynomial(12) == (1, 0, -1, 0, 1)

    def test_product_identity(self):
        # prod_{d | n} Phi_d = x^n - 1, checked at integer points.
        for n in [1, 2, 6, 10, 12, 30]:
            for x in [2, 3, 5]:
                prod = 1
                for d in range(1, n + 1):
                    if n % d == 0:
                        phi = nt.cyclotomic_polynomial(d)
                        prod *= sum(c * x**i for i, c in enumerate(phi))
                assert prod == x**n - 1

    def test_degree_is_euler_phi(self):
        for n in range(1, 40):
            assert len(nt.cyclotomic_polynomial(n)) - 1 == nt.euler_phi(n)


class TestOrder:
    def test_multiplicative_order(self):
        assert nt.multiplicative_order(7, 4) == 2  # 7 = 3 mod 4
        assert nt.multiplicative_order(2, 7) == 3
        with pytest.raises(ValueError):
            nt.multiplicative_order(2, 4)
