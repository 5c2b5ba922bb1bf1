"""Form class groups, characters, Frobenius classes, cyclotomic arithmetic."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selmercert import quadratic as qd
from selmercert.errors import BadPrimeError
from selmercert.ntheory import primes_up_to


def discriminants(limit):
    for D in range(-3, -limit - 1, -1):
        if qd.is_fundamental_discriminant(D):
            yield D


class TestOrders:
    def test_fundamental_check(self):
        assert qd.is_fundamental_discriminant(-3)
        assert qd.is_fundamental_discriminant(-4)
        assert qd.is_fundamental_discriminant(-20)
        assert not qd.is_fundamental_discriminant(-12)
        assert not qd.is_fundamental_discriminant(-9)
        assert not qd.is_fundamental_discriminant(5)
        with pytest.raises(ValueError):
            qd.QuadOrder(-12, 1)

    def test_omega_data(self):
        o = qd.QuadOrder(-3, 1)
        assert o.omega_trace() == -3 and o.omega_norm() == 3
        o5 = qd.QuadOrder(-3, 5)
        assert o5.omega_trace() == -15 and o5.omega_norm() == 75


class TestClassGroup:
    def test_order_one(self):
        G = qd.class_group(qd.QuadOrder(-3, 1))
        assert G.classes == ((1, 1, 1),)

    def test_disc_75_pinned(self):
        # Reduced-form enumeration oracle: a <= sqrt(75/3) = 5.
        G = qd.class_group(qd.QuadOrder(-3, 5))
        assert G.classes == ((1, 1, 19), (3, 3, 7))
        assert G.h == 2

    def test_identity_is_principal(self):
        for D in [-3, -4, -23, -39]:
            G = qd.class_group(qd.QuadOrder(D, 1))
            assert G.classes[G.identity_index] == qd.principal_form(D)

    def test_form_ideal_round_trip(self):
        for D, c in [(-3, 5), (-23, 1), (-39, 1), (-4, 5)]:
            disc = c * c * D
            for f in qd.reduced_forms(disc):
                assert qd.ideal_to_class_form(qd.form_to_ideal(f, disc), disc) == f

    def test_group_axioms_verified_at_construction(self):
        # _verify_group runs when the table is built; just force a few.
        for D, c in [(-23, 1), (-47, 1), (-3, 7)]:
            qd.class_group(qd.QuadOrder(D, c)).table

    @given(st.integers(0, 10_000))
    @settings(max_examples=80, deadline=None)
    def test_reduce_form_is_class_invariant(self, seed):
        # Random SL2(Z) transport of a reduced form reduces back to itself.
        rng = random.Random(seed)
        disc = -rng.choice([3, 4, 15, 20, 23, 39, 47, 75])
        forms = qd.reduced_forms(disc)
        a, b, c = forms[rng.randrange(len(forms))]
        for _ in range(6):
            which = rng.randrange(2)
            n = rng.randint(-3, 3)
            if which:  # (x, y) -> (x + n y, y)
                a, b, c = a, b + 2 * n * a, a * n * n + b * n + c
            else:  # (x, y) -> (x, y + n x)
                a, b, c = a + b * n + c * n * n, b + 2 * n * c, c
        assert qd.reduce_form(a, b, c) in forms


class TestClassNumberFormula:
    def test_pins(self):
        assert qd.class_number_formula(-3, 1) == 1
        assert qd.class_number_formula(-3, 5) == 2  # 1*5*(1+1/5)/3
        assert qd.class_number_formula(-4, 3) == 2  # 1*3*(1+1/3)/2

    def test_sweep_small(self):
        for D in discriminants(300):
            c = 1
            while c * c * -D <= 3000:
                assert len(qd.reduced_forms(c * c * D)) == qd.class_number_formula(D, c)
                c += 1


class TestCharacters:
    def test_trivial_group(self):
        G = qd.class_group(qd.QuadOrder(-3, 1))
        chars = qd.characters(G)
        assert len(chars) == 1 and chars[0].is_trivial

    def test_z2(self):
        G = qd.class_group(qd.QuadOrder(-3, 5))
        assert [ch.n for ch in qd.characters(G)] == [1, 2]

    def test_z4(self):
        G = qd.class_group(qd.QuadOrder(-39, 1))
        assert sorted(ch.n for ch in qd.characters(G)) == [1, 2, 4, 4]

    def test_orthogonality_exact(self):
        for D, c in [(-3, 5), (-23, 1), (-39, 1)]:
            G = qd.class_group(qd.QuadOrder(D, c))
            chars = qd.characters(G)
            N = 1
            for ch in chars:
                N = N * ch.n // __import__("math").gcd(N, ch.n)
            for k in range(G.h):
                s = qd.CyclotomicValue.zero(N)
                for ch in chars:
                    s = s + qd.CyclotomicValue.root_power(N, ch.exponent(k) * (N // ch.n))
                want = qd.CyclotomicValue.from_int(N, G.h if k == G.identity_index else 0)
                assert s == want

    def test_inverse_character(self):
        G = qd.class_group(qd.QuadOrder(-39, 1))
        for ch in qd.characters(G):
            inv = ch.inverse()
            assert inv.n == ch.n
            for k in range(G.h):
                assert (ch.exponent(k) + inv.exponent(k)) % ch.n == 0


class TestFrobenius:
    def test_inert_example(self):
        # kronecker(-75, 17) = -1: oracle by exhausting squares mod 17.
        squares = {x * x % 17 for x in range(1, 17)}
        assert (-75) % 17 not in squares
        G = qd.class_group(qd.QuadOrder(-3, 5))
        assert qd.frobenius_class(G, 17) == qd.INERT

    def test_split_classes(self):
        G = qd.class_group(qd.QuadOrder(-3, 5))
        # 19 is represented by the principal form (0,1) -> 19; 7 by (3,3,7).
        assert qd.frobenius_class(G, 19) == G.index_of((1, 1, 19)) == 0
        assert qd.frobenius_class(G, 7) == G.index_of((3, 3, 7)) == 1

    def test_ramified_and_bad(self):
        G = qd.class_group(qd.QuadOrder(-3, 5))
        assert qd.frobenius_class(G, 3) == qd.RAMIFIED
        with pytest.raises(BadPrimeError):
            qd.frobenius_class(G, 5)

    def test_residue_degrees(self):
        G = qd.class_group(qd.QuadOrder(-3, 5))
        assert qd.residue_degree_in_Hc(G, 19) == 1  # principal Frobenius
        assert qd.residue_degree_in_Hc(G, 7) == 2  # order-2 class
        assert qd.residue_degree_in_Hc(G, 17) == 2  # inert

    def test_product_composition(self):
        # Frobenius of an ideal product equals the composed class.
        rng = random.Random(3)
        for D, c in [(-3, 5), (-23, 1), (-39, 1)]:
            G = qd.class_group(qd.QuadOrder(D, c))
            disc = c * c * D
            split = [q for q in primes_up_to(200)
                     if c % q and D % q
                     and qd.frobenius_class(G, q) not in (qd.INERT, qd.RAMIFIED)]
            for _ in range(10):
                q1, q2 = rng.choice(split), rng.choice(split)
                k1, k2 = qd.frobenius_class(G, q1), qd.frobenius_class(G, q2)
                I1 = qd.form_to_ideal(G.classes[k1], disc)
                I2 = qd.form_to_ideal(G.classes[k2], disc)
                prod_class = G.index_of(qd.ideal_to_class_form(qd.ideal_mul(I1, I2, disc), disc))
                assert prod_class == G.compose(k1, k2)


class TestCyclotomic:
    def test_prime_above_trivial_order(self):
        pa = qd.choose_prime_above(1, 7)
        assert pa.residue_degree == 1

    def test_phi2_mod_7(self):
        pa = qd.choose_prime_above(2, 7)
        assert pa.factor.coeffs == (1, 1) and pa.residue_degree == 1

    def test_phi4_mod_7_inert(self):
        # -1 is a nonsquare mod 7, so Phi_4 = x^2+1 stays irreducible.
        pa = qd.choose_prime_above(4, 7)
        assert pa.residue_degree == 2

    def test_reject_predicate(self):
        assert qd.choose_prime_above(4, 7, reject=lambda pa: True) is None

    def test_reduce_examples(self):
        pa = qd.choose_prime_above(2, 7)
        zero = qd.CyclotomicValue.zero(2)
        assert qd.reduce_cyclotomic(zero, pa) == (0,)
        seven = qd.CyclotomicValue.from_int(2, 7)
        assert qd.reduce_cyclotomic(seven, pa) == (0,)
        x = qd.CyclotomicValue.from_int(2, 1) + qd.CyclotomicValue.root_power(2, 1)
        assert qd.reduce_cyclotomic(x, pa) == (0,)  # zeta_2 -> -1
        one = qd.CyclotomicValue.from_int(2, 1)
        assert qd.reduce_cyclotomic(one, pa) == (1,)

    def test_conjugate(self):
        z = qd.CyclotomicValue.root_power(3, 1)
        assert z.conjugate().coeffs == (-1, -1)  # zeta_3^2 = -1 - zeta_3
        assert z.conjugate().conjugate() == z

    def test_mismatched_orders_rejected(self):
        pa = qd.choose_prime_above(2, 7)
        with pytest.raises(ValueError):
            qd.reduce_cyclotomic(qd.CyclotomicValue.zero(4), pa)
