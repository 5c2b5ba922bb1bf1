"""Exact linear algebra kernel: HNF canonicity, determinants, kernels, SNF."""

import random
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from selmercert import intlinalg as la

small_mats = st.lists(
    st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=1, max_size=6
)


def random_unimodular(n, rng):
    m = la.identity(n)
    for _ in range(3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.randint(-3, 3)
        m[i] = [x + c * y for x, y in zip(m[i], m[j])]
    return m


@given(small_mats)
@settings(max_examples=200)
def test_hnf_idempotent(rows):
    h = la.hnf(rows)
    assert la.hnf(h) == h


def test_hnf_canonical_under_unimodular_row_ops():
    rng = random.Random(7)
    for _ in range(50):
        rows = [[rng.randint(-20, 20) for _ in range(4)] for _ in range(4)]
        h = la.hnf(rows)
        u = random_unimodular(4, rng)
        h2 = la.hnf(la.mat_mul(u, rows))
        assert h == h2


def test_hnf_pivot_normalization():
    h = la.hnf([[2, 4], [0, 3]])
    assert h == [[2, 1], [0, 3]]


def test_det_and_invert():
    m = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    d = la.det(m)
    assert d == Fraction(18)  # cofactor expansion: 2*(12-1) - 1*(4-0)
    inv = la.invert(m)
    prod = la.mat_mul(m, inv)
    assert prod == la.identity(3)


def test_nullspace_mod_p():
    m = [[1, 2, 3], [2, 4, 6]]
    basis = la.nullspace_mod_p(m, 5)
    assert len(basis) == 2
    for v in basis:
        assert all(sum(r[k] * v[k] for k in range(3)) % 5 == 0 for r in m)


def test_nullspace_rational_primitive():
    m = [[2, -2, 0], [0, 3, -3]]
    basis = la.nullspace_rational(m)
    assert basis == [[1, 1, 1]]


def test_smith_normal_form_transform():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 4)
        rows = rng.randint(1, 5)
        a = [[rng.randint(-8, 8) for _ in range(n)] for _ in range(rows)]
        diag, v = la.smith_normal_form(a)
        assert abs(la.det(v)) == 1
        av = la.mat_mul(a, v)
        # U * (A V) should be diagonalizable by row ops alone: check A*V has
        # elementary divisors equal to diag via HNF-style invariants.
        d2, _ = la.smith_normal_form(av)
        assert d2 == diag
        # Divisibility chain on nonzero entries.
        nz = [d for d in diag if d]
        for x, y in zip(nz, nz[1:]):
            assert y % x == 0
