"""Definite quaternion algebras over Q: Eichler orders, right ideal class
sets certified by the exact mass formula, Brandt matrices (Hecke action),
the integral eigenform attached to a system of Frobenius traces, and the
mod-p structure checks used by the certification pipeline.

Every lattice computation is exact: integer HNF for lattice arithmetic and
rational Fincke-Pohst enumeration (no floating-point acceptance) for norm
forms. Class-set enumeration terminates only when the exact Eichler mass is
met, never heuristically.

Conventions. Right ideals of the Eichler order R are full lattices I with
I*R = I; classes are orbits under left multiplication by invertible algebra
elements. The Brandt matrix entry B(q)[i][j] counts the norm-q right
subideals of I_i lying in class j; row sums are q+1 for good q, and
w_j * B(q)[i][j] = w_i * B(q)[j][i] where w_i is the order of the full unit
group of the left order of I_i. Divisor vectors carry the transposed
action; functions on classes (such as the eigenform) transform by B(q)
itself.
"""

import json
import os
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from hashlib import sha256
from math import gcd, isqrt

from . import intlinalg as la
from .errors import (
    AmbiguousEigenvectorError,
    CacheError,
    ConstructionError,
    MassMismatchError,
    NoEigenvectorError,
    UnsupportedOperatorError,
)
from .ntheory import FactoredInteger, factorize, is_prime, primes_up_to

ALGEBRA_SEARCH_BOUND = 120


# ---------------------------------------------------------------------------
# Elements: coordinate 4-tuples over the basis (1, i, j, ij) with i^2 = a,
# j^2 = b, ij = -ji.


@dataclass(frozen=True)
class QuaternionAlgebra:
    a: int
    b: int
    ramified: frozenset

    def mul(self, x, y):
        a, b = self.a, self.b
        t1, x1, y1, z1 = x
        t2, x2, y2, z2 = y
        return (
            t1 * t2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
            t1 * x2 + x1 * t2 - b * y1 * z2 + b * z1 * y2,
            t1 * y2 + y1 * t2 + a * x1 * z2 - a * z1 * x2,
            t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2,
        )

    @staticmethod
    def conj(x):
        t, u, v, w = x
        return (t, -u, -v, -w)

    @staticmethod
    def trd(x):
        return 2 * x[0]

    def nrd(self, x):
        t, u, v, w = x
        return t * t - self.a * u * u - self.b * v * v + self.a * self.b * w * w

    @staticmethod
    def one():
        return (Fraction(1), Fraction(0), Fraction(0), Fraction(0))


def hilbert_symbol(a, b, q):
    """(a, b)_q for a prime q (use q = -1 for the real place)."""
    if a == 0 or b == 0:
        raise ValueError("arguments must be nonzero")
    if q == -1:
        return -1 if a < 0 and b < 0 else 1

    def split(n):
        v = 0
        while n % q == 0:
            n //= q
            v += 1
        return v, n

    alpha, u = split(a)
    beta, v = split(b)
    from .ntheory import kronecker

    if q != 2:
        sign = -1 if (alpha * beta * (q - 1) // 2) % 2 else 1
        return sign * kronecker(u, q) ** beta * kronecker(v, q) ** alpha

    def eps(n):
        return ((n - 1) // 2) % 2

    def omega(n):
        return ((n * n - 1) // 8) % 2

    e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
    return -1 if e % 2 else 1


def ramified_primes(a, b):
    """Finite primes where the algebra (a, b) ramifies."""
    support = {2}
    for n in (a, b):
        support.update(factorize(n).primes())
    return frozenset(q for q in sorted(support) if hilbert_symbol(a, b, q) == -1)


def build_algebra(nminus):
    """The definite algebra of discriminant N^-, found by canonical search.

    N^- must be squarefree with an odd number of prime factors. The first
    pair (a, b) (canonical order, a, b < 0) whose Hilbert symbols realize
    exactly the primes of N^- is returned, after its maximal order has been
    constructed successfully.
    """
    if isinstance(nminus, int):
        nminus = factorize(nminus)
    if not nminus.is_squarefree() or len(nminus.factors) % 2 == 0:
        raise ValueError("N^- must be squarefree with an odd number of prime factors")
    target = frozenset(nminus.primes())
    for bound in range(1, ALGEBRA_SEARCH_BOUND + 1):
        for na in range(1, bound + 1):
            for nb in range(1, bound + 1):
                if max(na, nb) != bound:
                    continue
                a, b = -na, -nb
                if ramified_primes(a, b) != target:
                    continue
                alg = QuaternionAlgebra(a, b, target)
                try:
                    maximal_order(alg)
                except ConstructionError:
                    continue
                return alg
    raise ConstructionError(f"no (a, b) within bound {ALGEBRA_SEARCH_BOUND} for N^- = {int(nminus)}")


# ---------------------------------------------------------------------------
# Lattices


@dataclass(frozen=True)
class QLattice:
    """A full lattice in the algebra: rows of mat/den are basis coordinates
    over (1, i, j, ij). mat is HNF-canonical and gcd(mat, den) = 1, so
    equality of lattices is equality of representations."""

    algebra: QuaternionAlgebra
    mat: tuple
    den: int

    @classmethod
    def from_rows(cls, algebra, rows):
        den = 1
        frac_rows = [[Fraction(x) for x in r] for r in rows]
        for r in frac_rows:
            for x in r:
                den = den * x.denominator // gcd(den, x.denominator)
        int_rows = [[int(x * den) for x in r] for r in frac_rows]
        h = la.hnf(int_rows)
        if len(h) != 4:
            raise ValueError("lattice must have full rank 4")
        g = den
        for r in h:
            for x in r:
                g = gcd(g, x)
        mat = tuple(tuple(x // g for x in r) for r in h)
        return cls(algebra, mat, den // g)

    def elements(self):
        d = self.den
        return [tuple(Fraction(x, d) for x in row) for row in self.mat]

    def basis_matrix(self):
        return [[Fraction(x, self.den) for x in row] for row in self.mat]

    def inverse_basis(self):
        return la.invert(self.basis_matrix())

    def coords(self, x):
        return la.vec_mat(list(x), self.inverse_basis())

    def contains(self, x):
        return all(c.denominator == 1 for c in self.coords(x))

    def multiply(self, other):
        rows = []
        for x in self.elements():
            for y in other.elements():
                rows.append(list(self.algebra.mul(x, y)))
        return QLattice.from_rows(self.algebra, rows)

    def conjugate(self):
        return QLattice.from_rows(
            self.algebra, [list(self.algebra.conj(x)) for x in self.elements()]
        )

    def scale(self, r):
        r = Fraction(r)
        return QLattice.from_rows(
            self.algebra, [[r * c for c in row] for row in self.basis_matrix()]
        )

    def gram(self):
        """G[u][v] = Trd(b_u * conj(b_v)); positive definite for definite algebras."""
        els = self.elements()
        alg = self.algebra
        out = []
        for x in els:
            row = []
            for y in els:
                row.append(alg.trd(alg.mul(x, alg.conj(y))))
            out.append(row)
        return out

    def norm_content(self):
        """The reduced norm of the lattice: gcd of the norm form's values."""
        g = self.gram()
        vals = [Fraction(g[u][u], 2) for u in range(4)]
        vals += [Fraction(g[u][v]) for u in range(4) for v in range(u + 1, 4)]
        result = Fraction(0)
        for v in vals:
            result = _frac_gcd(result, v)
        return result

    def det(self):
        return la.det(self.basis_matrix())

    def is_multiplicatively_closed(self):
        inv = self.inverse_basis()
        for x in self.elements():
            for y in self.elements():
                c = la.vec_mat(list(self.algebra.mul(x, y)), inv)
                if any(t.denominator != 1 for t in c):
                    return False
        return True

    def reduced_discriminant(self):
        d = la.det([[Fraction(x) for x in row] for row in self.gram()])
        d = abs(d)
        assert d.denominator == 1, "Gram determinant must be integral for orders"
        r = isqrt(int(d))
        assert r * r == int(d), "Gram determinant must be a perfect square"
        return r

    def normalize_primitive(self):
        """Scale to an integral lattice with coprime entries (canonical in its ray)."""
        scaled = self.scale(self.den)
        g = 0
        for row in scaled.mat:
            for x in row:
                g = gcd(g, x)
        return scaled.scale(Fraction(1, g)) if g > 1 else scaled


def _frac_gcd(x, y):
    if x == 0:
        return abs(y)
    if y == 0:
        return abs(x)
    num = gcd(x.numerator * y.denominator, y.numerator * x.denominator)
    return Fraction(num, x.denominator * y.denominator)


def _dual_rows(rows):
    # Basis of {x : <x, r> in Z for all r}, given a full-rank row basis.
    inv = la.invert(rows)
    return [list(col) for col in zip(*inv)]


def standard_order(alg):
    return QLattice.from_rows(alg, la.identity(4))


def left_order(L):
    """{x in B : x L <= L} as a lattice."""
    alg = L.algebra
    inv = L.inverse_basis()
    cols = []
    for f in L.elements():
        # Row u of M is the coordinate vector of e_u * f over L's basis.
        m = []
        for e in la.identity(4):
            prod = alg.mul(tuple(Fraction(t) for t in e), f)
            m.append(la.vec_mat(list(prod), inv))
        for col in zip(*m):
            cols.append(list(col))
    return QLattice.from_rows(alg, _dual_rows_from_spanning(cols))


def right_order(L):
    alg = L.algebra
    inv = L.inverse_basis()
    cols = []
    for f in L.elements():
        m = []
        for e in la.identity(4):
            prod = alg.mul(f, tuple(Fraction(t) for t in e))
            m.append(la.vec_mat(list(prod), inv))
        for col in zip(*m):
            cols.append(list(col))
    return QLattice.from_rows(alg, _dual_rows_from_spanning(cols))


def _dual_rows_from_spanning(vectors):
    # Dual lattice of the Z-span of a (possibly redundant) spanning set.
    den = 1
    for v in vectors:
        for x in v:
            f = Fraction(x)
            den = den * f.denominator // gcd(den, f.denominator)
    int_rows = [[int(Fraction(x) * den) for x in v] for v in vectors]
    h = la.hnf(int_rows)
    assert len(h) == 4
    basis = [[Fraction(x, den) for x in row] for row in h]
    return _dual_rows(basis)


# ---------------------------------------------------------------------------
# Short vector enumeration (exact Fincke-Pohst)


def _floor_plus_sqrt(p, q, X):
    # floor((p + sqrt(X)) / q) for rational X >= 0, integer p, q > 0.
    fs = isqrt(X.numerator * X.denominator) // X.denominator
    cand = (p + fs) // q
    while True:
        v = (cand + 1) * q - p
        if v <= 0 or Fraction(v * v) <= X:
            cand += 1
        else:
            return cand


def _ldl(M):
    n = len(M)
    a = [[Fraction(M[i][j]) for j in range(n)] for i in range(n)]
    d = [Fraction(0)] * n
    u = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        assert d[i] > 0, "form must be positive definite"
        for j in range(i + 1, n):
            u[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(j, n):
                a[j][k] -= a[i][j] * a[i][k] / d[i]
                a[k][j] = a[j][k]
    return d, u


def short_vectors(M, bound):
    """All integer v != 0 with Q(v) = v M v^T <= bound, exact arithmetic.

    M is symmetric positive definite with Fraction entries. Yields (v, Q(v)).
    """
    n = len(M)
    d, u = _ldl(M)
    bound = Fraction(bound)
    v = [0] * n
    results = []

    def center(i):
        return sum(u[i][j] * v[j] for j in range(i + 1, n))

    def walk(i, rem):
        c = center(i)
        X = rem / d[i]
        pc, qc = c.numerator, c.denominator
        hi = _floor_plus_sqrt(-pc, qc, X * qc * qc)
        lo = -_floor_plus_sqrt(pc, qc, X * qc * qc)
        for t in range(lo, hi + 1):
            v[i] = t
            used = d[i] * (t + c) ** 2
            if used > rem:
                continue
            if i == 0:
                if any(v):
                    results.append((tuple(v), bound - (rem - used)))
            else:
                walk(i - 1, rem - used)
        v[i] = 0

    walk(n - 1, bound)
    return results


def norm_histogram(L, bound):
    """Counts of lattice vectors by reduced norm value, for 0 < Nrd <= bound."""
    g = L.gram()
    M = [[Fraction(g[u][v], 2) for v in range(4)] for u in range(4)]
    hist = {}
    for _, val in short_vectors(M, Fraction(bound)):
        hist[val] = hist.get(val, 0) + 1
    return hist


def count_norm(L, value):
    return norm_histogram(L, value).get(Fraction(value), 0)


def exists_norm(L, value):
    g = L.gram()
    M = [[Fraction(g[u][v], 2) for v in range(4)] for u in range(4)]
    for _, val in short_vectors(M, Fraction(value)):
        if val == Fraction(value):
            return True
    return False


def unit_count(order_lattice):
    """Order of the full unit group of a definite order: #\\{x : Nrd(x) = 1\\}."""
    return count_norm(order_lattice, 1)


# ---------------------------------------------------------------------------
# Maximal orders and Eichler orders


def maximal_order(alg):
    target = 1
    for q in sorted(alg.ramified):
        target *= q
    O = standard_order(alg)
    while True:
        disc = O.reduced_discriminant()
        if disc == target:
            break
        assert disc % target == 0
        q = min(factorize(disc // target).primes())
        enlarged = _enlarge_at(O, q)
        if enlarged is None:
            raise ConstructionError(f"cannot enlarge order at {q} (disc {disc}, target {target})")
        O = enlarged
    assert O.contains(alg.one()) and O.is_multiplicatively_closed()
    return O


def _integral_candidates(O, q):
    alg = O.algebra
    els = O.elements()
    out = []
    for code in range(1, q**4):
        c = [(code // q**t) % q for t in range(4)]
        x = tuple(
            sum(Fraction(c[t]) * els[t][s] for t in range(4)) / q for s in range(4)
        )
        if alg.trd(x).denominator != 1:
            continue
        if alg.nrd(x).denominator != 1:
            continue
        out.append(x)
    return out


def _enlarge_at(O, q):
    """First (canonical order) strictly larger multiplicatively closed
    lattice generated over O by one, two, or three integral elements of
    (1/q)O. Returns None if no enlargement exists."""
    cands = _integral_candidates(O, q)
    base_rows = [list(x) for x in O.elements()]

    def try_extension(extra):
        rows = base_rows + [list(x) for x in extra]
        L = QLattice.from_rows(O.algebra, rows)
        if L.det() == O.det():
            return None  # not strictly larger
        if not L.is_multiplicatively_closed():
            return None
        return L

    for x in cands:
        L = try_extension([x])
        if L is not None:
            return L
    for s in range(len(cands)):
        for t in range(s + 1, len(cands)):
            L = try_extension([cands[s], cands[t]])
            if L is not None:
                return L
    for s in range(len(cands)):
        for t in range(s + 1, len(cands)):
            for r in range(t + 1, len(cands)):
                L = try_extension([cands[s], cands[t], cands[r]])
                if L is not None:
                    return L
    return None


@dataclass(frozen=True)
class EichlerOrder:
    """An Eichler order of level N^+ in the algebra of discriminant N^-."""

    algebra: QuaternionAlgebra
    lattice: QLattice
    nminus: FactoredInteger
    level: FactoredInteger

    def __post_init__(self):
        assert self.lattice.contains(self.algebra.one())
        assert self.lattice.is_multiplicatively_closed()
        expected = 1
        for p in sorted(self.algebra.ramified):
            expected *= p
        assert int(self.nminus) == expected
        assert self.lattice.reduced_discriminant() == int(self.nminus) * int(self.level)

    @property
    def conductor_product(self):
        return int(self.nminus) * int(self.level)


def eichler_order(alg, nplus, nminus=None):
    """Eichler order of level N^+ inside a maximal order, via a congruence
    condition against a Hensel-lifted idempotent at each q | N^+."""
    if isinstance(nplus, int):
        nplus = factorize(nplus)
    if nminus is None:
        nm = 1
        for p in sorted(alg.ramified):
            nm *= p
        nminus = factorize(nm)
    if gcd(int(nplus), int(nminus)) != 1:
        raise ValueError("level must be prime to the discriminant")
    O = maximal_order(alg)
    for q, e in nplus.factors:
        O = _impose_level(O, q, e)
    return EichlerOrder(alg, O, nminus, nplus)


def _mult_matrix_mod(O, elt, modulus, side):
    # Matrix (rows: images of O's basis) of y -> (elt * y) or (y * elt) in
    # O-coordinates, reduced mod modulus.
    inv = O.inverse_basis()
    rows = []
    for f in O.elements():
        prod = O.algebra.mul(elt, f) if side == "left" else O.algebra.mul(f, elt)
        coords = la.vec_mat(list(prod), inv)
        assert all(c.denominator == 1 for c in coords)
        rows.append([int(c) % modulus for c in coords])
    return rows


def _find_idempotent(O, q, e):
    # A nontrivial idempotent of O/q^e O, by canonical search mod q plus
    # Hensel lifting e' -> 3e'^2 - 2e'^3.
    alg = O.algebra
    els = O.elements()
    found = None
    for code in range(q**4):
        c = [(code // q**t) % q for t in range(4)]
        x = tuple(sum(Fraction(c[t]) * els[t][s] for t in range(4)) for s in range(4))
        t = alg.trd(x)
        n = alg.nrd(x)
        assert t.denominator == 1 and n.denominator == 1
        disc = (int(t) ** 2 - 4 * int(n)) % q
        from .ntheory import sqrt_mod

        r = sqrt_mod(disc, q)
        if r is None or r == 0:
            continue
        lam1 = (int(t) + r) * pow(2, -1, q) % q if q != 2 else None
        if q == 2:
            # x^2 - t x + n with t odd splits as X(X+1) exactly when n is even.
            if int(t) % 2 == 1 and int(n) % 2 == 0:
                lam1, lam2 = 0, 1
            else:
                continue
        else:
            lam2 = (int(t) - r) * pow(2, -1, q) % q
        denom = (lam1 - lam2) % q
        inv = pow(denom, -1, q)
        # e0 = (x - lam2) * inv in O/qO coordinates.
        coords = la.vec_mat(list(x), O.inverse_basis())
        e0 = [int(cc) % q for cc in coords]
        one = la.vec_mat([1, 0, 0, 0], O.inverse_basis())
        one = [int(cc) for cc in one]
        e0 = [(inv * (a - lam2 * b)) % q for a, b in zip(e0, one)]
        if any(e0) and e0 != [x % q for x in one]:
            found = e0
            break
    if found is None:
        raise ConstructionError(f"no split element mod {q}")
    # Hensel lift to mod q^e via coordinates.
    modulus = q
    e_coords = found
    els_int = O.elements()

    def coords_to_elt(coords):
        return tuple(
            sum(Fraction(coords[t]) * els_int[t][s] for t in range(4)) for s in range(4)
        )

    def mul_coords(u, v, modulus):
        x = coords_to_elt(u)
        y = coords_to_elt(v)
        prod = O.algebra.mul(x, y)
        out = la.vec_mat(list(prod), O.inverse_basis())
        assert all(c.denominator == 1 for c in out)
        return [int(c) % modulus for c in out]

    while modulus < q**e:
        modulus = min(modulus * modulus, q**e)
        sq = mul_coords(e_coords, e_coords, modulus)
        cube = mul_coords(sq, e_coords, modulus)
        e_coords = [(3 * s - 2 * cb) % modulus for s, cb in zip(sq, cube)]
    # Verify idempotency mod q^e.
    check = mul_coords(e_coords, e_coords, q**e)
    assert check == [c % q**e for c in e_coords], "Hensel lift failed"
    return e_coords


def _impose_level(O, q, e):
    e_coords = _find_idempotent(O, q, e)
    els = O.elements()
    alg = O.algebra
    ecl = tuple(sum(Fraction(e_coords[t]) * els[t][s] for t in range(4)) for s in range(4))
    one = alg.one()
    f = tuple(a - b for a, b in zip(one, ecl))  # 1 - e
    current = O
    for step in range(1, e + 1):
        # Condition: (1-e) y e = 0 mod q^step; imposed one power at a time.
        inv_O = O.inverse_basis()
        rows = []
        for y in current.elements():
            prod = alg.mul(alg.mul(f, y), ecl)
            coords = la.vec_mat(list(prod), inv_O)
            assert all(c.denominator == 1 for c in coords), "condition matrix not integral"
            assert all(int(c) % q ** (step - 1) == 0 for c in coords)
            rows.append([int(c) // q ** (step - 1) for c in coords])
        kernel = la.nullspace_mod_p([list(col) for col in zip(*rows)], q)
        # kernel vectors v satisfy sum_u v_u * rows[u] = 0 mod q.
        new_rows = [[q * x for x in row] for row in current.basis_matrix()]
        for v in kernel:
            combo = [
                sum(Fraction(v[u]) * current.basis_matrix()[u][s] for u in range(4))
                for s in range(4)
            ]
            new_rows.append(combo)
        current = QLattice.from_rows(alg, new_rows)
    expected = O.reduced_discriminant() * q**e
    assert current.reduced_discriminant() == expected, "level imposition changed the wrong index"
    assert current.is_multiplicatively_closed()
    return current


def eichler_mass(nminus, nplus):
    """Sum of 1/|O_l(I)^x| over the right ideal classes, as an exact rational."""
    if isinstance(nminus, int):
        nminus = factorize(nminus)
    if isinstance(nplus, int):
        nplus = factorize(nplus)
    mass = Fraction(int(nminus) * int(nplus), 24)
    for q, _ in nminus.factors:
        mass *= Fraction(q - 1, q)
    for q, _ in nplus.factors:
        mass *= Fraction(q + 1, q)
    return mass


# ---------------------------------------------------------------------------
# Right ideal classes


@dataclass(frozen=True)
class BrandtMatrix:
    q: int
    entries: tuple


@dataclass
class RightIdealClassSet:
    """Representatives of the right ideal classes of an Eichler order.

    ``ideals[base_index]`` is the principal class (the order itself, or its
    translate after a rebase). ``weights[i]`` is the order of the full unit
    group of the left order of ``ideals[i]``; the exact Eichler mass
    certifies completeness. Theta-series histograms and Brandt matrices are
    cached per instance.
    """

    order: EichlerOrder
    ideals: tuple
    weights: tuple
    left_orders: tuple
    base_index: int = 0
    _theta: dict = field(default_factory=dict, repr=False)
    _brandt: dict = field(default_factory=dict, repr=False)

    @property
    def h(self):
        return len(self.ideals)

    @property
    def norms(self):
        out = []
        for I in self.ideals:
            n = I.norm_content()
            assert n.denominator == 1
            out.append(int(n))
        return tuple(out)

    def mass(self):
        s = Fraction(0)
        for w in self.weights:
            s += Fraction(1, w)
        return s


def _q_neighbors(I, order, q):
    """The q+1 right subideals of I with norm q * Nrd(I), via the right-module
    structure of I/qI over the order mod q."""
    alg = I.algebra
    inv_I = I.inverse_basis()
    mults = []
    for r in order.lattice.elements():
        rows = []
        for f in I.elements():
            coords = la.vec_mat(list(alg.mul(f, r)), inv_I)
            assert all(c.denominator == 1 for c in coords), "I is not a right ideal"
            rows.append([int(c) % q for c in coords])
        mults.append(rows)

    def row_span(vectors):
        return tuple(tuple(r) for r in la.rowspace_mod_p(vectors, q))

    submodules = set()
    for code in range(1, q**4):
        v = [(code // q**t) % q for t in range(4)]
        span = [v]
        while True:
            new = list(span)
            for m in mults:
                for w in span:
                    new.append([sum(w[u] * m[u][s] for u in range(4)) % q for s in range(4)])
            reduced = la.rowspace_mod_p(new, q)
            if len(reduced) == len(la.rowspace_mod_p(span, q)) and \
               row_span(reduced) == row_span(span):
                break
            span = [list(r) for r in reduced]
        basis = la.rowspace_mod_p(span, q)
        if len(basis) == 2:
            submodules.add(tuple(tuple(r) for r in basis))
    out = []
    base = I.basis_matrix()
    for sub in sorted(submodules):
        rows = [[q * x for x in row] for row in base]
        for w in sub:
            rows.append([sum(Fraction(w[u]) * base[u][s] for u in range(4)) for s in range(4)])
        J = QLattice.from_rows(alg, rows)
        assert J.det() == I.det() * q * q, "neighbor index must be q^2"
        out.append(J)
    return out


def same_ideal_class(I, J):
    """Whether two right ideals of the same order are left-equivalent.

    Decided exactly: I = beta * J for some beta iff I * conj(J) represents
    Nrd(I) * Nrd(J) by its norm form.
    """
    nI, nJ = I.norm_content(), J.norm_content()
    X = I.multiply(J.conjugate())
    return exists_norm(X, nI * nJ)


def ideal_class_set(order):
    """Complete right ideal class set, certified by exact mass equality.

    Classes are discovered by q-neighbor expansion at the smallest good
    prime, starting from the trivial ideal. Raises MassMismatchError if the
    expansion closes at the wrong mass (that is a bug, never accepted).
    """
    N = order.conductor_product
    q0 = next(q for q in primes_up_to(1000) if N % q != 0)
    target = eichler_mass(order.nminus, order.level)
    base = order.lattice.normalize_primitive()
    ideals = [base]
    lorders = [left_order(base)]
    weights = [unit_count(lorders[0])]
    acc = Fraction(1, weights[0])
    frontier = deque([0])
    while acc != target:
        if acc > target:
            raise MassMismatchError(f"mass overshoot: {acc} > {target}")
        if not frontier:
            raise MassMismatchError(f"expansion closed at mass {acc}, expected {target}")
        i = frontier.popleft()
        for J in _q_neighbors(ideals[i], order, q0):
            Jn = J.normalize_primitive()
            if any(same_ideal_class(Jn, K) for K in ideals):
                continue
            lo = left_order(Jn)
            w = unit_count(lo)
            ideals.append(Jn)
            lorders.append(lo)
            weights.append(w)
            frontier.append(len(ideals) - 1)
            acc += Fraction(1, w)
            if acc == target:
                break
    cls = RightIdealClassSet(order, tuple(ideals), tuple(weights), tuple(lorders))
    assert cls.mass() == target
    return cls


def rebase_class_set(cls, j):
    """The same class set relative to the base order O_l(I_j).

    Right ideals of the new order are the translates I_i * I_j^{-1}; class
    indices, weights and Brandt matrices are unchanged by this operation,
    and the principal class moves to index j.
    """
    if j == cls.base_index:
        return cls
    R_new = cls.left_orders[j]
    inv_j = cls.ideals[j].conjugate()  # I_j^{-1} up to the scalar Nrd(I_j)
    new_ideals = []
    for I in cls.ideals:
        new_ideals.append(I.multiply(inv_j).normalize_primitive())
    order = EichlerOrder(cls.order.algebra, R_new, cls.order.nminus, cls.order.level)
    out = RightIdealClassSet(order, tuple(new_ideals), cls.weights,
                             tuple(left_order(I) for I in new_ideals), base_index=j)
    assert out.ideals[j] == R_new.normalize_primitive(), "rebase must make class j principal"
    assert out.left_orders[j].det() == R_new.det()
    return out


# ---------------------------------------------------------------------------
# Brandt matrices and the eigenform


def _theta_counts(cls, i, j, value):
    cached = cls._theta.get((i, j))
    if cached is None or cached[0] < value:
        bound = max(value, 16)
        X = cls.ideals[i].multiply(cls.ideals[j].conjugate())
        cls._theta[(i, j)] = (bound, norm_histogram(X, bound))
    hist = cls._theta[(i, j)][1]
    key = Fraction(value)
    return hist.get(key, 0)


def brandt_matrix(cls, q):
    """The Brandt matrix B(q): subideal counts weighted by unit groups.

    Defined for q not dividing N^-; for q | N^+ this computes the level
    operator by the same counting (the level is intrinsic to the ideals).
    Row sums equal q+1 and commutativity holds for good q; weighted
    symmetry holds for every computed q.
    """
    if int(cls.order.nminus) % q == 0:
        raise UnsupportedOperatorError(f"{q} divides the algebra discriminant")
    if q in cls._brandt:
        return cls._brandt[q]
    h = cls.h
    norms = cls.norms
    entries = []
    for i in range(h):
        row = []
        for j in range(h):
            t = _theta_counts(cls, i, j, q * norms[i] * norms[j])
            assert t % cls.weights[j] == 0, "unit orbit size must divide the vector count"
            row.append(t // cls.weights[j])
        entries.append(tuple(row))
    B = BrandtMatrix(q, tuple(entries))
    for i in range(h):
        for j in range(h):
            assert cls.weights[j] * B.entries[i][j] == cls.weights[i] * B.entries[j][i], \
                "weighted symmetry fails"
    if cls.order.conductor_product % q != 0:
        for i in range(h):
            assert sum(B.entries[i]) == q + 1, "row sum must be q+1 at a good prime"
    cls._brandt[q] = B
    return B


@dataclass(frozen=True)
class QuaternionicEigenform:
    """A primitive integer vector that is a simultaneous Brandt eigenvector
    with prescribed eigenvalues (first nonzero coordinate positive)."""

    class_set: RightIdealClassSet
    values: tuple
    eigenvalues: dict

    def value_at(self, k):
        return self.values[k]


def eigenform(cls, traces, q_bound):
    """The unique primitive simultaneous eigenvector with eigenvalues from
    ``traces`` for every good q <= q_bound.

    Raises NoEigenvectorError if no such vector exists (inconsistent input:
    the trace system does not arise on this class set) and
    AmbiguousEigenvectorError if the joint eigenspace has dimension > 1.
    """
    N = cls.order.conductor_product
    good = [q for q in primes_up_to(q_bound) if N % q != 0]
    if len([q for q in good if q in traces]) < 3:
        raise ValueError("need traces at three good primes at least")
    stacked = []
    used = []
    kernel = None
    for q in good:
        if q not in traces:
            raise ValueError(f"missing trace at good prime {q}")
        B = brandt_matrix(cls, q)
        a = traces[q]
        for row_index in range(cls.h):
            row = list(B.entries[row_index])
            row[row_index] -= a
            stacked.append(row)
        used.append(q)
        kernel = la.nullspace_rational(stacked)
        if len(kernel) == 0:
            raise NoEigenvectorError(f"no joint eigenvector (checked q in {used})")
        if len(kernel) == 1 and len(used) >= 3:
            break
    if len(kernel) > 1:
        raise AmbiguousEigenvectorError(f"eigenspace dimension {len(kernel)} at q_bound {q_bound}")
    phi = kernel[0]
    eigs = {}
    for q in good:
        B = brandt_matrix(cls, q)
        image = la.mat_vec([list(r) for r in B.entries], phi)
        if image != [traces[q] * x for x in phi]:
            raise NoEigenvectorError(f"eigenvalue verification failed at q = {q}")
        eigs[q] = traces[q]
    return QuaternionicEigenform(cls, tuple(phi), eigs)


def eta_q_apply(cls, q, v):
    """B(q) v - (q+1) v; lands in weighted-degree zero for good q."""
    if cls.order.conductor_product % q == 0:
        raise ValueError("eta_q is defined at good primes only")
    B = brandt_matrix(cls, q)
    out = [sum(B.entries[i][j] * v[j] for j in range(cls.h)) - (q + 1) * v[i]
           for i in range(cls.h)]
    wd = sum(Fraction(x, w) for x, w in zip(out, cls.weights))
    assert wd == 0, "eta_q image must have weighted degree zero"
    return out


# ---------------------------------------------------------------------------
# Mod-p structure checks. These act on the divisor module (coefficient
# vectors transform by the transposed Brandt matrices; plain coordinate sum
# is the degree).


def _divisor_action(cls, q, p):
    B = brandt_matrix(cls, q)
    return [[B.entries[j][i] % p for j in range(cls.h)] for i in range(cls.h)]


def _mat_pow_mod(M, e, p):
    n = len(M)
    out = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    base = [row[:] for row in M]
    while e:
        if e & 1:
            out = [[sum(out[i][k] * base[k][j] for k in range(n)) % p for j in range(n)]
                   for i in range(n)]
        base = [[sum(base[i][k] * base[k][j] for k in range(n)) % p for j in range(n)]
                for i in range(n)]
        e >>= 1
    return out


def p_isolation_check(cls, phi, p, q_check=50):
    """Whether the trace system of phi is isolated mod p.

    True iff the generalized simultaneous eigenspace of the Brandt action
    for the eigenvalues of phi mod p is one-dimensional on the full divisor
    module, and its intersection with the degree-zero submodule has
    dimension at most one. Detects Eisenstein congruences (where the
    generalized eigenspace jumps even though the plain kernel does not).
    """
    N = cls.order.conductor_product
    good = [q for q in primes_up_to(q_check) if N % q != 0 and q in phi.eigenvalues]
    assert good, "no usable Hecke eigenvalues"
    h = cls.h
    stacked = []
    for q in good:
        A = _divisor_action(cls, q, p)
        for i in range(h):
            A[i][i] = (A[i][i] - phi.eigenvalues[q]) % p
        stacked.extend(_mat_pow_mod(A, h, p))
    kernel = la.nullspace_mod_p(stacked, p)
    if len(kernel) != 1:
        return False
    stacked_deg = stacked + [[1] * h]
    kernel0 = la.nullspace_mod_p(stacked_deg, p)
    return len(kernel0) <= 1


def degree_zero_quotient_dim(cls, eigenvalues, p, q_check=50, extra=()):
    """dim over F_p of (degree-zero divisors) / (Hecke-minus-eigenvalue image).

    ``extra`` supplies additional (q, a_q) pairs beyond the eigenform's
    verified range (such as the auxiliary prime itself).
    """
    N = cls.order.conductor_product
    pairs = [(q, eigenvalues[q]) for q in primes_up_to(q_check)
             if N % q != 0 and q in eigenvalues]
    pairs += [pair for pair in extra if pair[0] not in dict(pairs)]
    h = cls.h
    v0 = [[1 if t == s else (-1 if t + 1 == s else 0) for s in range(h)]
          for t in range(h - 1)]
    images = []
    for q, a in pairs:
        A = _divisor_action(cls, q, p)
        for v in v0:
            img = [(sum(A[i][j] * v[j] for j in range(h)) - a * v[i]) % p for i in range(h)]
            images.append(img)
    return (h - 1) - la.rank_mod_p(images, p)


def component_group_rank(cls, phi, p, ell, a_ell, q_check=50):
    """dim over F_p of V / (U'^2 - 1)V where V is two copies of the
    degree-zero quotient at the eigensystem of phi and U'(x, y) =
    (T_ell x - y, ell x).

    Preconditions: p does not divide ell(ell^2 - 1) and p divides
    (ell+1)^2 - a_ell^2.
    """
    if (ell * (ell * ell - 1)) % p == 0:
        raise ValueError("p must not divide ell(ell^2-1)")
    if ((ell + 1) ** 2 - a_ell * a_ell) % p != 0:
        raise ValueError("p must divide (ell+1)^2 - a_ell^2")
    w = degree_zero_quotient_dim(cls, phi.eigenvalues, p, q_check, extra=((ell, a_ell),))
    m = _u_prime_matrix(p, ell, a_ell)
    sq = [[sum(m[i][k] * m[k][j] for k in range(2)) % p for j in range(2)] for i in range(2)]
    sq[0][0] = (sq[0][0] - 1) % p
    sq[1][1] = (sq[1][1] - 1) % p
    # T_ell acts as the scalar a_ell on the quotient, so U' acts blockwise
    # and rank((U')^2 - 1) = w * rank of the 2x2 model.
    return w * (2 - la.rank_mod_p(sq, p))


def _u_prime_matrix(p, ell, a_ell):
    return [[a_ell % p, (-1) % p], [ell % p, 0]]


def u_prime_structure_check(p, ell, a_ell, eps):
    """Direct linear algebra mod p for the U' action on the rank-two model:
    the image of U' - eps is {(eps*x, x)} and U' + eps is invertible."""
    m = _u_prime_matrix(p, ell, a_ell)
    minus = [[(m[0][0] - eps) % p, m[0][1]], [m[1][0], (0 - eps) % p]]
    plus = [[(m[0][0] + eps) % p, m[0][1]], [m[1][0], (0 + eps) % p]]
    cols = [[minus[0][0], minus[1][0]], [minus[0][1], minus[1][1]]]
    image = la.rowspace_mod_p(cols, p)
    expected = la.rowspace_mod_p([[eps % p, 1]], p)
    image_ok = image == expected
    det_plus = (plus[0][0] * plus[1][1] - plus[0][1] * plus[1][0]) % p
    return {"image_is_eps_diagonal": image_ok, "u_plus_eps_invertible": det_plus != 0}


# ---------------------------------------------------------------------------
# Cache


def class_set_cache_path(cache_dir, nminus, nplus):
    return os.path.join(cache_dir, f"quaternion_{int(nminus)}_{int(nplus)}.json")


def _class_set_payload(cls):
    return {
        "schema": 1,
        "nminus": int(cls.order.nminus),
        "nplus": int(cls.order.level),
        "algebra": [cls.order.algebra.a, cls.order.algebra.b],
        "order": {"mat": [list(r) for r in cls.order.lattice.mat], "den": cls.order.lattice.den},
        "base_index": cls.base_index,
        "ideals": [{"mat": [list(r) for r in I.mat], "den": I.den} for I in cls.ideals],
        "weights": list(cls.weights),
        "brandt": {str(q): [list(r) for r in B.entries] for q, B in sorted(cls._brandt.items())},
    }


def save_class_set(cls, path):
    payload = _class_set_payload(cls)
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    digest = sha256(blob.encode()).hexdigest()
    doc = json.dumps({"payload": payload, "sha256": digest},
                     sort_keys=True, separators=(",", ":"))
    tmp = path + ".tmp"
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(tmp, "w") as fh:
        fh.write(doc)
    os.replace(tmp, path)


def load_class_set(path):
    """Reload a cached class set, or None if the cache is corrupt or stale.

    Caches are never trusted: the content hash, the mass formula, and the
    Brandt identities of every stored matrix are re-verified; any failure
    discards the cache.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
        payload = doc["payload"]
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        if sha256(blob.encode()).hexdigest() != doc["sha256"]:
            return None
        if payload.get("schema") != 1:
            return None
        a, b = payload["algebra"]
        nminus = factorize(payload["nminus"])
        nplus = factorize(payload["nplus"])
        alg = QuaternionAlgebra(a, b, ramified_primes(a, b))
        order_lat = QLattice(alg, tuple(tuple(r) for r in payload["order"]["mat"]),
                             payload["order"]["den"])
        order = EichlerOrder(alg, order_lat, nminus, nplus)
        ideals = tuple(QLattice(alg, tuple(tuple(r) for r in d["mat"]), d["den"])
                       for d in payload["ideals"])
        lorders = tuple(left_order(I) for I in ideals)
        weights = tuple(payload["weights"])
        for lo, w in zip(lorders, weights):
            if unit_count(lo) != w:
                return None
        cls = RightIdealClassSet(order, ideals, weights, lorders,
                                 base_index=payload.get("base_index", 0))
        if cls.mass() != eichler_mass(nminus, nplus):
            return None
        for qs, entries in payload["brandt"].items():
            q = int(qs)
            B = BrandtMatrix(q, tuple(tuple(r) for r in entries))
            for i in range(cls.h):
                for j in range(cls.h):
                    if weights[j] * B.entries[i][j] != weights[i] * B.entries[j][i]:
                        return None
                if order.conductor_product % q != 0 and sum(B.entries[i]) != q + 1:
                    return None
            cls._brandt[q] = B
        return cls
    except (OSError, ValueError, KeyError, AssertionError, json.JSONDecodeError):
        return None
