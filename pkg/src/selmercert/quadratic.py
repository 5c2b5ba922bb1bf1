"""Imaginary quadratic orders: form class groups, ring class characters with
exact cyclotomic values, Frobenius classes, and prime ideals of Z[chi].

Classes of the order of discriminant c^2 D are represented by reduced
primitive binary quadratic forms. Composition is computed through oriented
ideal arithmetic in the order (norm form of an ideal product), which reduces
the delicate classical composition formulas to one well-tested primitive:
integer HNF. Characters are exponent maps into Z/nZ; no floating-point
roots of unity anywhere.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

from . import intlinalg as la
from .errors import BadPrimeError, SizeLimitError
from .ntheory import (
    PolyModP,
    cyclotomic_polynomial,
    euler_phi,
    factorize,
    is_prime,
    kronecker,
    poly_factor_mod_p,
    sqrt_mod,
)

CYCLOTOMIC_ORDER_CAP = 360

INERT = "inert"
RAMIFIED = "ramified"


def is_fundamental_discriminant(D):
    if D >= 0:
        return False
    if D % 4 == 1:
        return factorize(D).is_squarefree()
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and factorize(m).is_squarefree()
    return False


@dataclass(frozen=True)
class QuadOrder:
    """The order Z + c*O_K of the imaginary quadratic field of discriminant D."""

    D: int
    c: int

    def __post_init__(self):
        if not is_fundamental_discriminant(self.D):
            raise ValueError(f"{self.D} is not a fundamental discriminant < 0")
        if self.c < 1:
            raise ValueError("conductor must be positive")

    @property
    def disc(self):
        return self.c * self.c * self.D

    # The canonical generator c*(D + sqrt(D))/2 of the order over Z.
    def omega_trace(self):
        return self.c * self.D

    def omega_norm(self):
        return self.c * self.c * (self.D * self.D - self.D) // 4


# ---------------------------------------------------------------------------
# Reduced forms and reduction


def reduce_form(a, b, c):
    """Canonical reduced representative of the proper equivalence class of
    the positive definite form (a, b, c)."""
    while True:
        if -a < b <= a <= c:
            if a == c and b < 0:
                b = -b
            return (a, b, c)
        if a > c:
            a, b, c = c, -b, a
            continue
        # Normalize b into (-a, a].
        k = (a - b) // (2 * a)
        b2 = b + 2 * k * a
        c = a * k * k + b * k + c
        b = b2


def reduced_forms(disc):
    """All reduced primitive forms of the given negative discriminant, sorted by (a, b)."""
    if disc >= 0 or disc % 4 not in (0, 1):
        raise ValueError("discriminant must be negative and 0 or 1 mod 4")
    out = []
    a = 1
    while 4 * a * a <= -disc + a * a:  # a <= sqrt(|disc|/3) without isqrt rounding risk
        for b in range(-a + 1, a + 1):
            if (b - disc) % 2:
                continue
            num = b * b - disc
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            if gcd(gcd(a, b), c) != 1:
                continue
            out.append((a, b, c))
        a += 1
    return sorted(out)


def principal_form(disc):
    k = disc % 2
    return (1, k, (k * k - disc) // 4)


# ---------------------------------------------------------------------------
# Oriented ideal arithmetic in the order of discriminant disc.
# Elements are coordinates (u, v) for u + v*w where w = (disc + sqrt(disc))/2.


def _w_norm(disc):
    return (disc * disc - disc) // 4


def _elt_mul(x, y, disc):
    m = _w_norm(disc)
    u1, v1 = x
    u2, v2 = y
    return (u1 * u2 - m * v1 * v2, u1 * v2 + u2 * v1 + disc * v1 * v2)


def _elt_norm(x, disc):
    u, v = x
    return u * u + disc * u * v + _w_norm(disc) * v * v


def form_to_ideal(form, disc):
    """The lattice a*Z + ((-b + sqrt(disc))/2)*Z as HNF rows of (u, v) coordinates."""
    a, b, _ = form
    return la.hnf([[a, 0], [(-b - disc) // 2, 1]])


def ideal_mul(I, J, disc):
    rows = []
    for x in I:
        for y in J:
            rows.append(list(_elt_mul(tuple(x), tuple(y), disc)))
    return la.hnf(rows)


def ideal_to_class_form(I, disc):
    """Reduced form of the class of the oriented ideal I (rows with det > 0).

    The sign convention matches form_to_ideal: the composite map
    form -> ideal -> form is the identity on reduced forms, and
    ideal multiplication induces the class group law.
    """
    e1, e2 = tuple(I[0]), tuple(I[1])
    n = e1[0] * e2[1] - e1[1] * e2[0]
    assert n > 0, "HNF basis must be positively oriented"
    na, nc = _elt_norm(e1, disc), _elt_norm(e2, disc)
    # Polarization Tr(e1 * conj(e2)) via N(e1+e2) - N(e1) - N(e2).
    nb = _elt_norm((e1[0] + e2[0], e1[1] + e2[1]), disc) - na - nc
    assert na % n == 0 and nb % n == 0 and nc % n == 0, "improper ideal"
    a, b, c = na // n, nb // n, nc // n
    # Invert the class (conjugate form) so the lift convention round-trips.
    return reduce_form(a, -b, c)


# ---------------------------------------------------------------------------


@dataclass
class FormClassGroup:
    """The class group of the order, carried by reduced forms.

    The composition table is built lazily; on construction it is verified to
    be an abelian group (associativity, identity, inverses) exhaustively.
    """

    order: QuadOrder
    classes: tuple
    _table: tuple | None = field(default=None, repr=False)

    @property
    def h(self):
        return len(self.classes)

    @property
    def identity_index(self):
        return self.classes.index(principal_form(self.order.disc))

    def index_of(self, form):
        return self.classes.index(reduce_form(*form))

    @property
    def table(self):
        if self._table is None:
            self._table = self._build_table()
        return self._table

    def _build_table(self):
        disc = self.order.disc
        ideals = [form_to_ideal(f, disc) for f in self.classes]
        rows = []
        for I in ideals:
            row = []
            for J in ideals:
                row.append(self.index_of(ideal_to_class_form(ideal_mul(I, J, disc), disc)))
            rows.append(tuple(row))
        table = tuple(rows)
        self._verify_group(table)
        return table

    def _verify_group(self, table):
        h = self.h
        e = self.identity_index
        for i in range(h):
            assert table[i][e] == table[e][i] == i, "identity fails"
            assert e in table[i], "no inverse"
        for i in range(h):
            for j in range(h):
                assert table[i][j] == table[j][i], "commutativity fails"
                for k in range(h):
                    assert table[table[i][j]][k] == table[i][table[j][k]], "associativity fails"

    def compose(self, i, j):
        return self.table[i][j]

    def inverse(self, i):
        return self.table[i].index(self.identity_index)

    def element_order(self, i):
        e = self.identity_index
        k, x = 1, i
        while x != e:
            x = self.compose(x, i)
            k += 1
        return k

    def power(self, i, n):
        e = self.identity_index
        x = e
        for _ in range(n % self.element_order(i) if n else 0):
            x = self.compose(x, i)
        return x


def class_group(order):
    return FormClassGroup(order, tuple(reduced_forms(order.disc)))


@lru_cache(maxsize=None)
def _fundamental_class_number(D):
    return len(reduced_forms(D))


def class_number_formula(D, c):
    """h(D) * c * prod_{q | c} (1 - (D|q)/q), divided by the unit index for c > 1."""
    h = _fundamental_class_number(D)
    if c == 1:
        return h
    num = h
    for q, e in factorize(c).factors:
        num *= q ** (e - 1) * (q - kronecker(D, q))
    unit_index = 3 if D == -3 else 2 if D == -4 else 1
    assert num % unit_index == 0
    return num // unit_index


# ---------------------------------------------------------------------------
# Characters


@dataclass(frozen=True)
class RingClassCharacter:
    """A character of the class group, valued in exact roots of unity.

    chi(class k) = zeta_n ^ exponents[k]; n is the exact order of chi.
    """

    group: FormClassGroup
    n: int
    exponents: tuple

    def __post_init__(self):
        g = self.group
        assert len(self.exponents) == g.h
        assert all(0 <= e < self.n for e in self.exponents)
        for i in range(g.h):
            for j in range(g.h):
                assert (self.exponents[i] + self.exponents[j]) % self.n == \
                    self.exponents[g.compose(i, j)] % self.n, "not a homomorphism"
        content = self.n
        for e in self.exponents:
            content = gcd(content, e)
        assert self.n == 1 or content == 1, "n is not the exact order"

    @property
    def is_trivial(self):
        return self.n == 1

    def exponent(self, k):
        return self.exponents[k]

    def inverse(self):
        return RingClassCharacter(self.group, self.n,
                                  tuple((-e) % self.n for e in self.exponents))


def characters(G):
    """All h characters of G, trivial first, each with exact order; canonical order."""
    h = G.h
    relations = []
    for i in range(h):
        for j in range(h):
            row = [0] * h
            row[i] += 1
            row[j] += 1
            row[G.compose(i, j)] -= 1
            relations.append(row)
    reduced = la.hnf(relations)
    diag, v = la.smith_normal_form(reduced)
    assert all(d != 0 for d in diag), "class group must be finite"
    exponent = 1
    for d in diag:
        exponent = exponent * d // gcd(exponent, d)
    if exponent > CYCLOTOMIC_ORDER_CAP:
        raise SizeLimitError(f"group exponent {exponent} exceeds the cyclotomic cap")
    # Coordinates of each class in the invariant-factor decomposition.
    coords = [[v[k][t] % diag[t] for t in range(h)] for k in range(h)]
    out = []
    for tup in _tuples([d for d in diag]):
        n = 1
        for t, d in zip(tup, diag):
            if t:
                o = d // gcd(t, d)
                n = n * o // gcd(n, o)
        # zeta_d^t = zeta_n^{(t/g) * (n / (d/g))} with g = gcd(t, d).
        coeffs = []
        for t, d in zip(tup, diag):
            g = gcd(t, d)
            coeffs.append((t // g) * (n // (d // g)) if t else 0)
        exps = tuple(
            sum(cf * coords[k][idx] for idx, cf in enumerate(coeffs)) % n
            for k in range(h)
        )
        out.append(RingClassCharacter(G, n, exps))
    assert len(out) == h
    out.sort(key=lambda ch: (ch.n != 1, ch.n, ch.exponents))
    return out


def _tuples(moduli):
    if not moduli:
        yield ()
        return
    for rest in _tuples(moduli[1:]):
        for t in range(moduli[0]):
            yield (t,) + rest


# ---------------------------------------------------------------------------
# Frobenius data


def frobenius_class(G, q):
    """Class index of a prime above q (split), INERT, or RAMIFIED.

    Raises BadPrimeError when q divides the conductor c.
    """
    order = G.order
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if order.c % q == 0:
        raise BadPrimeError(f"{q} divides the conductor")
    sym = kronecker(order.D, q)
    if sym == 0:
        return RAMIFIED
    if sym == -1:
        return INERT
    disc = order.disc
    if q == 2:
        b = 1  # disc = 1 mod 8 exactly when 2 splits
    else:
        r = sqrt_mod(disc % q, q)
        b = r if (r - disc) % 2 == 0 else q - r
    c_coeff = (b * b - disc) // (4 * q)
    return G.index_of((q, b, c_coeff))


def residue_degree_in_Hc(G, q):
    """Residue degree over Q of the primes of the ring class field above q.

    Split q: the order of the Frobenius class. Inert q: 2, since inert
    primes split completely in the ring class field over K.
    """
    fc = frobenius_class(G, q)
    if fc == RAMIFIED:
        raise ValueError(f"{q} ramifies in K")
    if fc == INERT:
        return 2
    return G.element_order(fc)


# ---------------------------------------------------------------------------
# Cyclotomic integers and primes above p


@lru_cache(maxsize=None)
def _zeta_power(n, k):
    # Coordinates of zeta_n^k in the power basis of Z[zeta_n].
    deg = euler_phi(n)
    k %= n
    if k < deg:
        coeffs = [0] * deg
        coeffs[k] = 1
        return tuple(coeffs)
    phi = cyclotomic_polynomial(n)
    # x^k mod Phi_n by repeated reduction.
    poly = [0] * (k + 1)
    poly[k] = 1
    for i in range(k, deg - 1, -1):
        c = poly[i]
        if c:
            for j, pc in enumerate(phi[:-1]):
                poly[i - deg + j] -= c * pc
            poly[i] = 0
    return tuple(poly[:deg])


@dataclass(frozen=True)
class CyclotomicValue:
    """An element of Z[zeta_n] in the power basis modulo the n-th cyclotomic
    polynomial; coefficients are exact integers."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        if self.n < 1 or self.n > CYCLOTOMIC_ORDER_CAP:
            raise SizeLimitError(f"cyclotomic order must be in [1, {CYCLOTOMIC_ORDER_CAP}]")
        if len(self.coeffs) != euler_phi(self.n):
            raise ValueError("coefficient vector has wrong length")

    @classmethod
    def zero(cls, n):
        return cls(n, (0,) * euler_phi(n))

    @classmethod
    def from_int(cls, n, value):
        coeffs = [0] * euler_phi(n)
        coeffs[0] = value
        return cls(n, tuple(coeffs))

    @classmethod
    def root_power(cls, n, k):
        return cls(n, _zeta_power(n, k))

    def __add__(self, other):
        assert self.n == other.n
        return CyclotomicValue(self.n, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        assert self.n == other.n
        return CyclotomicValue(self.n, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, k):
        return CyclotomicValue(self.n, tuple(k * a for a in self.coeffs))

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def conjugate(self):
        """The image under zeta -> zeta^{-1} (complex conjugation)."""
        out = CyclotomicValue.zero(self.n)
        for i, c in enumerate(self.coeffs):
            if c:
                out = out + CyclotomicValue.root_power(self.n, (-i) % self.n).scale(c)
        return out


@dataclass(frozen=True)
class PrimeAbove:
    """A prime of Z[zeta_n] above p, given by an irreducible factor of Phi_n mod p."""

    p: int
    n: int
    factor: PolyModP

    def __post_init__(self):
        assert self.factor.is_monic()
        phi = PolyModP.make(list(cyclotomic_polynomial(self.n)), self.p)
        assert (phi % self.factor).is_zero(), "factor does not divide Phi_n mod p"

    @property
    def residue_degree(self):
        return self.factor.degree


def primes_above(n, p):
    """All primes of Z[zeta_n] above p, canonically ordered. Requires p prime, p not dividing n."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if n % p == 0:
        raise ValueError("p must not divide n (unramified case only)")
    phi = PolyModP.make(list(cyclotomic_polynomial(n)), p)
    factors = poly_factor_mod_p(phi)
    assert len(set(factors)) == len(factors), "Phi_n mod p must be squarefree"
    return [PrimeAbove(p, n, f) for f in factors]


def choose_prime_above(n, p, reject=None):
    """Canonically-first prime above p not rejected by the predicate, else None."""
    for pa in primes_above(n, p):
        if reject is None or not reject(pa):
            return pa
    return None


def reduce_cyclotomic(x, pa):
    """Image of x in Z[zeta_n]/pa = F_{p^d}, as a residue coefficient tuple of length d."""
    if x.n != pa.n:
        raise ValueError("mismatched cyclotomic orders")
    poly = PolyModP.make(list(x.coeffs), pa.p)
    rem = poly % pa.factor
    out = list(rem.coeffs) + [0] * (pa.residue_degree - len(rem.coeffs))
    return tuple(out)
