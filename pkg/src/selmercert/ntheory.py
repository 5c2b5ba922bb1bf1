"""Integer and modular arithmetic primitives: primality, factorization,
Kronecker symbols, square roots mod p, and polynomial arithmetic over F_p
including irreducible factorization.

All routines are deterministic; probabilistic acceptance is never used
inside certificate-grade computations. Integers above the 64-bit bound are
rejected rather than handled probabilistically.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .errors import SizeLimitError

INT_BIT_BOUND = 64

# Witnesses making Miller-Rabin deterministic for all n < 3.3e24 > 2**64.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n):
    """Deterministic primality for 0 <= |n| < 2**64; raises SizeLimitError beyond."""
    if n < 0:
        n = -n
    if n.bit_length() > INT_BIT_BOUND:
        raise SizeLimitError(f"primality supported below 2**{INT_BIT_BOUND}")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(bound):
    """All primes <= bound via sieve."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(2, bound + 1) if sieve[i]]


def _pollard_brent(n):
    # Deterministic parameter sweep; n odd composite, no small factors.
    for c in range(1, 100):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"rho failed on {n}")  # unreachable for n < 2**64


@dataclass(frozen=True)
class FactoredInteger:
    """An integer together with its verified prime factorization.

    ``factors`` is a tuple of (prime, exponent) pairs with strictly
    increasing primes whose product equals |value|.
    """

    value: int
    factors: tuple

    def __post_init__(self):
        if self.value == 0:
            raise ValueError("zero has no factorization")
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1 or not is_prime(p):
                raise ValueError(f"invalid factor ({p}, {e})")
            last = p
            prod *= p**e
        if prod != abs(self.value):
            raise ValueError("factors do not multiply to |value|")

    @classmethod
    def from_int(cls, n):
        return factorize(n)

    def primes(self):
        return [p for p, _ in self.factors]

    def exponent(self, q):
        for p, e in self.factors:
            if p == q:
                return e
        return 0

    def radical(self):
        r = 1
        for p, _ in self.factors:
            r *= p
        return r

    def is_squarefree(self):
        return all(e == 1 for _, e in self.factors)

    def __int__(self):
        return self.value


def factorize(n):
    """Factor a nonzero integer below the bit bound; deterministic, re-verified."""
    if n == 0:
        raise ValueError("cannot factor 0")
    if abs(n).bit_length() > INT_BIT_BOUND:
        raise SizeLimitError(f"factorization supported below 2**{INT_BIT_BOUND}")
    m = abs(n)
    found = {}

    def record(p):
        found[p] = found.get(p, 0) + 1

    for p in (2, 3, 5, 7):
        while m % p == 0:
            record(p)
            m //= p
    d = 11
    while d <= 10_000 and d * d <= m:
        while m % d == 0:
            record(d)
            m //= d
        d += 2
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            record(m)
            continue
        r = isqrt(m)
        if r * r == m:
            stack.extend([r, r])
            continue
        g = _pollard_brent(m)
        stack.extend([g, m // g])
    factors = tuple(sorted(found.items()))
    return FactoredInteger(n, factors)


def _jacobi(a, m):
    # m odd positive
    a %= m
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if m % 8 in (3, 5):
                t = -t
        a, m = m, a
        if a % 4 == 3 and m % 4 == 3:
            t = -t
        a %= m
    return t if m == 1 else 0


def kronecker(a, n):
    """Kronecker symbol (a|n), the multiplicative extension of Legendre; n != 0."""
    if n == 0:
        raise ValueError("kronecker symbol needs n != 0")
    t = 1
    if n < 0:
        n = -n
        if a < 0:
            t = -t
    e = 0
    while n % 2 == 0:
        n //= 2
        e += 1
    if e:
        if a % 2 == 0:
            return 0
        if e % 2 and a % 8 in (3, 5):
            t = -t
    return t * _jacobi(a, n)


def sqrt_mod(a, p):
    """A square root of a mod p (p prime), or None when a is a non-residue.

    Returns the canonical root min(r, p-r); Tonelli-Shanks with a
    deterministic non-residue search.
    """
    a %= p
    if a == 0:
        return 0
    if p == 2:
        return 1
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t * t % p, 1
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return min(r, p - r)


def multiplicative_order(a, n):
    """Order of a modulo n; requires gcd(a, n) = 1."""
    if gcd(a, n) != 1:
        raise ValueError("element not invertible")
    if n == 1:
        return 1
    order = 1
    a %= n
    x = a
    while x != 1:
        x = x * a % n
        order += 1
    return order


# ---------------------------------------------------------------------------
# Polynomials over F_p


@dataclass(frozen=True)
class PolyModP:
    """Polynomial over F_p; coeffs little-endian with nonzero leading coefficient."""

    coeffs: tuple
    p: int

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] % self.p == 0:
            raise ValueError("leading coefficient must be nonzero")
        if any(not (0 <= c < self.p) for c in self.coeffs):
            raise ValueError("coefficients must be reduced mod p")

    @classmethod
    def make(cls, coeffs, p):
        c = [x % p for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return cls(tuple(c), p)

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def monic(self):
        if self.is_zero():
            return self
        inv = pow(self.coeffs[-1], -1, self.p)
        return PolyModP.make([c * inv for c in self.coeffs], self.p)

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return PolyModP.make([x + y for x, y in zip(a, b)], self.p)

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return PolyModP.make([x - y for x, y in zip(a, b)], self.p)

    def __mul__(self, other):
        if self.is_zero() or other.is_zero():
            return PolyModP((), self.p)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] += x * y
        return PolyModP.make(out, self.p)

    def scale(self, k):
        return PolyModP.make([c * k for c in self.coeffs], self.p)

    def __divmod__(self, other):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        p = self.p
        rem = list(self.coeffs)
        dq = len(self.coeffs) - len(other.coeffs)
        if dq < 0:
            return PolyModP((), p), self
        quo = [0] * (dq + 1)
        inv = pow(other.coeffs[-1], -1, p)
        for i in range(dq, -1, -1):
            c = rem[i + len(other.coeffs) - 1] * inv % p
            quo[i] = c
            if c:
                for j, y in enumerate(other.coeffs):
                    rem[i + j] = (rem[i + j] - c * y) % p
        return PolyModP.make(quo, p), PolyModP.make(rem, p)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def derivative(self):
        return PolyModP.make(
            [i * c for i, c in enumerate(self.coeffs)][1:], self.p
        )

    def pow_mod(self, e, modulus):
        result = PolyModP.make([1], self.p)
        base = self % modulus
        while e:
            if e & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            e >>= 1
        return result

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def sort_key(self):
        return (self.degree, tuple(reversed(self.coeffs)))


def poly_gcd(a, b):
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_x(p):
    return PolyModP.make([0, 1], p)


def _pth_root(f):
    # Valid exactly when f' = 0, i.e. f = g(x^p) = g(x)^p over F_p.
    return PolyModP.make(list(f.coeffs)[::f.p], f.p)


def _distinct_degree(f):
    # f monic squarefree; yield (product of irreducibles of degree d, d).
    p = f.p
    out = []
    x = poly_x(p)
    h = x
    rest = f
    d = 0
    while rest.degree > 0:
        d += 1
        if 2 * d > rest.degree:
            out.append((rest, rest.degree))
            break
        h = h.pow_mod(p, rest)
        g = poly_gcd(h - x, rest)
        if g.degree > 0:
            out.append((g, d))
            rest = rest // g
            h = h % rest
    return out


def _candidate_polys(p, max_degree):
    # Canonical deterministic sequence replacing random splitters.
    for deg in range(1, max_degree + 1):
        for tail in range(p**deg):
            coeffs = []
            t = tail
            for _ in range(deg):
                coeffs.append(t % p)
                t //= p
            coeffs.append(1)
            yield PolyModP.make(coeffs, p)


def _equal_degree_split(f, d):
    # f monic squarefree, all irreducible factors of degree d.
    p = f.p
    if f.degree == d:
        return [f]
    n = f.degree
    for t in _candidate_polys(p, max(1, n - 1)):
        if p == 2:
            # Trace map over F_{2^d}.
            acc = t % f
            cur = t % f
            for _ in range(d - 1):
                cur = cur.pow_mod(2, f)
                acc = (acc + cur) % f
            g = poly_gcd(acc, f)
        else:
            e = (p**d - 1) // 2
            g = poly_gcd(t.pow_mod(e, f) - PolyModP.make([1], p), f)
        if 0 < g.degree < f.degree:
            return _equal_degree_split(g, d) + _equal_degree_split(f // g, d)
    raise ArithmeticError("equal-degree splitting exhausted candidates")


def poly_factor_mod_p(f):
    """Irreducible factorization over F_p.

    Returns the monic irreducible factors as a flat list with multiplicity,
    sorted canonically (degree, then lexicographic coefficients from the
    leading one down). The product of the returned factors equals f up to
    the unit leading coefficient of f.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if not is_prime(f.p):
        raise ValueError("modulus must be prime")
    return sorted(_factor_monic(f.monic()), key=lambda h: h.sort_key())


def _factor_monic(f):
    if f.degree < 1:
        return []
    fp = f.derivative()
    if fp.is_zero():
        # Multiplicities all divisible by p; factor the p-th root instead.
        return _factor_monic(_pth_root(f)) * f.p
    squarefree = f // poly_gcd(f, fp)
    distinct = []
    for g, d in _distinct_degree(squarefree):
        distinct.extend(_equal_degree_split(g, d))
    out = []
    rest = f
    for h in distinct:
        while rest.degree >= h.degree and (rest % h).is_zero():
            out.append(h)
            rest = rest // h
    # Whatever remains has every multiplicity divisible by p.
    out.extend(_factor_monic(rest))
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n):
    """Coefficients (little-endian, over Z) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    # x^n - 1 divided by all proper cyclotomic divisors, exact integer division.
    poly = [Fraction(-1)] + [Fraction(0)] * (n - 1) + [Fraction(1)]
    for d in range(1, n):
        if n % d == 0:
            phi_d = cyclotomic_polynomial(d)
            poly = _poly_div_exact(poly, [Fraction(c) for c in phi_d])
    out = []
    for c in poly:
        assert c.denominator == 1
        out.append(int(c))
    return tuple(out)


def _poly_div_exact(num, den):
    num = list(num)
    q = [Fraction(0)] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1] / den[-1]
        q[i] = c
        for j, y in enumerate(den):
            num[i + j] -= c * y
    assert all(c == 0 for c in num)
    return q


def euler_phi(n):
    out = n
    for p, _ in factorize(n).factors:
        out -= out // p
    return out
