"""Elliptic curves over Q: Frobenius traces, local reduction data,
surjectivity witnesses for the mod-p Galois image, and the local torsion
criterion used at bad primes.

All counts are exact. Traces use naive point counting for q <= 10**4 and
baby-step/giant-step order finding up to the 10**6 cap; both paths assert
the Hasse bound on their output.
"""

from dataclasses import dataclass
from math import gcd, isqrt

from .errors import BadReductionError, GoodReductionError, SizeLimitError
from .ntheory import FactoredInteger, factorize, is_prime, kronecker, primes_up_to, sqrt_mod

NAIVE_COUNT_BOUND = 10_000
TRACE_PRIME_CAP = 1_000_000

GOOD = "good"
SPLIT_MULT = "split_multiplicative"
NONSPLIT_MULT = "nonsplit_multiplicative"
ADDITIVE = "additive"


@dataclass(frozen=True)
class CurveModel:
    """A global minimal Weierstrass model; minimality is asserted by the
    supplier and recorded, not re-proved."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int
    conductor: FactoredInteger
    discriminant: int
    modular_degree: int | None = None

    def __post_init__(self):
        if self.discriminant == 0:
            raise ValueError("singular model")
        if self.discriminant != weierstrass_discriminant(self.a_invariants()):
            raise ValueError("stored discriminant does not match the model")
        disc_support = set(factorize(self.discriminant).primes())
        if set(self.conductor.primes()) != disc_support:
            raise ValueError("conductor support does not match the minimal discriminant")
        if self.modular_degree is not None and self.modular_degree < 1:
            raise ValueError("modular degree must be positive")

    @classmethod
    def from_a_invariants(cls, a_invs, conductor, modular_degree=None):
        a1, a2, a3, a4, a6 = a_invs
        if not isinstance(conductor, FactoredInteger):
            conductor = factorize(conductor)
        disc = weierstrass_discriminant(a_invs)
        return cls(a1, a2, a3, a4, a6, conductor, disc, modular_degree)

    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.a_invariants()
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return (b2, b4, b6, b8)

    def c_invariants(self):
        b2, b4, b6, _ = self.b_invariants()
        c4 = b2 * b2 - 24 * b4
        c6 = -b2**3 + 36 * b2 * b4 - 216 * b6
        return (c4, c6)

    @property
    def conductor_value(self):
        return abs(int(self.conductor))


def weierstrass_discriminant(a_invs):
    a1, a2, a3, a4, a6 = a_invs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class ReductionData:
    q: int
    kind: str
    v_disc: int


@dataclass(frozen=True)
class SurjectivityWitness:
    """Witness primes certifying a surjective mod-p image (one-sided)."""

    p: int
    split_disc_prime: int
    nonsplit_disc_prime: int
    exceptional_prime: int


def count_points(E, q):
    """#E(F_q) by exhaustive x-scan; q prime not dividing the conductor."""
    a1, a2, a3, a4, a6 = E.a_invariants()
    if q == 2:
        n = 1
        for x in (0, 1):
            for y in (0, 1):
                if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                    n += 1
        return n
    # Complete the square: (2y + a1 x + a3)^2 = 4f(x) + (a1 x + a3)^2.
    squares = bytearray(q)
    for t in range(q):
        squares[t * t % q] = 1
    n = 1 + q
    for x in range(q):
        g = (4 * (x * x * x + a2 * x * x + a4 * x + a6) + (a1 * x + a3) ** 2) % q
        if g == 0:
            continue
        n += 1 if squares[g] else -1
    return n


def count_points_brute(E, q):
    """Independent oracle: direct enumeration of all affine pairs."""
    a1, a2, a3, a4, a6 = E.a_invariants()
    n = 1
    for x in range(q):
        for y in range(q):
            if (y * y + a1 * x * y + a3 * y - (x**3 + a2 * x * x + a4 * x + a6)) % q == 0:
                n += 1
    return n


def trace_of_frobenius(E, q):
    """a_q = q + 1 - #E(F_q) at a good prime; Hasse bound enforced."""
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if E.conductor_value % q == 0:
        raise BadReductionError(f"{q} divides the conductor")
    if q > TRACE_PRIME_CAP:
        raise SizeLimitError(f"traces supported for q <= {TRACE_PRIME_CAP}")
    if q <= NAIVE_COUNT_BOUND:
        n = count_points(E, q)
    else:
        n = _group_order_bsgs(E, q)
    a = q + 1 - n
    assert a * a <= 4 * q, "Hasse bound violated"
    return a


def reduction_data(E, q):
    """Local reduction type and discriminant valuation at a bad prime q."""
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if E.conductor_value % q != 0:
        raise GoodReductionError(f"{q} does not divide the conductor")
    c4, c6 = E.c_invariants()
    v_disc = _valuation(E.discriminant, q)
    if c4 % q != 0:
        # Multiplicative: split iff -c6 is a square in Q_q (c6 is a q-unit here).
        u = -c6
        if q == 2:
            split = u % 8 == 1
        else:
            split = kronecker(u, q) == 1
        return ReductionData(q, SPLIT_MULT if split else NONSPLIT_MULT, v_disc)
    return ReductionData(q, ADDITIVE, v_disc)


def surjectivity_witness(E, p, l_bound):
    """One-sided surjectivity certificate for the mod-p Galois image.

    Scans good primes l <= l_bound (l != p) for the three witness types of
    the subgroup classification: (i) trace nonzero with nonzero-square
    Frobenius discriminant, (ii) trace nonzero with nonsquare discriminant,
    (iii) trace-squared-over-l avoiding {0, 1, 2, 4} and the roots of
    u^2 - 3u + 1. Returns a SurjectivityWitness, or None when undetermined.
    Never returns a false positive; monotone in l_bound.
    """
    if p < 5:
        raise ValueError("p must be at least 5")
    if E.conductor_value % p == 0:
        raise ValueError("p must not divide the conductor")
    split_l = nonsplit_l = exceptional_l = None
    for ell in primes_up_to(l_bound):
        if ell == p or E.conductor_value % ell == 0:
            continue
        a = trace_of_frobenius(E, ell) % p
        disc = (a * a - 4 * ell) % p
        if a != 0 and disc != 0:
            if sqrt_mod(disc, p) is not None:
                if split_l is None:
                    split_l = ell
            elif nonsplit_l is None:
                nonsplit_l = ell
        if exceptional_l is None:
            u = a * a * pow(ell, -1, p) % p
            if u not in (0, 1, 2, 4) and (u * u - 3 * u + 1) % p != 0:
                exceptional_l = ell
        if split_l and nonsplit_l and exceptional_l:
            return SurjectivityWitness(p, split_l, nonsplit_l, exceptional_l)
    return None


def local_torsion_pfree(E, q, f, p):
    """Sufficient criterion for p not dividing the local torsion order over
    the unramified degree-f extension at a bad prime q.

    The p-part of the torsion injects into (component group) x (nonsingular
    points of the reduction); Verified (True) when p divides neither bound,
    Undetermined (False) otherwise. Conservative: may return False for
    primes whose actual torsion is prime to p.
    """
    if p < 5 or p == q or f < 1:
        raise ValueError("requires p >= 5, p != q, f >= 1")
    rd = reduction_data(E, q)
    if rd.kind == ADDITIVE:
        # Component group has order at most 4 and the nonsingular part is
        # additive of order q^f; both prime to p >= 5.
        return True
    phi_bound = rd.v_disc
    if rd.kind == SPLIT_MULT or f % 2 == 0:
        ns_order = q**f - 1
    else:
        ns_order = q**f + 1
    return phi_bound % p != 0 and ns_order % p != 0


def _valuation(n, q):
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


# ---------------------------------------------------------------------------
# Group order above the naive-count bound


def _ec_neg(P, a1, a3, q):
    if P is None:
        return None
    x, y = P
    return (x, (-y - a1 * x - a3) % q)


def _ec_add(P, Q, a_invs, q):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = a_invs
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2 and (y2 + y1 + a1 * x1 + a3) % q == 0:
        return None
    if x1 == x2:
        den = (2 * y1 + a1 * x1 + a3) % q
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * pow(den, -1, q) % q
        nu = (-(x1**3) + a4 * x1 + 2 * a6 - a3 * y1) * pow(den, -1, q) % q
    else:
        den = (x2 - x1) % q
        lam = (y2 - y1) * pow(den, -1, q) % q
        nu = (y1 * x2 - y2 * x1) * pow(den, -1, q) % q
    x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % q
    y3 = (-(lam + a1) * x3 - nu - a3) % q
    return (x3, y3)


def _ec_mul(k, P, a_invs, q):
    if k < 0:
        return _ec_mul(-k, _ec_neg(P, a_invs[0], a_invs[2], q), a_invs, q)
    R = None
    while k:
        if k & 1:
            R = _ec_add(R, P, a_invs, q)
        P = _ec_add(P, P, a_invs, q)
        k >>= 1
    return R


def _sample_points(E, q):
    # Deterministic x-scan; yields affine points with canonical y.
    a1, a2, a3, a4, a6 = E.a_invariants()
    for x in range(q):
        g = (4 * (x**3 + a2 * x * x + a4 * x + a6) + (a1 * x + a3) ** 2) % q
        t = sqrt_mod(g, q)
        if t is None:
            continue
        y = (t - a1 * x - a3) * pow(2, -1, q) % q
        yield (x, y)


def _point_order_multiple_in_interval(E, q, P, lo, hi):
    # All m in [lo, hi] with m*P = O, found by baby-step/giant-step.
    a_invs = E.a_invariants()
    width = hi - lo + 1
    B = isqrt(width) + 1
    baby = {}
    R = None
    for j in range(B):
        baby.setdefault(R, []).append(j)
        R = _ec_add(R, P, a_invs, q)
    G = _ec_mul(B, P, a_invs, q)
    hits = []
    cur = _ec_mul(lo, P, a_invs, q)
    a1, a3 = a_invs[0], a_invs[2]
    for k in range((width // B) + 2):
        # m*P = O  <=>  (lo + kB)*P = -j*P
        neg = _ec_neg(cur, a1, a3, q)
        for j in baby.get(neg, []):
            m = lo + k * B + j
            if lo <= m <= hi:
                hits.append(m)
        cur = _ec_add(cur, G, a_invs, q)
    return sorted(set(hits))


def _exact_order(E, q, P, multiple):
    a_invs = E.a_invariants()
    n = multiple
    for p, e in factorize(n).factors:
        for _ in range(e):
            if _ec_mul(n // p, P, a_invs, q) is None:
                n //= p
            else:
                break
    return n


def _group_order_bsgs(E, q):
    lo = q + 1 - 2 * isqrt(q)
    hi = q + 1 + 2 * isqrt(q)
    L = 1
    for P in _sample_points(E, q):
        hits = _point_order_multiple_in_interval(E, q, P, lo, hi)
        assert hits, "Hasse interval must contain a multiple of the point order"
        g = hits[0]
        for m in hits[1:]:
            g = gcd(g, m)
        n_p = _exact_order(E, q, P, g)
        L = L * n_p // gcd(L, n_p)
        candidates = [m for m in range(lo + (-lo) % L, hi + 1, L)] if L else []
        if len(candidates) == 1:
            return candidates[0]
    # Exponent never pinned the order; fall back to the exhaustive count.
    return count_points(E, q)
