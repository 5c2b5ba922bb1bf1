"""Optimal embeddings of imaginary quadratic orders into Eichler orders, the
induced map from form classes to ideal classes, and the algebraic special
value attached to an eigenform and a ring class character.

The embedding sends the canonical order generator w = c(D + sqrt(D))/2 to a
lattice element with matching reduced trace and norm, found by complete
short-vector enumeration on the norm form. Optimality (no conductor
inflation) is verified by an exact index computation, never assumed.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import intlinalg as la
from . import quaternion as qt
from .errors import ConstructionError, EmbeddingNotFound
from .ntheory import kronecker
from .quadratic import CyclotomicValue, reduce_cyclotomic


@dataclass(frozen=True)
class OptimalEmbedding:
    """An embedding of a quadratic order into an Eichler order, recorded by
    the image of the canonical generator w (coordinates over the order
    basis, always integral)."""

    order: qt.EichlerOrder
    quad_order: object
    image: tuple  # coordinates of psi(w) over (1, i, j, ij), Fractions
    coords_in_order: tuple

    def __post_init__(self):
        alg = self.order.algebra
        x = self.image
        assert alg.trd(x) == self.quad_order.omega_trace()
        assert alg.nrd(x) == self.quad_order.omega_norm()
        assert all(c.denominator == 1 for c in self.order.lattice.coords(x))
        assert _embedding_index(self.order, x) == 1, "embedding is not optimal"

    def apply(self, u, v):
        """psi(u + v*w) as an algebra element."""
        one = self.order.algebra.one()
        return tuple(Fraction(u) * o + Fraction(v) * i for o, i in zip(one, self.image))


def _embedding_index(order, x):
    # Index in Z^2 of the lattice {(u, v) : u + v*x in order}; 1 iff optimal.
    r1 = [int(c) for c in order.lattice.coords(order.algebra.one())]
    rx = [int(c) for c in order.lattice.coords(x)]
    cols = [[a, b] for a, b in zip(r1, rx)]
    h = la.hnf(cols)
    assert len(h) == 2
    return abs(h[0][0] * h[1][1])


def check_heegner_hypotheses(quad_order, nminus, nplus):
    """The local splitting conditions: every prime of N^- inert in K and
    every prime of N^+ split in K; c prime to N D. Returns the first
    violated condition name, or None."""
    D, c = quad_order.D, quad_order.c
    N = int(nminus) * int(nplus)
    if gcd(c, N * D) != 1:
        return "conductor-not-coprime"
    if gcd(D, N) != 1:
        return "discriminant-not-coprime"
    for q, _ in nminus.factors:
        if kronecker(D, q) != -1:
            return f"prime-{q}-of-Nminus-not-inert"
    for q, _ in nplus.factors:
        if kronecker(D, q) != 1:
            return f"prime-{q}-of-Nplus-not-split"
    return None


def optimal_embedding(order, quad_order):
    """First (canonical enumeration order) optimal embedding of the quadratic
    order into the given Eichler order.

    Raises EmbeddingNotFound with reason "heegner-hypothesis-violated" when
    a local condition fails (no order in the algebra works), or
    "not-in-this-order" when the complete search region is exhausted (the
    embedding lives in a different ideal class).
    """
    violated = check_heegner_hypotheses(quad_order, order.nminus, order.level)
    if violated is not None:
        raise EmbeddingNotFound("heegner-hypothesis-violated", violated)
    t = quad_order.omega_trace()
    n = quad_order.omega_norm()
    alg = order.algebra
    g = order.lattice.gram()
    M = [[Fraction(g[u][v], 2) for v in range(4)] for u in range(4)]
    basis = order.lattice.elements()
    for coords, val in sorted(qt.short_vectors(M, Fraction(n))):
        if val != Fraction(n):
            continue
        x = tuple(sum(Fraction(coords[u]) * basis[u][s] for u in range(4)) for s in range(4))
        if alg.trd(x) != t:
            continue
        if _embedding_index(order, x) != 1:
            continue
        return OptimalEmbedding(order, quad_order, x, tuple(coords))
    raise EmbeddingNotFound("not-in-this-order",
                            f"trace {t} norm {n} exhausted in this class")


def embedding_into_class_set(cls, quad_order):
    """Optimal embedding into the left order of the first class admitting
    one, scanning classes in canonical order. Returns (embedding, index)."""
    last = None
    for j in range(cls.h):
        candidate_order = qt.EichlerOrder(cls.order.algebra, cls.left_orders[j],
                                          cls.order.nminus, cls.order.level)
        try:
            return optimal_embedding(candidate_order, quad_order), j
        except EmbeddingNotFound as exc:
            if exc.reason == "heegner-hypothesis-violated":
                raise
            last = exc
    raise ConstructionError(
        f"no class admits an optimal embedding although the local conditions hold: {last}"
    )


@dataclass(frozen=True)
class GrossVector:
    """The map from form classes to ideal classes induced by an optimal
    embedding: class sigma -> class of psi(ideal_sigma) * R."""

    embedding: OptimalEmbedding
    classes: object  # FormClassGroup
    map: tuple

    def __post_init__(self):
        assert len(self.map) == self.classes.h


def _gross_point_class(psi, cls, form):
    """Ideal class index of psi(lattice of the form) * R, for any primitive
    form of the right discriminant (not necessarily reduced)."""
    a, b, _ = form
    quad = psi.quad_order
    assert b * b - 4 * a * form[2] == quad.disc
    alg = cls.order.algebra
    cd = quad.c * quad.D
    assert (b + cd) % 2 == 0
    g1 = psi.apply(a, 0)
    g2 = psi.apply((-b - cd) // 2, 1)
    rows = []
    for gen in (g1, g2):
        for r in cls.order.lattice.elements():
            rows.append(list(alg.mul(gen, r)))
    J = qt.QLattice.from_rows(alg, rows)
    assert J.norm_content() == a, "lift must have reduced norm a"
    for k in range(cls.h):
        if qt.same_ideal_class(J, cls.ideals[k]):
            return k
    raise ConstructionError("ideal class location failed; class set incomplete")


def psi_hat(psi, cls, G):
    """The induced map on class sets, recorded by indices into the class set.

    The identity class is computed, not assumed, to land on the principal
    class (the base order); any other outcome is an internal error.
    """
    indices = []
    for form in G.classes:
        indices.append(_gross_point_class(psi, cls, form))
    gv = GrossVector(psi, G, tuple(indices))
    assert gv.map[G.identity_index] == cls.base_index, \
        "identity class must land on the principal class"
    return gv


def algebraic_special_value(phi_values, gv, chi):
    """sum over classes sigma of chi^{-1}(sigma) * phi(psi_hat(sigma)), as an
    exact element of Z[zeta_n]."""
    if hasattr(phi_values, "values"):
        phi_values = phi_values.values
    G = gv.classes
    assert chi.group is G or chi.group.classes == G.classes
    n = chi.n
    total = CyclotomicValue.zero(n)
    for k in range(G.h):
        term = CyclotomicValue.root_power(n, (-chi.exponent(k)) % n)
        total = total + term.scale(phi_values[gv.map[k]])
    return total


def nonvanishing_mod(L, pa):
    """True iff the image of L in Z[chi]/pa is nonzero."""
    return any(c % pa.p != 0 for c in reduce_cyclotomic(L, pa))


def all_optimal_embeddings(order, quad_order):
    """All optimal embeddings into the order, up to conjugation by the unit
    group; deterministic representatives in canonical order."""
    violated = check_heegner_hypotheses(quad_order, order.nminus, order.level)
    if violated is not None:
        return []
    t = quad_order.omega_trace()
    n = quad_order.omega_norm()
    alg = order.algebra
    g = order.lattice.gram()
    M = [[Fraction(g[u][v], 2) for v in range(4)] for u in range(4)]
    basis = order.lattice.elements()
    images = []
    for coords, val in sorted(qt.short_vectors(M, Fraction(n))):
        if val != Fraction(n):
            continue
        x = tuple(sum(Fraction(coords[u]) * basis[u][s] for u in range(4)) for s in range(4))
        if alg.trd(x) != t or _embedding_index(order, x) != 1:
            continue
        images.append((tuple(coords), x))
    units = []
    for coords, val in qt.short_vectors(M, Fraction(1)):
        if val == 1:
            u = tuple(sum(Fraction(coords[s]) * basis[s][r] for s in range(4)) for r in range(4))
            units.append(u)
    seen = set()
    reps = []
    for coords, x in images:
        if coords in seen:
            continue
        reps.append(OptimalEmbedding(order, quad_order, x, coords))
        for u in units:
            ubar = alg.conj(u)
            y = alg.mul(alg.mul(u, x), ubar)  # u x u^{-1}; Nrd(u) = 1
            ycoords = tuple(int(c) for c in order.lattice.coords(y))
            seen.add(ycoords)
    return reps
