"""Exact linear algebra over Z, Q and F_p on small dense matrices.

Matrices are row-major lists of lists of Python ints (Fractions where
stated); inputs are never mutated. Everything here favours transparency and
exactness over asymptotics: consumers work with matrices of dimension at
most a few dozen, so cubic algorithms with arbitrary-precision entries are
the right trade-off. No floating point anywhere.
"""

from fractions import Fraction


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    out = []
    for i in range(rows):
        ai = a[i]
        row = [sum(ai[k] * b[k][j] for k in range(inner)) for j in range(cols)]
        out.append(row)
    return out


def mat_vec(a, v):
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def vec_mat(v, a):
    return [sum(v[k] * a[k][j] for k in range(len(v))) for j in range(len(a[0]))]


def transpose(a):
    return [list(col) for col in zip(*a)]


def hnf(rows):
    """Canonical row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns an echelon basis with positive pivots and entries above each
    pivot reduced into [0, pivot). Zero rows are dropped, so two generating
    sets span the same integer lattice iff their hnf() results are equal.
    """
    m = [list(r) for r in rows if any(r)]
    if not m:
        return []
    ncols = len(m[0])
    pivot = 0
    for col in range(ncols):
        if pivot >= len(m):
            break
        # Euclidean elimination below the pivot row in this column.
        while True:
            nz = [i for i in range(pivot, len(m)) if m[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(m[i][col]), i))
            m[pivot], m[i0] = m[i0], m[pivot]
            done = True
            for i in range(pivot + 1, len(m)):
                if m[i][col]:
                    q = m[i][col] // m[pivot][col]
                    m[i] = [x - q * y for x, y in zip(m[i], m[pivot])]
                    if m[i][col]:
                        done = False
            if done:
                break
        if pivot < len(m) and m[pivot][col]:
            if m[pivot][col] < 0:
                m[pivot] = [-x for x in m[pivot]]
            p = m[pivot][col]
            for i in range(pivot):
                q = m[i][col] // p
                if q:
                    m[i] = [x - q * y for x, y in zip(m[i], m[pivot])]
            pivot += 1
        m = [r for r in m if any(r)]
    m = [r for r in m if any(r)]
    return m


def det(mat):
    """Exact determinant via fraction-free style elimination on Fractions."""
    n = len(mat)
    a = [[Fraction(x) for x in row] for row in mat]
    sign = 1
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        for i in range(col + 1, n):
            if a[i][col]:
                f = a[i][col] / a[col][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    out = Fraction(sign)
    for i in range(n):
        out *= a[i][i]
    return out


def invert(mat):
    """Inverse of a square matrix, as Fractions. Raises ZeroDivisionError if singular."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col]), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        f = a[col][col]
        a[col] = [x / f for x in a[col]]
        for i in range(n):
            if i != col and a[i][col]:
                g = a[i][col]
                a[i] = [x - g * y for x, y in zip(a[i], a[col])]
    return [row[n:] for row in a]


def rref_mod_p(mat, p):
    """Reduced row echelon form mod p: returns (rows, pivot_columns)."""
    m = [[x % p for x in row] for row in mat]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][col], -1, p)
        m[r] = [(x * inv) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                f = m[i][col]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    rows = [row for row in m[:r]]
    return rows, pivots


def rank_mod_p(mat, p):
    if not mat:
        return 0
    return len(rref_mod_p(mat, p)[0])


def nullspace_mod_p(mat, p):
    """Canonical basis of the right kernel {v : mat . v = 0 mod p}."""
    if not mat:
        return []
    ncols = len(mat[0])
    rows, pivots = rref_mod_p(mat, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-rows[r][fc]) % p
        basis.append(v)
    return basis


def rowspace_mod_p(mat, p):
    """Canonical (RREF) basis of the row space mod p, for subspace comparison."""
    if not mat:
        return []
    return rref_mod_p(mat, p)[0]


def nullspace_rational(mat):
    """Right kernel over Q, returned as primitive integer vectors (canonical)."""
    if not mat:
        return []
    ncols = len(mat[0])
    a = [[Fraction(x) for x in row] for row in mat]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        f = a[r][col]
        a[r] = [x / f for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col]:
                g = a[i][col]
                a[i] = [x - g * y for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
        if r == len(a):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -a[i][fc]
        basis.append(primitive_vector(v))
    return basis


def primitive_vector(v):
    """Scale a rational vector to a primitive integer vector, first nonzero entry positive."""
    from math import gcd
    den = 1
    for x in v:
        f = Fraction(x)
        den = den * f.denominator // gcd(den, f.denominator)
    w = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in w:
        g = gcd(g, x)
    if g:
        w = [x // g for x in w]
    for x in w:
        if x:
            if x < 0:
                w = [-y for y in w]
            break
    return w


def smith_normal_form(mat):
    """Smith normal form with right transform: returns (diag, V) with U*mat*V diagonal.

    Only the right transform V (unimodular, ncols x ncols) is tracked; it is
    what converts generator coordinates into invariant-factor coordinates.
    ``diag`` lists the diagonal entries (nonnegative, each dividing the next
    among the nonzero ones).
    """
    a = [list(r) for r in mat]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    v = identity(ncols)
    t = 0
    while t < min(nrows, ncols):
        # Find the nonzero entry of smallest absolute value in the remaining block.
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        a[t], a[bi] = a[bi], a[t]
        for row in a:
            row[t], row[bj] = row[bj], row[t]
        for row in v:
            row[t], row[bj] = row[bj], row[t]
        dirty = False
        for i in range(t + 1, nrows):
            if a[i][t]:
                q = a[i][t] // a[t][t]
                a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    dirty = True
        for j in range(t + 1, ncols):
            if a[t][j]:
                q = a[t][j] // a[t][t]
                for row in a:
                    row[j] -= q * row[t]
                for row in v:
                    row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
        if dirty:
            continue
        # Enforce divisibility of the remaining block by the pivot.
        offender = None
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if a[i][j] % a[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            a[t] = [x + y for x, y in zip(a[t], a[offender])]
            continue
        if a[t][t] < 0:
            for row in a:
                row[t] = -row[t]
            for row in v:
                row[t] = -row[t]
        t += 1
    diag = [a[i][i] if i < ncols else 0 for i in range(min(nrows, ncols))]
    diag = [d for d in diag]
    while len(diag) < ncols:
        diag.append(0)
    return diag, v
