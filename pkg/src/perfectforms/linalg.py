"""Small exact linear algebra over Q (row echelon, rank, nullspace, inverse).

Matrices are lists of rows; entries may be ints or gmpy2 rationals.  Sizes in
this package are tiny (at most a few dozen rows of length <= 6), so plain
Gaussian elimination over mpq is the right tool.
"""

from __future__ import annotations

from math import gcd

from gmpy2 import mpq


def row_echelon(rows):
    """Reduced row echelon form; returns (rows, pivot_columns)."""
    m = [[mpq(x) for x in r] for r in rows]
    if not m:
        return m, []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    """Rank over Q, by fraction-free (Bareiss) elimination on integer rows."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    if all(isinstance(x, int) for r in rows for x in r):
        return _bareiss_rank(rows)
    return len(row_echelon(rows)[1])


def _bareiss_rank(m) -> int:
    nrows, ncols = len(m), len(m[0])
    r = 0
    prev = 1
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        for i in range(r + 1, nrows):
            f = m[i][c]
            m[i] = [(p * x - f * y) // prev for x, y in zip(m[i], m[r])]
        prev = p
        r += 1
        if r == nrows:
            break
    return r


def nullspace(rows, ncols: int | None = None):
    """Basis of {x : rows . x = 0}, as rational vectors."""
    if not rows:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return [[mpq(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ncols = len(rows[0])
    red, pivots = row_echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [mpq(0)] * ncols
        v[f] = mpq(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i][f]
        basis.append(v)
    return basis


def inverse(mat):
    n = len(mat)
    aug = [list(map(mpq, r)) + [mpq(int(i == j)) for j in range(n)] for i, r in enumerate(mat)]
    red, pivots = row_echelon(aug)
    if pivots[:n] != list(range(n)) or len(red) < n:
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in red]


def det(mat):
    """Determinant by Gaussian elimination over Q."""
    m = [list(map(mpq, r)) for r in mat]
    n = len(m)
    result = mpq(1)
    for c in range(n):
        piv = None
        for i in range(c, n):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            return mpq(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            result = -result
        p = m[c][c]
        result *= p
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result


def primitive(vec, fix_sign: bool = True) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers.

    With ``fix_sign`` the first nonzero entry is made positive; otherwise the
    result is a positive multiple of ``vec``.
    """
    vec = [mpq(x) for x in vec]
    den = 1
    for x in vec:
        den = den * int(x.denominator) // gcd(den, int(x.denominator))
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    ints = [x // g for x in ints]
    if not fix_sign:
        return tuple(ints)
    for x in ints:
        if x:
            if x < 0:
                ints = [-y for y in ints]
            break
    return tuple(ints)


def dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def matmul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]
