"""Minimum and minimal vectors of a positive-definite rational Gram matrix.

Enumeration is Fincke-Pohst with Schnorr-Euchner zig-zag ordering, run on an
LLL-reduced basis.  Everything is exact: the Gram matrix, the quadratic
decomposition and every pruning comparison are gmpy2 rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from gmpy2 import mpq

from .formspace import RationalGram, vector_to_field
from .linalg import inverse

__all__ = [
    "NotPositiveDefiniteError",
    "MinimalData",
    "quadratic_decomposition",
    "lll_reduce",
    "short_vectors",
    "minimal_vectors",
    "brute_force_minimal_vectors",
    "certifying_box",
    "canonical_sign",
]


class NotPositiveDefiniteError(ValueError):
    pass


@dataclass(frozen=True)
class MinimalData:
    minimum: mpq
    vectors: tuple  # integer coordinate tuples, one per +-pair, sorted

    def __len__(self):
        return len(self.vectors)

    def field_vectors(self, F):
        return [vector_to_field(F, v) for v in self.vectors]

    def to_json(self) -> dict:
        from .qfield import q_to_str
        return {"minimum": q_to_str(self.minimum), "vectors": [list(v) for v in self.vectors]}


def canonical_sign(v) -> tuple[int, ...]:
    for x in v:
        if x:
            return tuple(v) if x > 0 else tuple(-y for y in v)
    return tuple(v)


def _rows(g):
    if isinstance(g, RationalGram):
        return [list(r) for r in g.entries]
    return [[mpq(x) for x in r] for r in g]


def quadratic_decomposition(g):
    """Return q with Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2.

    Raises NotPositiveDefiniteError when a pivot is not positive.
    """
    q = _rows(g)
    n = len(q)
    for i in range(n):
        if q[i][i] <= 0:
            raise NotPositiveDefiniteError("Gram matrix is not positive definite")
        qi = q[i]
        piv = qi[i]
        for j in range(i + 1, n):
            q[j][i] = qi[j]
            qi[j] = qi[j] / piv
        for k in range(i + 1, n):
            qki = q[k][i]
            if qki:
                qk = q[k]
                for l in range(k, n):
                    qk[l] -= qki * qi[l]
    return q


def _round(x: mpq) -> int:
    return int((2 * x.numerator + x.denominator) // (2 * x.denominator))


def lll_reduce(g, delta=mpq(3, 4)):
    """LLL-reduce the lattice given by Gram matrix g.

    Returns (reduced_gram, basis): basis is the list of reduced integer basis
    vectors in original coordinates, reduced_gram their Gram matrix.
    """
    G = _rows(g)
    n = len(G)
    B = [[int(i == j) for j in range(n)] for i in range(n)]  # rows = basis vectors
    H = [row[:] for row in G]  # current Gram, H[i][j] = b_i . b_j

    def gso():
        mu = [[mpq(0)] * n for _ in range(n)]
        bs = [mpq(0)] * n
        for i in range(n):
            for j in range(i):
                s = H[i][j]
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * bs[k]
                mu[i][j] = s / bs[j]
            s = H[i][i]
            for k in range(i):
                s -= mu[i][k] * mu[i][k] * bs[k]
            if s <= 0:
                raise NotPositiveDefiniteError("Gram matrix is not positive definite")
            bs[i] = s
        return mu, bs

    def sub(k, j, c):
        # b_k <- b_k - c b_j
        B[k] = [x - c * y for x, y in zip(B[k], B[j])]
        hkk, hkj, hjj = H[k][k], H[k][j], H[j][j]
        for t in range(n):
            if t != k:
                H[k][t] -= c * H[j][t]
                H[t][k] = H[k][t]
        H[k][k] = hkk - 2 * c * hkj + c * c * hjj

    mu, bs = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            c = _round(mu[k][j])
            if c:
                sub(k, j, c)
                mu, bs = gso()
        if bs[k] >= (delta - mu[k][k - 1] ** 2) * bs[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            H[k], H[k - 1] = H[k - 1], H[k]
            for row in H:
                row[k], row[k - 1] = row[k - 1], row[k]
            mu, bs = gso()
            k = max(k - 1, 1)
    return H, [list(r) for r in B]


def _enumerate(q, bound, strict, shrink):
    """Core Fincke-Pohst walk on decomposition q.

    Yields (y, value) for y with last nonzero entry positive and value <= bound
    (or < bound when strict).  When ``shrink`` is set the bound tightens to the
    best value found so far, so only vectors of the final minimum survive at
    the caller's filtering step.
    """
    n = len(q)
    diag = [q[i][i] for i in range(n)]
    state = {"bound": mpq(bound)}
    found = []
    y = [0] * n

    def ok(v):
        b = state["bound"]
        return v < b if strict else v <= b

    def rec(i, partial, all_zero_above):
        c = mpq(0)
        qi = q[i]
        for j in range(i + 1, n):
            if y[j]:
                c -= qi[j] * y[j]
        d = diag[i]
        x0 = _round(c)
        lo_only = all_zero_above  # restrict to y_i >= 0
        # walk upward from x0, then downward from x0 - 1
        for direction in (1, -1):
            x = x0 if direction == 1 else x0 - 1
            while True:
                if lo_only and x < 0:
                    break
                t = x - c
                val = partial + d * t * t
                if not ok(val):
                    break
                y[i] = x
                if i == 0:
                    if not (all_zero_above and x == 0):
                        if shrink and val < state["bound"]:
                            state["bound"] = val
                            found[:] = [it for it in found if it[1] <= val]
                        found.append((tuple(y), val))
                else:
                    rec(i - 1, val, all_zero_above and x == 0)
                x += direction
        y[i] = 0

    rec(n - 1, mpq(0), True)
    return found, state["bound"]


def short_vectors(g, bound, strict: bool = False):
    """All v (one per +-pair) with 0 < v^t g v <= bound (< bound if strict).

    Returns a sorted list of (coords, value).
    """
    H, basis = lll_reduce(g)
    q = quadratic_decomposition(H)
    found, _ = _enumerate(q, mpq(bound), strict, shrink=False)
    return _to_original(found, basis)


def _to_original(found, basis):
    n = len(basis)
    out = []
    for y, val in found:
        x = [0] * n
        for j, yj in enumerate(y):
            if yj:
                b = basis[j]
                for i in range(n):
                    x[i] += b[i] * yj
        out.append((canonical_sign(x), val))
    out.sort()
    return out


def minimal_vectors(g) -> MinimalData:
    """Exact minimum and all minimal vectors modulo +-1."""
    H, basis = lll_reduce(g)
    q = quadratic_decomposition(H)
    start = min(H[i][i] for i in range(len(H)))
    found, best = _enumerate(q, start, False, shrink=True)
    found = [(y, v) for y, v in found if v == best]
    vecs = tuple(v for v, _ in _to_original(found, basis))
    return MinimalData(best, vecs)


def certifying_box(g, value) -> int:
    """Smallest box radius b such that every integer vector outside [-b, b]^n
    has g-value strictly greater than ``value``.

    Uses Q(x) >= x_i^2 / (g^{-1})_ii.
    """
    rows = _rows(g)
    inv = inverse(rows)
    worst = max(inv[i][i] for i in range(len(rows)))
    # need (b+1)^2 > value * worst
    target = mpq(value) * worst
    b = 0
    while (b + 1) ** 2 <= target:
        b += 1
    return b


def brute_force_minimal_vectors(g, box: int) -> MinimalData:
    """Exhaustive search over [-box, box]^n.  Test oracle only."""
    rows = _rows(g)
    n = len(rows)
    gram = RationalGram(tuple(tuple(r) for r in rows))
    best = None
    vecs = []
    for x in itertools.product(range(-box, box + 1), repeat=n):
        if not any(x) or canonical_sign(x) != x:
            continue
        val = gram.value(x)
        if val <= 0:
            raise NotPositiveDefiniteError("Gram matrix is not positive definite")
        if best is None or val < best:
            best = val
            vecs = [x]
        elif val == best:
            vecs.append(x)
    return MinimalData(best, tuple(sorted(vecs)))
