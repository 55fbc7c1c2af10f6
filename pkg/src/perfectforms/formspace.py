"""Quadratic forms over F and their restriction of scalars to Q.

A form over F is a symmetric n x n matrix A with entries in F, evaluated on
v in O^n as ``Tr(sum_{i,j} a_ij v_i v_j)`` where the sum runs over all ordered
pairs (so off-diagonal entries are counted twice).

Vectors of O^n are handled as integer coordinate tuples of length n*m in the
order ``(v_1[1], v_1[w], v_2[1], v_2[w], ...)``, i.e. component-major.  The
same order indexes the rows of the rational Gram matrix.

Coordinates of a form in the rational space of symmetric F-matrices (the
"sym basis") are ordered ``(a_11[1], a_11[w], a_12[1], a_12[w], a_22[1], ...)``,
pairs (i, j) with i <= j taken lexicographically.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from gmpy2 import mpq

from .qfield import FieldDescriptor, FieldElement, q_to_str, to_q

__all__ = [
    "SymBasis",
    "sym_basis",
    "FormOverF",
    "RationalGram",
    "evaluate",
    "restriction_of_scalars",
    "scaled_trace_form",
    "tensor_with_An",
    "is_positive_definite",
    "evaluation_vector",
    "gram_from_coords",
    "vector_to_field",
    "field_to_vector",
    "leading_minors_positive",
]


@dataclass(frozen=True)
class SymBasis:
    """Ordered basis of the rational space of symmetric n x n F-matrices."""

    F: FieldDescriptor
    n: int
    index: tuple  # (i, j, k): a_ij coefficient of w^k, i <= j

    @property
    def dim(self) -> int:
        return len(self.index)

    def describe(self) -> list[str]:
        names = []
        for i, j, k in self.index:
            mat = f"E{i + 1}{j + 1}" if i == j else f"(E{i + 1}{j + 1}+E{j + 1}{i + 1})"
            names.append(mat if k == 0 else f"w*{mat}")
        return names


@lru_cache(maxsize=None)
def sym_basis(F: FieldDescriptor, n: int) -> SymBasis:
    idx = tuple((i, j, k) for i in range(n) for j in range(i, n) for k in range(F.degree))
    return SymBasis(F, n, idx)


@dataclass(frozen=True)
class RationalGram:
    """Symmetric nm x nm rational matrix of a form restricted to Z^{nm}."""

    entries: tuple
    basis: str = "O^n = Z^{nm} via {1, w}, component-major"

    def __post_init__(self):
        ent = tuple(tuple(mpq(x) if not isinstance(x, str) else to_q(x) for x in r)
                    for r in self.entries)
        object.__setattr__(self, "entries", ent)
        n = len(ent)
        for r in ent:
            if len(r) != n:
                raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if ent[i][j] != ent[j][i]:
                    raise ValueError("Gram matrix must be symmetric")

    @property
    def rank(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __len__(self):
        return len(self.entries)

    def rows(self):
        return [list(r) for r in self.entries]

    def value(self, x) -> mpq:
        g = self.entries
        n = len(g)
        s = mpq(0)
        for i in range(n):
            xi = x[i]
            if not xi:
                continue
            row = g[i]
            t = row[i] * xi
            for j in range(i + 1, n):
                if x[j]:
                    t += 2 * row[j] * x[j]
            s += t * xi
        return s

    def scaled(self, c) -> RationalGram:
        c = mpq(c)
        return RationalGram(tuple(tuple(c * x for x in r) for r in self.entries), self.basis)

    def is_positive_definite(self) -> bool:
        return leading_minors_positive(self.entries)

    def to_json(self) -> list[list[str]]:
        return [[q_to_str(x) for x in r] for r in self.entries]

    @classmethod
    def from_json(cls, data) -> RationalGram:
        return cls(tuple(tuple(to_q(x) for x in r) for r in data))


def leading_minors_positive(mat) -> bool:
    """Exact positive-definiteness via the pivots of symmetric elimination.

    All pivots of Gaussian elimination without pivoting are positive exactly
    when all leading principal minors are positive.
    """
    m = [list(map(mpq, r)) for r in mat]
    n = len(m)
    if n == 0:
        return False
    for c in range(n):
        p = m[c][c]
        if p <= 0:
            return False
        for i in range(c + 1, n):
            f = m[i][c] / p
            if f:
                mi, mc = m[i], m[c]
                for j in range(c + 1, n):
                    mi[j] -= f * mc[j]
    return True


def vector_to_field(F: FieldDescriptor, coords) -> tuple[FieldElement, ...]:
    m = F.degree
    if len(coords) % m:
        raise ValueError("coordinate length not a multiple of the field degree")
    out = []
    for i in range(0, len(coords), m):
        if m == 1:
            out.append(FieldElement(F, coords[i], 0))
        else:
            out.append(FieldElement(F, coords[i], coords[i + 1]))
    return tuple(out)


def field_to_vector(v) -> tuple[int, ...]:
    """Integer coordinates of a vector in O^n; raises if not integral."""
    out = []
    for x in v:
        if not x.is_integral():
            raise ValueError(f"vector entry {x} is not in O")
        out.append(int(x.a))
        if x.F.degree == 2:
            out.append(int(x.b))
    return tuple(out)


class FormOverF:
    """Symmetric n x n matrix over F, read as a quadratic form on O^n."""

    __slots__ = ("F", "n", "entries", "_coords", "_gram")

    def __init__(self, F: FieldDescriptor, entries):
        rows = []
        for r in entries:
            rows.append(tuple(x if isinstance(x, FieldElement) else FieldElement(F, x) for x in r))
        n = len(rows)
        for r in rows:
            if len(r) != n:
                raise ValueError("form matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("form matrix must be symmetric")
        self.F = F
        self.n = n
        self.entries = tuple(rows)
        self._coords = None
        self._gram = None

    # constructors
    @classmethod
    def from_coords(cls, F: FieldDescriptor, n: int, coords) -> FormOverF:
        basis = sym_basis(F, n)
        if len(coords) != basis.dim:
            raise ValueError("coordinate vector has the wrong length")
        a = [[[mpq(0), mpq(0)] for _ in range(n)] for _ in range(n)]
        for (i, j, k), x in zip(basis.index, coords):
            a[i][j][k] = mpq(x)
            a[j][i][k] = mpq(x)
        f = cls(F, [[FieldElement(F, *a[i][j]) for j in range(n)] for i in range(n)])
        f._coords = tuple(mpq(x) for x in coords)
        return f

    @classmethod
    def zero(cls, F: FieldDescriptor, n: int) -> FormOverF:
        return cls(F, [[F.zero] * n for _ in range(n)])

    # views
    def coords(self) -> tuple[mpq, ...]:
        if self._coords is None:
            out = []
            for i, j, k in sym_basis(self.F, self.n).index:
                x = self.entries[i][j]
                out.append(x.a if k == 0 else x.b)
            self._coords = tuple(out)
        return self._coords

    def gram(self) -> RationalGram:
        if self._gram is None:
            self._gram = RationalGram(tuple(tuple(r) for r in gram_from_coords(self.F, self.n, self.coords())))
        return self._gram

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, FormOverF) and self.F == other.F and self.entries == other.entries

    def __hash__(self):
        return hash((self.F, self.coords()))

    def __repr__(self):
        rows = "; ".join(", ".join(str(x) for x in r) for r in self.entries)
        return f"FormOverF([{rows}])"

    # algebra
    def __add__(self, other: FormOverF) -> FormOverF:
        return FormOverF.from_coords(self.F, self.n, [x + y for x, y in zip(self.coords(), other.coords())])

    def scaled(self, c) -> FormOverF:
        """Multiply by a rational or by a field element."""
        if isinstance(c, FieldElement):
            return FormOverF(self.F, [[c * x for x in r] for r in self.entries])
        c = mpq(c)
        return FormOverF.from_coords(self.F, self.n, [c * x for x in self.coords()])

    def conjugate(self) -> FormOverF:
        return FormOverF(self.F, [[x.conjugate() for x in r] for r in self.entries])

    def transform(self, U) -> FormOverF:
        """The form v -> f(U v), i.e. the matrix U^t A U."""
        n = self.n
        A = self.entries
        F = self.F
        AU = [[sum((A[i][k] * U[k][j] for k in range(n)), F.zero) for j in range(n)] for i in range(n)]
        return FormOverF(F, [[sum((U[k][i] * AU[k][j] for k in range(n)), F.zero)
                              for j in range(n)] for i in range(n)])

    def bilinear_field(self, v, w) -> FieldElement:
        """F-valued bilinear value v^t A w."""
        n = self.n
        A = self.entries
        s = self.F.zero
        for i in range(n):
            for j in range(n):
                s = s + A[i][j] * v[i] * w[j]
        return s

    def bilinear(self, v, w) -> mpq:
        """Rational bilinear value Tr(v^t A w) on field vectors."""
        return self.bilinear_field(v, w).trace()

    def value_field(self, v) -> FieldElement:
        return self.bilinear_field(v, v)

    def __call__(self, v) -> mpq:
        return evaluate(self, v)

    def determinant(self) -> FieldElement:
        n = self.n
        if n == 1:
            return self.entries[0][0]
        if n == 2:
            A = self.entries
            return A[0][0] * A[1][1] - A[0][1] * A[1][0]
        m = [list(r) for r in self.entries]
        result = self.F.one
        for c in range(n):
            piv = next((i for i in range(c, n) if not m[i][c].is_zero()), None)
            if piv is None:
                return self.F.zero
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                result = -result
            p = m[c][c]
            result = result * p
            for i in range(c + 1, n):
                f = m[i][c] / p
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
        return result

    def to_json(self) -> dict:
        return {"field": self.F.to_json(), "n": self.n,
                "entries": [[x.to_json() for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, F: FieldDescriptor, data) -> FormOverF:
        return cls(F, [[FieldElement.from_json(F, x) for x in r] for r in data["entries"]])


def gram_from_coords(F: FieldDescriptor, n: int, coords):
    """Rational Gram matrix (list of lists) of the form with the given sym coordinates.

    Entry ((i,k),(j,l)) is Tr(a_ij w^k w^l).
    """
    m = F.degree
    size = n * m
    basis = sym_basis(F, n)
    a = {}
    for (i, j, k), x in zip(basis.index, coords):
        a.setdefault((i, j), [mpq(0), mpq(0)])[k] = mpq(x)
    G = [[mpq(0)] * size for _ in range(size)]
    if m == 1:
        for (i, j), (x, _) in a.items():
            G[i][j] = x
            G[j][i] = x
        return G
    T = F.trace_power
    for (i, j), (x, y) in a.items():
        for k in range(2):
            for l in range(2):
                val = x * T(k + l) + y * T(k + l + 1)
                G[i * 2 + k][j * 2 + l] = val
                G[j * 2 + l][i * 2 + k] = val
    return G


def restriction_of_scalars(f: FormOverF) -> RationalGram:
    return f.gram()


def _as_field_vector(F, v):
    if v and isinstance(v[0], FieldElement):
        return tuple(v)
    return vector_to_field(F, v)


def evaluate(f: FormOverF, v) -> mpq:
    """Tr(sum_{i,j} a_ij v_i v_j) for v in O^n (field elements or integer coordinates)."""
    vf = _as_field_vector(f.F, v)
    if len(vf) != f.n:
        raise ValueError("vector length does not match the form rank")
    for x in vf:
        if not x.is_integral():
            raise ValueError(f"vector entry {x} is not in O")
    return f.value_field(vf).trace()


def scaled_trace_form(alpha: FieldElement) -> FormOverF:
    """The unary form x -> Tr(alpha x^2); its Gram is [Tr(alpha w_i w_j)]."""
    return FormOverF(alpha.F, [[alpha]])


def tensor_with_An(alpha: FieldElement, n: int) -> FormOverF:
    """The n-ary form Tr(alpha * sum_{i<=j} x_i x_j).

    With the symmetric both-orders convention the off-diagonal entries are alpha/2.
    """
    if n < 1:
        raise ValueError("rank must be at least 1")
    half = alpha * mpq(1, 2)
    return FormOverF(alpha.F, [[alpha if i == j else half for j in range(n)] for i in range(n)])


def _field_minors_positive(f: FormOverF) -> bool:
    F = f.F
    n = f.n
    for k in range(1, n + 1):
        sub = FormOverF(F, [r[:k] for r in f.entries[:k]])
        if not sub.determinant().is_totally_positive():
            return False
    return True


def is_positive_definite(f: FormOverF, route: str = "both") -> bool:
    """Positive-definiteness, via embedding minors, the rational Gram, or both.

    With ``route="both"`` the two decisions are computed independently and must
    agree; disagreement raises ``AssertionError``.
    """
    if route == "field":
        return _field_minors_positive(f)
    if route == "gram":
        return f.gram().is_positive_definite()
    a = _field_minors_positive(f)
    b = f.gram().is_positive_definite()
    if a != b:
        raise AssertionError(f"positive-definiteness routes disagree on {f!r}")
    return a


@lru_cache(maxsize=None)
def _eval_layout(F: FieldDescriptor, n: int):
    return sym_basis(F, n).index


def evaluation_vector(v, F: FieldDescriptor, n: int) -> tuple[int, ...]:
    """Coordinates c(v) with evaluate(f, v) = c(v) . coords(f) for every form f.

    ``v`` is an integer coordinate tuple of length n*m (or a tuple of field elements).
    """
    if v and isinstance(v[0], FieldElement):
        v = field_to_vector(v)
    if len(v) != n * F.degree:
        raise ValueError("vector has the wrong length")
    if not any(v):
        raise ValueError("the zero vector has no evaluation functional")
    m = F.degree
    out = []
    if m == 1:
        for i, j, _ in _eval_layout(F, n):
            p = int(v[i]) * int(v[j])
            out.append(p if i == j else 2 * p)
        return tuple(out)
    t = int(F.trace_omega)
    nw = int(F.norm_omega)
    # Tr(w^k z) for z = z0 + z1 w: k=0 -> 2 z0 + t z1 ; k=1 -> t z0 + Tr(w^2) z1
    t2 = int(F.trace_power(2))
    prods = {}
    for i, j, k in _eval_layout(F, n):
        if (i, j) not in prods:
            a, b = int(v[2 * i]), int(v[2 * i + 1])
            c, e = int(v[2 * j]), int(v[2 * j + 1])
            be = b * e
            prods[(i, j)] = (a * c - be * nw, a * e + b * c + be * t)
        z0, z1 = prods[(i, j)]
        tr = 2 * z0 + t * z1 if k == 0 else t * z0 + t2 * z1
        out.append(tr if i == j else 2 * tr)
    return tuple(out)
