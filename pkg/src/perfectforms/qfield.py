"""Exact arithmetic in a real quadratic field Q(sqrt d) and its ring of integers.

Elements are stored in the integral basis {1, w} where w = (1 + sqrt d)/2 when
d = 1 mod 4 and w = sqrt d otherwise, so the ring of integers is exactly the set
of elements with integer coordinates.  A degenerate "rational" field (F = Q,
degree 1) is supported so that the whole pipeline can be run on classical
binary forms.

No floating point is used in any predicate.
"""

from __future__ import annotations

from functools import lru_cache

from gmpy2 import mpq

__all__ = [
    "FieldDescriptor",
    "FieldElement",
    "field",
    "rational_field",
    "is_squarefree",
    "sqrt_sign",
    "to_q",
    "q_to_str",
    "q_from_str",
]


def to_q(x) -> mpq:
    if isinstance(x, str):
        return q_from_str(x)
    return mpq(x)


def q_to_str(x) -> str:
    """Render a rational as "num/den" (always with a denominator)."""
    x = mpq(x)
    return f"{int(x.numerator)}/{int(x.denominator)}"


def q_from_str(s: str) -> mpq:
    s = s.strip()
    if "/" in s:
        num, den = s.split("/")
        den = int(den)
        if den == 0:
            raise ValueError(f"zero denominator in {s!r}")
        return mpq(int(num), den)
    return mpq(int(s))


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    k = 2
    while k * k <= n:
        if n % (k * k) == 0:
            return False
        k += 1
    return True


def sqrt_sign(p, q, d) -> int:
    """Sign of p + q*sqrt(d) for rationals p, q and a positive non-square d."""
    sp = (p > 0) - (p < 0)
    sq = (q > 0) - (q < 0)
    if sq == 0:
        return sp
    if sp == 0 or sp == sq:
        return sq
    # opposite signs: the larger magnitude wins
    lhs = p * p
    rhs = q * q * d
    if lhs > rhs:
        return sp
    if lhs < rhs:
        return sq
    return 0


class FieldDescriptor:
    """The field Q(sqrt d), or Q itself when ``d`` is None.

    Use :func:`field` / :func:`rational_field` to obtain cached instances.
    """

    __slots__ = ("d", "degree", "omega_kind", "D", "trace_omega", "norm_omega",
                 "_trace_powers", "__weakref__")

    def __init__(self, d: int | None):
        if d is None:
            self.d = None
            self.degree = 1
            self.omega_kind = None
            self.D = 1
            self.trace_omega = mpq(0)
            self.norm_omega = mpq(0)
            self._trace_powers = (mpq(1),)
            return
        d = int(d)
        if d < 2 or not is_squarefree(d):
            raise ValueError(f"d must be a square-free integer >= 2, got {d}")
        self.d = d
        self.degree = 2
        if d % 4 == 1:
            # w^2 = w + (d - 1)/4
            self.omega_kind = "half"
            self.D = d
            self.trace_omega = mpq(1)
            self.norm_omega = mpq(-(d - 1) // 4)
        else:
            # w^2 = d
            self.omega_kind = "sqrt"
            self.D = 4 * d
            self.trace_omega = mpq(0)
            self.norm_omega = mpq(-d)
        # Newton recurrence for Tr(w^p): w^2 = t w - N
        t, nm = self.trace_omega, self.norm_omega
        tp = [mpq(2), t]
        for _ in range(6):
            tp.append(t * tp[-1] - nm * tp[-2])
        self._trace_powers = tuple(tp)

    @property
    def rational_mode(self) -> bool:
        return self.d is None

    def trace_power(self, p: int) -> mpq:
        """Tr(w^p) for small p >= 0."""
        return self._trace_powers[p]

    def __repr__(self):
        if self.d is None:
            return "FieldDescriptor(Q)"
        return f"FieldDescriptor(d={self.d})"

    def __eq__(self, other):
        return isinstance(other, FieldDescriptor) and self.d == other.d

    def __hash__(self):
        return hash(("FieldDescriptor", self.d))

    def __reduce__(self):
        return (field, (self.d,))

    # element constructors
    def __call__(self, a=0, b=0) -> FieldElement:
        return FieldElement(self, a, b)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1, 0)

    @property
    def omega(self) -> FieldElement:
        if self.d is None:
            raise ValueError("the rational field has no generator w")
        return FieldElement(self, 0, 1)

    def from_sqrt_coords(self, p, q) -> FieldElement:
        """The element p + q*sqrt(d)."""
        p, q = mpq(p), mpq(q)
        if self.d is None:
            if q:
                raise ValueError("sqrt(d) is not defined over Q")
            return FieldElement(self, p, 0)
        if self.omega_kind == "sqrt":
            return FieldElement(self, p, q)
        # sqrt d = 2w - 1
        return FieldElement(self, p - q, 2 * q)

    def integral_basis(self) -> tuple[FieldElement, ...]:
        if self.d is None:
            return (self.one,)
        return (self.one, self.omega)

    def to_json(self) -> dict:
        if self.d is None:
            return {"d": None, "D": 1, "rational": True}
        return {"d": self.d, "D": self.D}


@lru_cache(maxsize=None)
def field(d: int | None) -> FieldDescriptor:
    return FieldDescriptor(d)


def rational_field() -> FieldDescriptor:
    return field(None)


class FieldElement:
    """Immutable element a + b*w of a :class:`FieldDescriptor`."""

    __slots__ = ("F", "a", "b")

    def __init__(self, F: FieldDescriptor, a=0, b=0):
        a = to_q(a)
        b = to_q(b)
        if F.d is None and b:
            raise ValueError("rational field elements have no w-coordinate")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def __reduce__(self):
        return (FieldElement, (self.F, self.a, self.b))

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.F is not self.F and other.F != self.F:
                raise ValueError("elements of different fields")
            return other
        return FieldElement(self.F, other, 0)

    def __add__(self, other):
        o = self._coerce(other)
        return FieldElement(self.F, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FieldElement(self.F, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FieldElement(self.F, -self.a, -self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        a, b, c, e = self.a, self.b, o.a, o.b
        # (a + bw)(c + ew) = ac + (ae + bc) w + be w^2, w^2 = t w - N
        be = b * e
        F = self.F
        return FieldElement(F, a * c - be * F.norm_omega,
                            a * e + b * c + be * F.trace_omega)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.F.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self) -> FieldElement:
        # conj(w) = t - w
        if self.F.d is None:
            return self
        return FieldElement(self.F, self.a + self.b * self.F.trace_omega, -self.b)

    def trace(self) -> mpq:
        if self.F.d is None:
            return self.a
        return 2 * self.a + self.b * self.F.trace_omega

    def norm(self) -> mpq:
        if self.F.d is None:
            return self.a
        a, b, F = self.a, self.b, self.F
        return a * a + a * b * F.trace_omega + b * b * F.norm_omega

    def inverse(self) -> FieldElement:
        nm = self.norm()
        if nm == 0:
            raise ZeroDivisionError("division by zero in the field")
        if self.F.d is None:
            return FieldElement(self.F, 1 / self.a, 0)
        c = self.conjugate()
        return FieldElement(self.F, c.a / nm, c.b / nm)

    def sqrt_coords(self) -> tuple[mpq, mpq]:
        """(p, q) with self = p + q*sqrt(d)."""
        if self.F.d is None or self.F.omega_kind == "sqrt":
            return self.a, self.b
        half = self.b / 2
        return self.a + half, half

    def embedding_signs(self) -> tuple[int, ...]:
        """Signs of the real embeddings (+sqrt d first, then -sqrt d)."""
        if self.F.d is None:
            return ((self.a > 0) - (self.a < 0),)
        p, q = self.sqrt_coords()
        d = self.F.d
        return (sqrt_sign(p, q, d), sqrt_sign(p, -q, d))

    def is_totally_positive(self) -> bool:
        return all(s > 0 for s in self.embedding_signs())

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_unit(self) -> bool:
        return self.is_integral() and abs(self.norm()) == 1

    def is_zero(self) -> bool:
        return not self.a and not self.b

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.F == other.F and self.a == other.a and self.b == other.b
        if isinstance(other, (int, mpq)) or hasattr(other, "denominator"):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.F.d, self.a, self.b))

    def key(self) -> tuple:
        """Total order used for canonical sorting (not the real ordering)."""
        return (self.a, self.b)

    def approx(self) -> tuple[float, ...]:
        """Float images of the embeddings, for display and cross-checks only."""
        p, q = self.sqrt_coords()
        if self.F.d is None:
            return (float(p),)
        r = self.F.d ** 0.5
        return (float(p) + float(q) * r, float(p) - float(q) * r)

    def to_json(self) -> list[str]:
        return [q_to_str(self.a), q_to_str(self.b)]

    @classmethod
    def from_json(cls, F: FieldDescriptor, data) -> FieldElement:
        if isinstance(data, (list, tuple)):
            a = data[0]
            b = data[1] if len(data) > 1 else "0"
        else:
            a, b = data, "0"
        return cls(F, to_q(a), to_q(b))

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        if self.F.d is None:
            return q_to_str(self.a) if self.a.denominator != 1 else str(int(self.a))
        sym = "w"
        a = self.a
        b = self.b
        fa = str(int(a)) if a.denominator == 1 else q_to_str(a)
        fb = str(int(abs(b))) if b.denominator == 1 else q_to_str(abs(b))
        if not b:
            return fa
        sign = "-" if b < 0 else "+"
        term = sym if abs(b) == 1 else f"{fb}*{sym}"
        if not a:
            return ("-" if b < 0 else "") + term
        return f"{fa} {sign} {term}"
