"""Initial perfect form for Q(sqrt d).

The scaled trace form phi_alpha(x) = Tr(alpha x^2) is chosen where the geodesic
of totally positive trace forms meets the well-rounded retract of the upper
half-plane.  Its intersection abscissa x0 is the minimum of |X(n)| over the
integers, and alpha follows in closed form.  Tensoring phi_alpha with A_n
gives a perfect n-ary form over F.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from gmpy2 import mpq

from .formspace import FormOverF, RationalGram, scaled_trace_form, tensor_with_An
from .qfield import FieldDescriptor, FieldElement, field
from .shortvec import MinimalData, minimal_vectors

log = logging.getLogger(__name__)

__all__ = [
    "SeedError",
    "SeedData",
    "X_of_n",
    "minimize_abs_X",
    "initial_alpha",
    "seed_trace_form",
    "initial_perfect_form",
]


class SeedError(RuntimeError):
    pass


@dataclass(frozen=True)
class SeedData:
    field: FieldDescriptor
    alpha: FieldElement
    x0: mpq
    n_tilde: int
    eta: FieldElement
    geodesic_tag: str

    def y0_squared(self) -> mpq:
        return 1 - (self.x0 - self.n_tilde) ** 2

    def to_json(self) -> dict:
        from .qfield import q_to_str
        p, q = self.alpha.sqrt_coords()
        return {
            "field": self.field.to_json(),
            "alpha": self.alpha.to_json(),
            "alpha_sqrt_coords": [q_to_str(p), q_to_str(q)],
            "x0": q_to_str(self.x0),
            "n_tilde": self.n_tilde,
            "eta": self.eta.to_json(),
            "y0_squared": q_to_str(self.y0_squared()),
            "geodesic": self.geodesic_tag,
        }


def X_of_n(d: int, n: int) -> mpq:
    if d % 4 == 1:
        return mpq(4 * n * n + d - 5, 4 + 8 * n)
    if n == 0:
        raise ValueError("X(0) is undefined when d is not 1 mod 4")
    return mpq(n * n + d - 1, 2 * n)


def _monotone_beyond(d: int, N: int) -> bool:
    """True when |X(n)| is non-decreasing in |n| for all |n| >= N.

    d = 1 mod 4: X'(n) has the sign of 4n^2 + 4n + 5 - d, and X keeps the sign
    of n + 1/2 for d >= 5.  Otherwise X is odd with X'(n) of the sign of
    n^2 - (d - 1).  Both polynomials only grow in |n| past their roots.
    """
    if d % 4 == 1:
        # smallest values of 4n^2 + 4n over n >= N and n <= -N
        return min(4 * N * N + 4 * N, 4 * N * N - 4 * N) + 5 - d > 0
    return N * N - (d - 1) > 0


def minimize_abs_X(d: int) -> tuple[mpq, list[int]]:
    """x0 = min over integers of |X(n)| together with all minimizing n."""
    N = d + 2
    if not _monotone_beyond(d, N):
        raise SeedError(f"monotonicity certificate failed for d={d}")
    best = None
    arg = []
    for n in range(-N, N + 1):
        if d % 4 != 1 and n == 0:
            continue
        v = abs(X_of_n(d, n))
        if best is None or v < best:
            best, arg = v, [n]
        elif v == best:
            arg.append(n)
    return best, arg


def initial_alpha(F: FieldDescriptor | int) -> SeedData:
    if not isinstance(F, FieldDescriptor):
        F = field(F)
    if F.rational_mode:
        raise ValueError("no seed construction over Q; use A_n directly")
    d = F.d
    x0, argmins = minimize_abs_X(d)
    candidates = [n for n in range(0, d + 3) if (d % 4 == 1 or n) and X_of_n(d, n) == x0]
    if candidates:
        n_tilde = candidates[0]
    else:
        # X only reaches -x0; reflect to the non-negative integer nearest |x0|
        n_tilde = int((2 * x0 + 1) // 2)
        log.warning("d=%d: X(n) = x0 has no non-negative solution, using n~=%d", d, n_tilde)
        if (x0 - n_tilde) ** 2 > 1:
            raise SeedError(f"d={d}: no admissible n~ for x0={x0}")
    if d % 4 == 1:
        alpha = F.from_sqrt_coords(mpq(1, 2), -(2 * x0 + 1) / (2 * d))
        tag = "(x + 1/2)^2 + y^2 = d/4"
    else:
        alpha = F.from_sqrt_coords(mpq(1, 2), -x0 / (2 * d))
        tag = "x^2 + y^2 = d"
    eta = FieldElement(F, n_tilde, 1)
    seed = SeedData(F, alpha, x0, n_tilde, eta, tag)
    if not alpha.is_totally_positive():
        raise SeedError(f"d={d}: alpha={alpha} is not totally positive")
    if seed.y0_squared() < 0:
        raise SeedError(f"d={d}: (x0 - n~)^2 > 1")
    return seed


def seed_trace_form(F: FieldDescriptor | int) -> tuple[RationalGram, MinimalData, SeedData]:
    """Gram of phi_alpha in the basis {1, w}, its minimal data and the seed.

    The minimal vectors are computed, then checked to contain 1 and eta.
    """
    seed = initial_alpha(F)
    gram = scaled_trace_form(seed.alpha).gram()
    md = minimal_vectors(gram)
    one = (1, 0)
    eta = (seed.n_tilde, 1)
    if md.minimum != gram.value(one) or one not in md.vectors or eta not in md.vectors:
        raise SeedError(
            f"d={seed.field.d}: phi_alpha is not minimized at 1 and eta "
            f"(minimum {md.minimum}, vectors {md.vectors})")
    return gram, md, seed


def initial_perfect_form(F: FieldDescriptor | int | None, n: int = 2) -> FormOverF:
    """f_alpha = Tr(alpha A_n(x)); over Q this is A_n itself.

    The result is scaled so that its minimum is 1.  Perfection is not assumed
    here; callers check it with :func:`perfectforms.perfection.perfection_report`.
    """
    if not isinstance(F, FieldDescriptor):
        F = field(F)
    if F.rational_mode:
        return tensor_with_An(F.one, n)
    gram, md, seed = seed_trace_form(F)
    if n == 1:
        return scaled_trace_form(seed.alpha).scaled(1 / md.minimum)
    return tensor_with_An(seed.alpha, n).scaled(1 / md.minimum)
