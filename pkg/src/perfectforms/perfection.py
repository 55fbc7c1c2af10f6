"""Perfection: is a form determined by its minimum and minimal vectors?

The affine system {c(v) . X = m(f)}, v in M(f), always has f as a solution, so
it has a unique solution exactly when the evaluation vectors c(v) have full
rank in the space of symmetric F-matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formspace import FormOverF, evaluation_vector, sym_basis
from .linalg import dot, rank
from .shortvec import MinimalData, minimal_vectors


class InconsistentMinimalDataError(ValueError):
    pass


@dataclass(frozen=True)
class PerfectionReport:
    rank: int
    required: int
    evaluation_matrix: tuple

    @property
    def is_perfect(self) -> bool:
        return self.rank == self.required

    def summary(self) -> str:
        return f"perfect: {str(self.is_perfect).lower()}, rank {self.rank}/{self.required}"


def perfection_report(f: FormOverF, md: MinimalData | None = None) -> PerfectionReport:
    if md is None:
        md = minimal_vectors(f.gram())
    F, n = f.F, f.n
    x = f.coords()
    rows = []
    for v in md.vectors:
        c = evaluation_vector(v, F, n)
        if dot(c, x) != md.minimum:
            raise InconsistentMinimalDataError(
                f"vector {v} has value {dot(c, x)}, expected minimum {md.minimum}")
        rows.append(c)
    required = sym_basis(F, n).dim
    return PerfectionReport(rank(rows) if rows else 0, required, tuple(rows))


def is_perfect(f: FormOverF) -> bool:
    return perfection_report(f).is_perfect
