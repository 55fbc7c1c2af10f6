"""Facets of a rational polyhedral cone given by generators.

The facets of cone(G) are the extreme rays of the polar cone
{x : g . x >= 0 for all g in G}; these are computed with the incremental double
description method in integer arithmetic, using the combinatorial adjacency
test.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations

from gmpy2 import mpq

from .linalg import dot, inverse, nullspace, primitive, rank, row_echelon


class DegenerateConeError(ValueError):
    """The cone is not full-dimensional."""


@dataclass(frozen=True)
class Facet:
    normal: tuple  # primitive integers, normal . g >= 0 on the cone
    incident: tuple  # indices of generators with normal . g == 0


@dataclass
class Cone:
    ambient_dim: int
    generators: list
    _facets: list | None = dc_field(default=None, repr=False)

    def __post_init__(self):
        gens = []
        for g in self.generators:
            g = tuple(g)
            if len(g) != self.ambient_dim:
                raise ValueError("generator dimension mismatch")
            if not any(g):
                raise ValueError("zero generator")
            gens.append(g)
        self.generators = gens

    @property
    def facets(self) -> list[Facet]:
        if self._facets is None:
            self._facets = dual_description(self)
        return self._facets

    def is_full_dimensional(self) -> bool:
        return rank(self.generators) == self.ambient_dim


def _int_vector(g):
    if all(isinstance(x, int) for x in g):
        return tuple(g)
    return primitive(g, fix_sign=False)


def _initial_basis(gens, dim):
    chosen = []
    rows = []
    for i, g in enumerate(gens):
        trial = rows + [list(g)]
        if rank(trial) > len(rows):
            rows = trial
            chosen.append(i)
            if len(chosen) == dim:
                break
    return chosen


def dual_description(cone: Cone) -> list[Facet]:
    """Complete irredundant facet list, sorted by normal."""
    dim = cone.ambient_dim
    gens = [_int_vector(g) for g in cone.generators]
    chosen = _initial_basis(gens, dim)
    if len(chosen) < dim:
        raise DegenerateConeError(
            f"generators span a {len(chosen)}-dimensional space in dimension {dim}")
    inv = inverse([gens[i] for i in chosen])
    rays = []  # (vector, zero-set bitmask over processed generator indices)
    for col in range(dim):
        r = primitive([inv[row][col] for row in range(dim)], fix_sign=False)
        z = 0
        for k, i in enumerate(chosen):
            if k != col:
                z |= 1 << i
        rays.append((r, z))
    chosen_set = set(chosen)
    for i, g in enumerate(gens):
        if i in chosen_set:
            continue
        bit = 1 << i
        plus, zero, minus = [], [], []
        for r, z in rays:
            s = dot(g, r)
            if s > 0:
                plus.append((r, z, s))
            elif s < 0:
                minus.append((r, z, s))
            else:
                zero.append((r, z | bit))
        if not minus:
            rays = [(r, z) for r, z, _ in plus] + zero
            continue
        masks = [z for _, z in rays]
        new = []
        for rp, zp, sp in plus:
            for rn, zn, sn in minus:
                common = zp & zn
                if common.bit_count() < dim - 2:
                    continue
                adjacent = True
                for zr in masks:
                    if zr != zp and zr != zn and zr & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vec = [sp * a - sn * b for a, b in zip(rn, rp)]
                new.append((primitive(vec, fix_sign=False), common | bit))
        rays = [(r, z) for r, z, _ in plus] + zero + new
    facets = []
    for r, _ in rays:
        incident = tuple(i for i, g in enumerate(gens) if dot(g, r) == 0)
        facets.append(Facet(tuple(r), incident))
    facets.sort(key=lambda f: f.normal)
    return facets


def contains(cone: Cone, point) -> bool:
    if len(point) != cone.ambient_dim:
        raise ValueError("point dimension mismatch")
    return all(dot(f.normal, point) >= 0 for f in cone.facets)


def brute_force_facets(cone: Cone) -> list[tuple]:
    """Facet normals from all (dim-1)-subsets of generators.  Test oracle."""
    dim = cone.ambient_dim
    gens = [tuple(mpq(x) for x in g) for g in cone.generators]
    normals = set()
    for subset in combinations(range(len(gens)), dim - 1):
        rows = [gens[i] for i in subset]
        ns = nullspace(rows, dim)
        if len(ns) != 1:
            continue
        n = ns[0]
        vals = [dot(n, g) for g in gens]
        if all(v >= 0 for v in vals):
            normals.add(_oriented(n, 1))
        elif all(v <= 0 for v in vals):
            normals.add(_oriented(n, -1))
    return sorted(normals)


def _oriented(n, sign):
    p = primitive(n, fix_sign=False)
    return p if sign > 0 else tuple(-x for x in p)


def irredundancy_witness(cone: Cone, index: int):
    """A point violating facet ``index`` and satisfying every other facet."""
    facets = cone.facets
    target = facets[index]
    gens = cone.generators
    p = [mpq(0)] * cone.ambient_dim
    for i in target.incident:
        p = [a + b for a, b in zip(p, gens[i])]
    n = target.normal
    eps = mpq(1)
    for j, other in enumerate(facets):
        if j == index:
            continue
        a = dot(other.normal, p)
        b = dot(other.normal, n)
        if b > 0:
            eps = min(eps, a / (2 * b))
    return [x - eps * y for x, y in zip(p, n)]


def facet_rank(cone: Cone, facet: Facet) -> int:
    rows = [cone.generators[i] for i in facet.incident]
    return len(row_echelon(rows)[1]) if rows else 0
