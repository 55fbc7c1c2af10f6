"""Voronoi's algorithm for binary perfect forms over F.

Starting from the seed perfect form, every facet of a perfect form's Voronoi
cone leads to exactly one neighboring perfect form.  Walking the neighbor
graph and identifying forms up to GL_n(O) gives the finitely many classes.

Forms are always normalized to minimum 1.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .formspace import FormOverF, evaluation_vector, gram_from_coords, leading_minors_positive, sym_basis
from .linalg import dot
from .perfection import perfection_report
from .polyhedra import Cone, Facet, dual_description
from .qfield import FieldDescriptor, FieldElement, field, q_to_str, to_q
from .seed import initial_perfect_form
from .shortvec import MinimalData, minimal_vectors, short_vectors

log = logging.getLogger(__name__)

DEFAULT_CLASS_CAP = 10000

__all__ = [
    "NotPerfectError",
    "WalkError",
    "TruncationError",
    "PerfectClass",
    "EnumerationResult",
    "make_class",
    "neighbor",
    "find_equivalence",
    "are_equivalent",
    "enumerate_classes",
    "galois_partners",
]


class NotPerfectError(ValueError):
    pass


class WalkError(RuntimeError):
    pass


class TruncationError(RuntimeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PerfectClass:
    """A perfect form normalized to minimum 1, with its minimal vectors and cone."""

    def __init__(self, form: FormOverF, minimal: MinimalData, index: int = -1,
                 fingerprint: str | None = None, facets=None):
        self.form = form
        self.minimal = minimal
        self.discovery_index = index
        self._fingerprint = fingerprint
        self._cone = None
        self._facets = facets
        self._fvecs = None
        self._values = None

    @property
    def F(self) -> FieldDescriptor:
        return self.form.F

    @property
    def cone(self) -> Cone:
        if self._cone is None:
            F, n = self.F, self.form.n
            gens = [evaluation_vector(v, F, n) for v in self.minimal.vectors]
            self._cone = Cone(sym_basis(F, n).dim, gens, self._facets)
        return self._cone

    @property
    def facets(self) -> list[Facet]:
        return self.cone.facets

    @property
    def field_vectors(self):
        if self._fvecs is None:
            self._fvecs = self.minimal.field_vectors(self.F)
        return self._fvecs

    @property
    def self_values(self):
        """F-valued v^t A v for each minimal vector (invariant under GL_n(O))."""
        if self._values is None:
            self._values = [self.form.value_field(v) for v in self.field_vectors]
        return self._values

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            self._fingerprint = compute_fingerprint(self.form, self.field_vectors, self.self_values)
        return self._fingerprint

    def to_json(self) -> dict:
        return {
            "index": self.discovery_index,
            "form": self.form.to_json(),
            "min_vectors": [[x.to_json() for x in v] for v in self.field_vectors],
            "num_min_vectors": len(self.minimal.vectors),
            "fingerprint": self.fingerprint,
        }


def _sign_canonical(x: FieldElement) -> tuple:
    return max(x.key(), (-x).key())


def compute_fingerprint(form: FormOverF, fvecs, self_values) -> str:
    """Invariant of the GL_n(O)-class; equal classes give equal fingerprints.

    Combines |M|, the multiset of |Tr v^t A w| over pairs of minimal vectors,
    and the F-valued self values and pair values (the latter up to sign).
    """
    k = len(fvecs)
    traces = []
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            b = form.bilinear_field(fvecs[i], fvecs[j])
            traces.append(abs(b.trace()))
            pairs.append(_sign_canonical(b))
    traces.sort()
    pairs.sort()
    selfs = sorted(x.key() for x in self_values)
    text = ";".join([
        str(k),
        ",".join(q_to_str(t) for t in traces),
        ",".join(f"{q_to_str(a)}:{q_to_str(b)}" for a, b in selfs),
        ",".join(f"{q_to_str(a)}:{q_to_str(b)}" for a, b in pairs),
    ])
    digest = hashlib.sha256(text.encode()).hexdigest()[:20]
    return f"{k}-{digest}"


def make_class(form: FormOverF, index: int = -1, minimal: MinimalData | None = None,
               check: bool = True) -> PerfectClass:
    """Normalize ``form`` to minimum 1 and wrap it; raises if it is not perfect."""
    if minimal is None:
        minimal = minimal_vectors(form.gram())
    if minimal.minimum != 1:
        form = form.scaled(1 / minimal.minimum)
        minimal = MinimalData(mpq(1), minimal.vectors)
    if check:
        report = perfection_report(form, minimal)
        if not report.is_perfect:
            raise NotPerfectError(f"form is not perfect ({report.summary()})")
    return PerfectClass(form, minimal, index)


def _walk_gram(F, n, x, R, t):
    return gram_from_coords(F, n, [a + t * b for a, b in zip(x, R)])


def neighbor(pc: PerfectClass, facet: Facet) -> FormOverF:
    """The perfect form across ``facet``: f + rho R for the facet normal R.

    R vanishes on the facet's minimal vectors and is positive on the others,
    so along f + tR the minimum stays 1 until some vector with R(v) < 0 comes
    down to value 1.  rho is located exactly: bracket by doubling/bisection
    until the form is positive definite with a vector below 1, then jump to
    the smallest crossing time among the offending vectors until none remain.
    """
    F, n = pc.F, pc.form.n
    x = pc.form.coords()
    R = [mpq(r) for r in facet.normal]

    def R_of(v):
        return dot(evaluation_vector(v, F, n), R)

    def f_of(v):
        return dot(evaluation_vector(v, F, n), x)

    lo, hi = mpq(0), None
    u = mpq(1)
    below = None
    for _ in range(400):
        G = _walk_gram(F, n, x, R, u)
        if not leading_minors_positive(G):
            hi = u
            u = (lo + hi) / 2
            continue
        S = short_vectors(G, 1)
        below = [v for v, val in S if val < 1]
        if below:
            break
        if any(R_of(v) < 0 for v, _ in S):
            return FormOverF.from_coords(F, n, [a + u * b for a, b in zip(x, R)])
        lo = u
        u = 2 * u if hi is None else (lo + hi) / 2
    else:
        raise WalkError("no new minimal vector found along the facet direction")
    for _ in range(1000):
        t = None
        for v in below:
            rv = R_of(v)
            if rv >= 0:
                raise WalkError(f"vector {v} dropped below the minimum with R(v) >= 0")
            tv = (f_of(v) - 1) / (-rv)
            if t is None or tv < t:
                t = tv
        G = _walk_gram(F, n, x, R, t)
        if not leading_minors_positive(G):
            raise WalkError("lost positive-definiteness before the neighbor was reached")
        below = [v for v, _ in short_vectors(G, 1, strict=True)]
        if not below:
            return FormOverF.from_coords(F, n, [a + t * b for a, b in zip(x, R)])
    raise WalkError("neighbor refinement did not converge")


def _mat2_inverse(F, cols):
    (a, c), (b, d) = cols  # columns (a, c) and (b, d) -> matrix [[a, b], [c, d]]
    det = a * d - b * c
    if det.is_zero():
        return None
    inv = det.inverse()
    return [[d * inv, -b * inv], [-c * inv, a * inv]]


def find_equivalence(f: PerfectClass, g: PerfectClass):
    """U in GL_2(O) with f(U x) = g(x) (so U^t A_f U = A_g), or None.

    Any such U maps M(g) onto M(f) up to sign, so it is determined by the
    images of two F-independent minimal vectors of g.
    """
    if f.form.n != 2 or g.form.n != 2:
        raise NotImplementedError("equivalence testing is implemented for binary forms")
    if len(f.minimal.vectors) != len(g.minimal.vectors) or f.fingerprint != g.fingerprint:
        return None
    F = f.F
    gv, gval = g.field_vectors, g.self_values
    fv, fval = f.field_vectors, f.self_values
    # choose the independent pair of g with the fewest candidate images
    counts = [sum(1 for y in fval if y == x) for x in gval]
    order = sorted(range(len(gv)), key=lambda i: (counts[i], i))
    pair = None
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            i, j = order[a], order[b]
            Vinv = _mat2_inverse(F, (gv[i], gv[j]))
            if Vinv is not None:
                pair = (i, j, Vinv)
                break
        if pair:
            break
    if pair is None:
        return None
    i, j, Vinv = pair
    bg = g.form.bilinear_field(gv[i], gv[j])
    cand1 = [k for k, y in enumerate(fval) if y == gval[i]]
    cand2 = [k for k, y in enumerate(fval) if y == gval[j]]
    for k1 in cand1:
        w1 = fv[k1]
        for k2 in cand2:
            if k2 == k1:
                continue
            w2 = fv[k2]
            bf = f.form.bilinear_field(w1, w2)
            for s in (1, -1):
                if (bf if s == 1 else -bf) != bg:
                    continue
                w2s = w2 if s == 1 else tuple(-y for y in w2)
                # U = W V^{-1}, W has columns w1, w2s
                U = [[w1[r] * Vinv[0][c] + w2s[r] * Vinv[1][c] for c in range(2)] for r in range(2)]
                if not all(u.is_integral() for row in U for u in row):
                    continue
                detU = U[0][0] * U[1][1] - U[0][1] * U[1][0]
                if not detU.is_unit():
                    continue
                if f.form.transform(U) == g.form:
                    return U
    return None


def are_equivalent(f: PerfectClass, g: PerfectClass) -> bool:
    return find_equivalence(f, g) is not None


@dataclass
class EnumerationResult:
    field: FieldDescriptor
    n: int
    classes: list
    edges: list = dc_field(default_factory=list)  # (from_class, facet_index, to_class)
    galois: list | None = None

    @property
    def N_D(self) -> int:
        return len(self.classes)

    def summary(self) -> str:
        if self.field.rational_mode:
            return f"N={self.N_D} classes"
        return f"D={self.field.D} N_D={self.N_D} classes"

    def to_json(self) -> dict:
        classes = []
        for pc in self.classes:
            rec = pc.to_json()
            if self.galois is not None:
                rec["galois_partner"] = self.galois[pc.discovery_index]
            classes.append(rec)
        return {
            "field": self.field.to_json(),
            "n": self.n,
            "normalization": "min=1",
            "N_D": self.N_D,
            "classes": classes,
            "adjacency": [list(e) for e in self.edges],
        }


# -- worker side --------------------------------------------------------------

def _explore(task):
    """Facets of one class and the raw neighbor across each (pure; pool-safe)."""
    d, n, coords, vectors = task
    F = field(d)
    form = FormOverF.from_coords(F, n, coords)
    pc = PerfectClass(form, MinimalData(mpq(1), vectors))
    out = []
    facets = pc.facets
    for facet in facets:
        g = neighbor(pc, facet)
        md = minimal_vectors(g.gram())
        nb = make_class(g, minimal=md)
        out.append((nb.form.coords(), nb.minimal.vectors, nb.fingerprint))
    return [(f.normal, f.incident) for f in facets], out


# -- enumeration --------------------------------------------------------------

class _Registry:
    def __init__(self):
        self.classes = []
        self.buckets = {}

    def add(self, pc: PerfectClass):
        pc.discovery_index = len(self.classes)
        self.classes.append(pc)
        self.buckets.setdefault(pc.fingerprint, []).append(pc.discovery_index)

    def find(self, pc: PerfectClass):
        for idx in self.buckets.get(pc.fingerprint, ()):
            if find_equivalence(self.classes[idx], pc) is not None:
                return idx
        return None


def enumerate_classes(F: FieldDescriptor | int | None, n: int = 2, *, max_classes: int = DEFAULT_CLASS_CAP,
                      workers: int = 1, checkpoint: str | None = None, batch: int = 64,
                      progress=None) -> EnumerationResult:
    """All GL_n(O)-classes of perfect forms, by breadth-first neighbor search.

    The result is deterministic: classes are explored in discovery order,
    facets in sorted order, and candidates are merged sequentially in that
    order no matter how many worker processes computed them.
    """
    if not isinstance(F, FieldDescriptor):
        F = field(F)
    if n != 2:
        raise NotImplementedError("enumeration is implemented for binary forms")
    reg = _Registry()
    edges = []
    explored = 0
    state = _load_checkpoint(checkpoint, F, n) if checkpoint else None
    if state:
        for coords in state["classes"]:
            form = FormOverF.from_coords(F, n, coords)
            reg.add(make_class(form, check=False))
        edges = [tuple(e) for e in state["edges"]]
        explored = state["explored"]
        log.info("resumed %s with %d classes, %d explored", F, len(reg.classes), explored)
    else:
        reg.add(make_class(initial_perfect_form(F, n)))

    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while explored < len(reg.classes):
            step = batch if pool else 1
            chunk = reg.classes[explored:explored + step]
            tasks = [(F.d, n, pc.form.coords(), pc.minimal.vectors) for pc in chunk]
            results = pool.map(_explore, tasks) if pool else map(_explore, tasks)
            for pc, (facets, nbrs) in zip(chunk, results):
                pc._facets = [Facet(tuple(nm), tuple(inc)) for nm, inc in facets]
                pc._cone = None
                for fi, (coords, vectors, fp) in enumerate(nbrs):
                    form = FormOverF.from_coords(F, n, coords)
                    cand = PerfectClass(form, MinimalData(mpq(1), vectors), fingerprint=fp)
                    idx = reg.find(cand)
                    if idx is None:
                        if len(reg.classes) >= max_classes:
                            partial = EnumerationResult(F, n, reg.classes, edges)
                            raise TruncationError(
                                f"class cap {max_classes} reached for {F}; result is incomplete", partial)
                        reg.add(cand)
                        idx = cand.discovery_index
                    edges.append((pc.discovery_index, fi, idx))
                explored += 1
            if progress:
                progress(explored, len(reg.classes))
            if checkpoint:
                _save_checkpoint(checkpoint, F, n, reg.classes, edges, explored)
    finally:
        if pool:
            pool.shutdown()
    return EnumerationResult(F, n, reg.classes, edges)


def galois_partners(result: EnumerationResult) -> list:
    """For each class, the index of the class containing its Galois conjugate."""
    F = result.field
    if F.rational_mode:
        return list(range(result.N_D))
    reg = _Registry()
    for pc in result.classes:
        reg.classes.append(pc)
        reg.buckets.setdefault(pc.fingerprint, []).append(pc.discovery_index)
    out = []
    for pc in result.classes:
        conj = pc.form.conjugate()
        out.append(reg.find(make_class(conj, check=False)))
    result.galois = out
    return out


# -- checkpoints ---------------------------------------------------------------

def _save_checkpoint(path, F, n, classes, edges, explored):
    data = {
        "field": F.to_json(),
        "n": n,
        "explored": explored,
        "classes": [[q_to_str(x) for x in pc.form.coords()] for pc in classes],
        "edges": [list(e) for e in edges],
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(data, fh)
    os.replace(tmp, path)


def _load_checkpoint(path, F, n):
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        data = json.load(fh)
    if data["field"].get("d") != F.d or data["n"] != n:
        raise ValueError(f"checkpoint {path} belongs to a different run")
    data["classes"] = [[to_q(x) for x in c] for c in data["classes"]]
    # edges only for fully explored classes
    data["edges"] = [e for e in data["edges"] if e[0] < data["explored"]]
    return data
