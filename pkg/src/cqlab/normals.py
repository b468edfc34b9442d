"""Tangent, regular normal, limiting and directional normal cones of
disjunctive sets, computed exactly."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .errors import NotInSet
from .kernel.cones import Cone, HCone, VCone, cone_from_generators, full_cone
from .kernel.linalg import Vec, primitive, vec
from .kernel.lp import strict_lp_feasible
from .sets import DisjunctiveSet, HPoly


@dataclass(frozen=True)
class PolyConeUnion:
    """Finite union of convex polyhedral cones. No pieces means the empty set."""
    dim: int
    pieces: tuple = ()

    @staticmethod
    def of(dim: int, cones) -> "PolyConeUnion":
        return PolyConeUnion(dim, _irredundant(list(cones)))

    @property
    def is_empty(self) -> bool:
        return not self.pieces

    @property
    def is_trivial(self) -> bool:
        """True iff the union is exactly {0}."""
        return bool(self.pieces) and all(c.is_trivial() for c in self.pieces)

    def contains(self, v: Sequence) -> bool:
        return any(c.contains(v) for c in self.pieces)

    def subset_of(self, other: "PolyConeUnion") -> bool:
        """Piecewise containment test (sufficient; exact when every piece of
        self sits inside a single piece of other)."""
        return all(any(c.subset_of(o) for o in other.pieces) for c in self.pieces)

    def same_as(self, other: "PolyConeUnion") -> bool:
        return self.subset_of(other) and other.subset_of(self)

    def nonzero_generators(self) -> list[Vec]:
        out = []
        for c in self.pieces:
            out.extend(c.v.generators())
        return out


def _irredundant(cones: list[Cone]) -> tuple:
    uniq = {}
    for c in cones:
        uniq.setdefault(c.key(), c)
    items = sorted(uniq.values(), key=lambda c: (-c.dimension(), c.key()))
    keep: list[Cone] = []
    for c in items:
        if any(c.subset_of(k) for k in keep):
            continue
        keep.append(c)
    return tuple(sorted(keep, key=lambda c: c.key()))


def cone_union(*unions: PolyConeUnion) -> PolyConeUnion:
    dim = unions[0].dim
    return PolyConeUnion.of(dim, [c for u in unions for c in u.pieces])


def cone_product_pair(a: Cone, b: Cone) -> Cone:
    d1, d2 = a.dim, b.dim
    pa = lambda v: tuple(v) + (Fraction(0),) * d2
    pb = lambda v: (Fraction(0),) * d1 + tuple(v)
    h = HCone(d1 + d2, tuple(pa(r) for r in a.h.eqs) + tuple(pb(r) for r in b.h.eqs),
              tuple(pa(r) for r in a.h.ineqs) + tuple(pb(r) for r in b.h.ineqs))
    v = VCone(d1 + d2, tuple(sorted([pa(r) for r in a.v.rays] + [pb(r) for r in b.v.rays])),
              tuple(pa(l) for l in a.v.lineality) + tuple(pb(l) for l in b.v.lineality))
    return Cone(h, v)


def cone_product(u1: PolyConeUnion, u2: PolyConeUnion) -> PolyConeUnion:
    pieces = [cone_product_pair(a, b) for a in u1.pieces for b in u2.pieces]
    return PolyConeUnion.of(u1.dim + u2.dim, pieces)


def _check_member(gamma: DisjunctiveSet, y: Sequence) -> list[int]:
    if getattr(gamma, "is_analytic", False):
        from .errors import AnalyticGamma
        raise AnalyticGamma("exact cones need a disjunctive set")
    act = gamma.active_pieces(y)
    if not act:
        raise NotInSet(f"point {tuple(str(x) for x in y)} is not in the set")
    return act


def _piece_tangent(p: HPoly, y: Sequence) -> Cone:
    act = p.active_ineqs(y)
    return Cone.from_h(HCone(p.dim, tuple(a for a, _ in p.eqs), tuple(p.ineqs[j][0] for j in act)))


def tangent_cone(gamma: DisjunctiveSet, y: Sequence, use_factors: bool = True) -> PolyConeUnion:
    y = vec(y)
    _check_member(gamma, y)
    if use_factors and gamma.factors is not None:
        parts = [tangent_cone(f, yi) for f, yi in zip(gamma.factors, gamma.split(y))]
        return _product_all(parts)
    return PolyConeUnion.of(gamma.dim, [_piece_tangent(gamma.pieces[i], y) for i in gamma.active_pieces(y)])


def _product_all(parts: list[PolyConeUnion]) -> PolyConeUnion:
    out = parts[0]
    for p in parts[1:]:
        out = cone_product(out, p)
    return out


def regular_normal_cone(gamma: DisjunctiveSet, y: Sequence) -> Cone:
    """Polar of the tangent union: the intersection of the piece polars."""
    t = tangent_cone(gamma, y)
    rays, lin = [], []
    for c in t.pieces:
        rays.extend(c.v.rays)
        lin.extend(c.v.lineality)
    return Cone.from_h(HCone(gamma.dim, tuple(lin), tuple(rays)))


# --- face patterns -------------------------------------------------------------

@dataclass(frozen=True)
class FacePattern:
    active_pieces: tuple  # indices S
    active_sets: tuple  # per piece in S: tuple of inequality-row indices J_i

    def key(self) -> tuple:
        return (self.active_pieces, self.active_sets)


def _hyperplanes(rows: list[Vec]) -> tuple[list[Vec], list[tuple[int, int]]]:
    """Deduplicate rows up to nonzero scaling; returns (planes, per-row (plane, sign))."""
    planes: list[Vec] = []
    index: dict = {}
    refs = []
    for a in rows:
        p = primitive(a)
        lead = next(x for x in p if x != 0)
        sgn = 1 if lead > 0 else -1
        if sgn < 0:
            p = tuple(-x for x in p)
        if p not in index:
            index[p] = len(planes)
            planes.append(p)
        scale = next(x for x in a if x != 0) / next(x for x in p if x != 0)
        refs.append((index[p], 1 if scale > 0 else -1))
    return planes, refs


def sign_cells(planes: Sequence[Vec], dim: int) -> list[tuple[tuple[int, ...], Vec]]:
    """All realizable sign vectors of a central arrangement, with witnesses.

    Depth-first over the planes, pruning infeasible prefixes by exact LPs.
    """
    out = []

    def rec(k, eqs, stricts, signs):
        if k == len(planes):
            w = strict_lp_feasible(eqs, [], stricts, dim)
            out.append((tuple(signs), w))
            return
        a = planes[k]
        for s in (-1, 0, 1):
            e2, s2 = eqs, stricts
            if s == 0:
                e2 = eqs + [a]
            elif s < 0:
                s2 = stricts + [a]
            else:
                s2 = stricts + [tuple(-x for x in a)]
            if strict_lp_feasible(e2, [], s2, dim) is not None:
                rec(k + 1, e2, s2, signs + [s])

    rec(0, [], [], [])
    return out


def _active_structure(gamma: DisjunctiveSet, y: Vec):
    act = gamma.active_pieces(y)
    rows: list[Vec] = []
    owners = []  # (piece, kind, j)
    for i in act:
        p = gamma.pieces[i]
        for j, (a, _) in enumerate(p.eqs):
            rows.append(a)
            owners.append((i, "eq", j))
        for j in p.active_ineqs(y):
            rows.append(p.ineqs[j][0])
            owners.append((i, "ineq", j))
    return act, rows, owners


def _pattern_of(act, owners, refs, signs) -> FacePattern | None:
    status = {i: True for i in act}
    tight = {i: [] for i in act}
    for (i, kind, j), (pl, sg) in zip(owners, refs):
        val = signs[pl] * sg
        if kind == "eq":
            if val != 0:
                status[i] = False
        else:
            if val > 0:
                status[i] = False
            elif val == 0:
                tight[i].append(j)
    s = tuple(i for i in act if status[i])
    if not s:
        return None
    return FacePattern(s, tuple(tuple(sorted(tight[i])) for i in s))


def enumerate_face_patterns(gamma: DisjunctiveSet, y: Sequence) -> list[tuple[FacePattern, Vec]]:
    """Realizable (S, J) patterns at points arbitrarily near y, with a
    witness direction v: y + t v realizes the pattern for all small t > 0."""
    y = vec(y)
    _check_member(gamma, y)
    act, rows, owners = _active_structure(gamma, y)
    planes, refs = _hyperplanes(rows)
    seen = {}
    for signs, w in sign_cells(planes, gamma.dim):
        pat = _pattern_of(act, owners, refs, signs)
        if pat is not None and pat.key() not in seen:
            seen[pat.key()] = (pat, w)
    return [seen[k] for k in sorted(seen)]


def pattern_normal_cone(gamma: DisjunctiveSet, pat: FacePattern) -> Cone:
    """Regular normal cone at a point realizing the pattern."""
    cone = None
    for i, js in zip(pat.active_pieces, pat.active_sets):
        p = gamma.pieces[i]
        c = cone_from_generators(gamma.dim, [p.ineqs[j][0] for j in js], [a for a, _ in p.eqs])
        cone = c if cone is None else cone.intersect(c)
    return cone


def limiting_normal_cone(gamma: DisjunctiveSet, y: Sequence, use_factors: bool = True) -> PolyConeUnion:
    y = vec(y)
    _check_member(gamma, y)
    if use_factors and gamma.factors is not None:
        parts = [limiting_normal_cone(f, yi) for f, yi in zip(gamma.factors, gamma.split(y))]
        return _product_all(parts)
    return _cached_limiting(gamma, y)


@lru_cache(maxsize=512)
def _cached_limiting(gamma: DisjunctiveSet, y: Vec) -> PolyConeUnion:
    cones = [pattern_normal_cone(gamma, pat) for pat, _ in enumerate_face_patterns(gamma, y)]
    return PolyConeUnion.of(gamma.dim, cones)


def tangent_as_set(t: PolyConeUnion) -> DisjunctiveSet:
    pieces = tuple(HPoly(t.dim, tuple((a, 0) for a in c.h.eqs), tuple((a, 0) for a in c.h.ineqs))
                   for c in t.pieces)
    return DisjunctiveSet(pieces, "tangent")


def directional_limiting_normal_cone(gamma: DisjunctiveSet, y: Sequence, d: Sequence,
                                     use_factors: bool = True) -> PolyConeUnion:
    """N(y; d) computed as the limiting normal cone of T(y) at d.

    Empty when d is not a tangent direction.
    """
    y, d = vec(y), vec(d)
    _check_member(gamma, y)
    if use_factors and gamma.factors is not None:
        parts = [directional_limiting_normal_cone(f, yi, di)
                 for f, yi, di in zip(gamma.factors, gamma.split(y), gamma.split(d))]
        if any(p.is_empty for p in parts):
            return PolyConeUnion(gamma.dim)
        return _product_all(parts)
    t = tangent_cone(gamma, y, use_factors=False)
    if not t.contains(d):
        return PolyConeUnion(gamma.dim)
    return _cached_limiting(tangent_as_set(t), d)


def full_union(dim: int) -> PolyConeUnion:
    return PolyConeUnion(dim, (full_cone(dim),))
