"""Polyhedral cones in H- and V-form, converted by double description."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import DimensionCap
from .linalg import (Vec, dot, is_zero, neg, nullspace, primitive, project_out,
                     rank, row_basis, vec)

DIM_CAP = 12


def _canon_rows(rows: Iterable[Sequence]) -> tuple[Vec, ...]:
    out = []
    seen = set()
    for r in rows:
        r = primitive(vec(r))
        if is_zero(r) or r in seen:
            continue
        seen.add(r)
        out.append(r)
    return tuple(out)


@dataclass(frozen=True)
class HCone:
    """{v : eq.v = 0 for eq in eqs, a.v <= 0 for a in ineqs}."""
    dim: int
    eqs: tuple = ()
    ineqs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "eqs", _canon_rows(self.eqs))
        object.__setattr__(self, "ineqs", _canon_rows(self.ineqs))

    def contains(self, v: Sequence) -> bool:
        return all(dot(a, v) == 0 for a in self.eqs) and all(dot(a, v) <= 0 for a in self.ineqs)


@dataclass(frozen=True)
class VCone:
    """cone(rays) + span(lineality)."""
    dim: int
    rays: tuple = ()
    lineality: tuple = ()

    def is_trivial(self) -> bool:
        return not self.rays and not self.lineality

    def generators(self) -> list[Vec]:
        """Rays plus both signs of every lineality vector."""
        out = list(self.rays)
        for l in self.lineality:
            out.append(l)
            out.append(neg(l))
        return out


def _check_cap(dim: int, cap: int | None) -> None:
    cap = DIM_CAP if cap is None else cap
    if dim > cap:
        raise DimensionCap(f"ambient dimension {dim} exceeds the cap {cap}")


def _canon_ray(r: Sequence, lin: Sequence[Sequence]) -> Vec:
    return primitive(project_out(r, lin))


def dd_convert(c: HCone, cap: int | None = None) -> VCone:
    """H-form to V-form by incremental double description.

    Lineality is tracked separately; rays are kept extreme through the
    algebraic rank test against the constraints processed so far.
    """
    s = c.dim
    _check_cap(s, cap)
    lin: list[Vec] = [tuple(Fraction(int(i == k)) for k in range(s)) for i in range(s)]
    rays: list[Vec] = []
    done_eqs: list[Vec] = []
    done_ineqs: list[Vec] = []
    steps = [(a, True) for a in c.eqs] + [(a, False) for a in c.ineqs]
    for a, is_eq in steps:
        vals = [dot(a, l) for l in lin]
        piv = next((i for i, v in enumerate(vals) if v != 0), None)
        if piv is not None:
            l0 = lin[piv]
            a0 = vals[piv]
            if a0 > 0:
                l0 = neg(l0)
                a0 = -a0
            new_lin = []
            for i, l in enumerate(lin):
                if i == piv:
                    continue
                f = dot(a, l) / a0
                new_lin.append(tuple(x - f * y for x, y in zip(l, l0)))
            new_rays = []
            for r in rays:
                f = dot(a, r) / a0
                new_rays.append(tuple(x - f * y for x, y in zip(r, l0)))
            if not is_eq:
                new_rays.append(l0)
            lin = new_lin
            rays = new_rays
        else:
            plus, zero, minus = [], [], []
            for r in rays:
                v = dot(a, r)
                (plus if v > 0 else zero if v == 0 else minus).append((r, v))
            cand = [r for r, _ in zero]
            if not is_eq:
                cand += [r for r, _ in minus]
            if plus and minus:
                target = s - len(lin) - 2
                for rp, vp in plus:
                    zp = {k for k, b in enumerate(done_ineqs) if dot(b, rp) == 0}
                    for rm, vm in minus:
                        common = [done_ineqs[k] for k in zp if dot(done_ineqs[k], rm) == 0]
                        if rank(done_eqs + common, s) != target:
                            continue
                        cand.append(tuple(vp * y - vm * x for x, y in zip(rp, rm)))
            rays = cand
        if is_eq:
            done_eqs.append(a)
        else:
            done_ineqs.append(a)
        rays = _prune(rays, lin, done_eqs, done_ineqs, s)
    lin_basis = _independent(lin, s)
    rays = sorted(set(_canon_ray(r, lin_basis) for r in rays))
    rays = [r for r in rays if not is_zero(r)]
    lin_canon = tuple(primitive(r) for r in row_basis(lin_basis, s))
    return VCone(s, tuple(rays), lin_canon)


def _independent(vs: Sequence[Vec], s: int) -> list[Vec]:
    out: list[Vec] = []
    for v in vs:
        if rank(out + [v], s) > len(out):
            out.append(v)
    return out


def _prune(rays, lin, eqs, ineqs, s):
    """Keep only extreme rays (modulo lineality), deduplicated."""
    lin = _independent(lin, s)
    target = s - len(lin) - 1
    out = []
    seen = set()
    for r in rays:
        r = _canon_ray(r, lin)
        if is_zero(r) or r in seen:
            continue
        tight = [b for b in ineqs if dot(b, r) == 0]
        if rank(list(eqs) + tight, s) != target:
            continue
        seen.add(r)
        out.append(r)
    return out


def vrep_to_hrep(v: VCone, cap: int | None = None) -> HCone:
    """V-form to H-form via the polar: rows are the generators of the polar."""
    _check_cap(v.dim, cap)
    p = dd_convert(HCone(v.dim, v.lineality, v.rays), cap)
    return HCone(v.dim, p.lineality, p.rays)


def polar(c: HCone | VCone, cap: int | None = None) -> VCone:
    """{z : <z, d> <= 0 for all d in c} in V-form."""
    if isinstance(c, HCone):
        # cone(ineq rows) + span(eq rows), made irredundant by a round trip
        return dd_convert(vrep_to_hrep(VCone(c.dim, tuple(c.ineqs), tuple(_independent(list(c.eqs), c.dim))), cap), cap)
    return dd_convert(HCone(c.dim, c.lineality, c.rays), cap)


def cone_is_trivial(c: HCone | VCone) -> bool:
    if isinstance(c, HCone):
        c = dd_convert(c)
    return c.is_trivial()


def h_contains_v(h: HCone, v: VCone) -> bool:
    return all(h.contains(g) for g in v.generators())


@dataclass(frozen=True)
class Cone:
    """A convex polyhedral cone carried in both forms."""
    h: HCone
    v: VCone

    @property
    def dim(self) -> int:
        return self.h.dim

    @staticmethod
    def from_h(h: HCone) -> "Cone":
        v = dd_convert(h)
        return Cone(vrep_to_hrep(v), v)

    @staticmethod
    def from_v(v: VCone) -> "Cone":
        h = vrep_to_hrep(v)
        return Cone(h, dd_convert(h))

    def contains(self, x: Sequence) -> bool:
        return self.h.contains(x)

    def subset_of(self, other: "Cone") -> bool:
        return h_contains_v(other.h, self.v)

    def same_as(self, other: "Cone") -> bool:
        return self.subset_of(other) and other.subset_of(self)

    def is_trivial(self) -> bool:
        return self.v.is_trivial()

    def intersect(self, other: "Cone") -> "Cone":
        return Cone.from_h(HCone(self.dim, self.h.eqs + other.h.eqs, self.h.ineqs + other.h.ineqs))

    def key(self) -> tuple:
        return (self.v.lineality, self.v.rays)

    def dimension(self) -> int:
        return rank(list(self.v.rays) + list(self.v.lineality), self.dim)


def cone_from_rows(dim: int, eqs: Iterable[Sequence] = (), ineqs: Iterable[Sequence] = ()) -> Cone:
    return Cone.from_h(HCone(dim, tuple(eqs), tuple(ineqs)))


def cone_from_generators(dim: int, rays: Iterable[Sequence] = (), lineality: Iterable[Sequence] = ()) -> Cone:
    rays = tuple(primitive(vec(r)) for r in rays if not is_zero(vec(r)))
    lin = tuple(_independent([primitive(vec(l)) for l in lineality if not is_zero(vec(l))], dim))
    return Cone.from_v(VCone(dim, rays, lin))


def zero_cone(dim: int) -> Cone:
    return Cone(HCone(dim, tuple(tuple(Fraction(int(i == k)) for k in range(dim)) for i in range(dim))), VCone(dim))


def full_cone(dim: int) -> Cone:
    return Cone(HCone(dim), VCone(dim, (), tuple(tuple(Fraction(int(i == k)) for k in range(dim)) for i in range(dim))))


def orthant_basis(dim: int) -> list[Vec]:
    return [tuple(Fraction(int(i == k)) for k in range(dim)) for i in range(dim)]


def nullspace_cone(rows: Sequence[Sequence], dim: int) -> Cone:
    return cone_from_generators(dim, (), nullspace(rows, dim))
