"""Disjunctive sets: finite unions of convex polyhedra in H-form."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .kernel.linalg import Vec, dot, frac, is_zero, vec

INF = None  # absent interval endpoint


def _row(r) -> tuple[Vec, Fraction]:
    a, b = r
    a = vec(a)
    if is_zero(a):
        raise ValueError("zero normal row")
    return a, frac(b)


@dataclass(frozen=True)
class HPoly:
    """{y : a.y = b for (a, b) in eqs, a.y <= b for (a, b) in ineqs}."""
    dim: int
    eqs: tuple = ()
    ineqs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "eqs", tuple(_row(r) for r in self.eqs))
        object.__setattr__(self, "ineqs", tuple(_row(r) for r in self.ineqs))
        for a, _ in self.eqs + self.ineqs:
            if len(a) != self.dim:
                raise ValueError("row length does not match the ambient dimension")

    def contains(self, y: Sequence) -> bool:
        return (all(dot(a, y) == b for a, b in self.eqs)
                and all(dot(a, y) <= b for a, b in self.ineqs))

    def active_ineqs(self, y: Sequence) -> list[int]:
        return [j for j, (a, b) in enumerate(self.ineqs) if dot(a, y) == b]

    def is_box(self) -> bool:
        return all(sum(1 for x in a if x != 0) == 1 for a, _ in self.eqs + self.ineqs)

    def intervals(self) -> list[tuple[Fraction | None, Fraction | None]]:
        """Per-coordinate [lo, hi] of a box piece; None marks an infinite end."""
        lo: list[Fraction | None] = [None] * self.dim
        hi: list[Fraction | None] = [None] * self.dim
        for (a, b), is_eq in [(r, True) for r in self.eqs] + [(r, False) for r in self.ineqs]:
            i = next(k for k, x in enumerate(a) if x != 0)
            t = b / a[i]
            if is_eq or a[i] > 0:
                hi[i] = t if hi[i] is None else min(hi[i], t)
            if is_eq or a[i] < 0:
                lo[i] = t if lo[i] is None else max(lo[i], t)
        return list(zip(lo, hi))

    def product(self, other: "HPoly") -> "HPoly":
        d1, d2 = self.dim, other.dim
        pad_l = lambda rows: tuple((a + (Fraction(0),) * d2, b) for a, b in rows)
        pad_r = lambda rows: tuple(((Fraction(0),) * d1 + a, b) for a, b in rows)
        return HPoly(d1 + d2, pad_l(self.eqs) + pad_r(other.eqs), pad_l(self.ineqs) + pad_r(other.ineqs))


def box(intervals: Iterable[tuple]) -> HPoly:
    """Axis-aligned piece from (lo, hi) pairs; None means unbounded."""
    intervals = list(intervals)
    n = len(intervals)
    eqs, ineqs = [], []
    for i, (lo, hi) in enumerate(intervals):
        e = [0] * n
        e[i] = 1
        if lo is not None and hi is not None and frac(lo) == frac(hi):
            eqs.append((e, lo))
            continue
        if lo is not None and hi is not None and frac(lo) > frac(hi):
            raise ValueError("empty interval")
        if hi is not None:
            ineqs.append((e, hi))
        if lo is not None:
            ineqs.append(([-x for x in e], -frac(lo)))
    return HPoly(n, tuple(eqs), tuple(ineqs))


@dataclass(frozen=True)
class DisjunctiveSet:
    """Finite union of convex polyhedra.

    ``factors`` records a declared Cartesian-product structure (blocks in
    order); it is used for block multi-indices and product cone formulas.
    """
    pieces: tuple
    name: str = ""
    factors: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("a disjunctive set needs at least one piece")
        dims = {p.dim for p in self.pieces}
        if len(dims) != 1:
            raise ValueError("pieces live in different dimensions")
        if self.factors is not None and sum(f.dim for f in self.factors) != self.dim:
            raise ValueError("factor dimensions do not add up")

    @property
    def dim(self) -> int:
        return self.pieces[0].dim

    @property
    def ortho_flag(self) -> bool:
        return all(p.is_box() for p in self.pieces)

    @property
    def interval_data(self):
        if not self.ortho_flag:
            return None
        return [p.intervals() for p in self.pieces]

    @property
    def is_analytic(self) -> bool:
        return False

    def contains(self, y: Sequence) -> bool:
        return any(p.contains(y) for p in self.pieces)

    def active_pieces(self, y: Sequence) -> list[int]:
        return [i for i, p in enumerate(self.pieces) if p.contains(y)]

    def block_dims(self) -> tuple[int, ...]:
        if self.factors is None:
            return (self.dim,)
        return tuple(f.dim for f in self.factors)

    def split(self, y: Sequence) -> list[tuple]:
        out, k = [], 0
        for m in self.block_dims():
            out.append(tuple(y[k:k + m]))
            k += m
        return out


def product_set(g1: DisjunctiveSet, g2: DisjunctiveSet, name: str = "") -> DisjunctiveSet:
    """Cartesian product, with unions distributed over the product."""
    pieces = tuple(p.product(q) for p in g1.pieces for q in g2.pieces)
    f1 = g1.factors if g1.factors is not None else (g1,)
    f2 = g2.factors if g2.factors is not None else (g2,)
    return DisjunctiveSet(pieces, name or f"{g1.name}x{g2.name}", f1 + f2)


def power_set(g: DisjunctiveSet, copies: int, name: str = "") -> DisjunctiveSet:
    if copies < 1:
        raise ValueError("copies must be at least 1")
    out = g
    for _ in range(copies - 1):
        out = product_set(out, g)
    if copies == 1:
        return g
    return DisjunctiveSet(out.pieces, name or f"{g.name}^{copies}", out.factors)


def cone_set(pieces_rows: Iterable[tuple[Sequence, Sequence]], dim: int, name: str = "") -> DisjunctiveSet:
    """Union of cones {v : E v = 0, A v <= 0} as a disjunctive set."""
    pieces = []
    for eqs, ineqs in pieces_rows:
        pieces.append(HPoly(dim, tuple((a, 0) for a in eqs), tuple((a, 0) for a in ineqs)))
    return DisjunctiveSet(tuple(pieces), name)
