"""Exact rational linear algebra on tuples of Fractions.

Vectors are tuples, matrices are tuples of row tuples. Everything here is
small and dense; the sizes we meet are a handful of rows and columns.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vec = tuple  # tuple[Fraction, ...]
Mat = tuple  # tuple[Vec, ...]


def frac(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to Fraction (floats rejected)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def vec(xs: Iterable) -> Vec:
    return tuple(frac(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(vec(r) for r in rows)


def zeros(n: int) -> Vec:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> Vec:
    return tuple(Fraction(1) if k == i else Fraction(0) for k in range(n))


def dot(a: Sequence, b: Sequence) -> Fraction:
    s = Fraction(0)
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def add(a: Sequence, b: Sequence) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vec:
    return tuple(c * x for x in a)


def neg(a: Sequence) -> Vec:
    return tuple(-x for x in a)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def matvec(m: Sequence[Sequence], v: Sequence) -> Vec:
    return tuple(dot(row, v) for row in m)


def transpose(m: Sequence[Sequence], ncols: int | None = None) -> Mat:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(tuple(col) for col in zip(*m))


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(r, c) for c in bt) for r in a)


def quad(q: Sequence[Sequence], v: Sequence) -> Fraction:
    return dot(v, matvec(q, v))


def primitive(v: Sequence) -> Vec:
    """Scale a rational vector to the primitive integer vector on its ray."""
    if is_zero(v):
        return tuple(Fraction(0) for _ in v)
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for k in ints:
        g = gcd(g, abs(k))
    return tuple(Fraction(k // g) for k in ints)


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vec]:
    """Basis of {v : rows v = 0}, integer-primitive vectors."""
    if not rows:
        return [unit(ncols, i) for i in range(ncols)]
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(primitive(v))
    return basis


def row_basis(rows: Sequence[Sequence], ncols: int) -> list[Vec]:
    """A basis of the row space (reduced rows)."""
    if not rows:
        return []
    red, _ = rref(rows, ncols)
    return [tuple(r) for r in red]


def independent_subset(rows: Sequence[Sequence], ncols: int) -> list[int]:
    """Indices of a maximal linearly independent subfamily, greedy in order."""
    chosen: list[int] = []
    acc: list[Sequence] = []
    for i, r in enumerate(rows):
        if rank(acc + [r], ncols) > len(acc):
            acc.append(r)
            chosen.append(i)
    return chosen


def solve(a: Sequence[Sequence], b: Sequence, ncols: int) -> Vec | None:
    """One solution of a x = b (free variables set to 0), or None."""
    aug = [list(r) + [bi] for r, bi in zip(a, b)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return tuple(x)


def project_out(v: Sequence, basis: Sequence[Sequence]) -> Vec:
    """Orthogonal projection of v onto the complement of span(basis)."""
    if not basis:
        return tuple(v)
    n = len(v)
    gram = [[dot(a, b) for b in basis] for a in basis]
    rhs = [dot(a, v) for a in basis]
    coef = solve(gram, rhs, len(basis))
    if coef is None:
        raise ValueError("dependent basis")
    out = list(v)
    for c, b in zip(coef, basis):
        for i in range(n):
            out[i] -= c * b[i]
    return tuple(out)


def inverse(m: Sequence[Sequence]) -> Mat | None:
    n = len(m)
    aug = [list(r) + list(unit(n, i)) for i, r in enumerate(m)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(red) < n:
        return None
    return tuple(tuple(r[n:]) for r in red)


def fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_vec(v: Sequence) -> str:
    return "(" + ", ".join(fmt_rational(x) for x in v) + ")"
