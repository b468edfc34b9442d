"""Exact two-phase simplex over Fractions with Bland's rule.

Only small dense problems are expected, so the tableau is kept as lists of
Fractions and rebuilt freely. Bland's rule guarantees termination.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Vec, dot, primitive, zeros

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Vec | None = None
    value: Fraction | None = None


def _pivot(tab: list[list[Fraction]], r: int, c: int) -> None:
    p = tab[r][c]
    if p != 1:
        tab[r] = [x / p for x in tab[r]]
    prow = tab[r]
    for i, row in enumerate(tab):
        if i != r and row[c] != 0:
            f = row[c]
            tab[i] = [x - f * y for x, y in zip(row, prow)]


def _run(tab, basis, cost, allowed):
    """Maximize cost.x over the tableau (rows = [coeffs..., rhs]).

    Returns OPTIMAL or UNBOUNDED; tab/basis are updated in place.
    """
    ncols = len(cost)
    while True:
        # reduced costs: cost_j - sum_i cost_{basis_i} a_ij
        enter = None
        for j in range(ncols):
            if j not in allowed or j in basis:
                continue
            red = cost[j]
            for i, b in enumerate(basis):
                if cost[b] != 0 and tab[i][j] != 0:
                    red -= cost[b] * tab[i][j]
            if red > 0:
                enter = j
                break
        if enter is None:
            return OPTIMAL
        leave = None
        best = None
        for i, row in enumerate(tab):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return UNBOUNDED
        _pivot(tab, leave, enter)
        basis[leave] = enter


def linprog_exact(c: Sequence, a_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
                  a_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
                  nonneg: Sequence[int] = (), nvars: int | None = None) -> LPResult:
    """Maximize c.x s.t. a_ub x <= b_ub, a_eq x = b_eq.

    Variables are free unless listed in ``nonneg``.
    """
    n = nvars if nvars is not None else len(c)
    c = [Fraction(x) for x in c] + [Fraction(0)] * (n - len(c))
    nonneg = set(nonneg)
    # column layout: for each var either one column (nonneg) or two (plus, minus)
    colmap: list[tuple[int, int]] = []
    ncol = 0
    for j in range(n):
        if j in nonneg:
            colmap.append((ncol, -1))
            ncol += 1
        else:
            colmap.append((ncol, ncol + 1))
            ncol += 2

    def expand(row):
        out = [Fraction(0)] * ncol
        for j, v in enumerate(row):
            if v:
                p, m = colmap[j]
                out[p] = Fraction(v)
                if m >= 0:
                    out[m] = -Fraction(v)
        return out

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    nslack = len(a_ub)
    for k, (row, b) in enumerate(zip(a_ub, b_ub)):
        r = expand(row) + [Fraction(0)] * nslack
        r[ncol + k] = Fraction(1)
        rows.append(r)
        rhs.append(Fraction(b))
    for row, b in zip(a_eq, b_eq):
        rows.append(expand(row) + [Fraction(0)] * nslack)
        rhs.append(Fraction(b))
    m = len(rows)
    base_cols = ncol + nslack
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
    # phase 1 with one artificial per row
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(rows[i] + art + [rhs[i]])
    total = base_cols + m
    basis = [base_cols + i for i in range(m)]
    cost1 = [Fraction(0)] * base_cols + [Fraction(-1)] * m
    _run(tab, basis, cost1, set(range(total)))
    if any(tab[i][-1] != 0 for i, b in enumerate(basis) if b >= base_cols):
        return LPResult(INFEASIBLE)
    # drive artificials out of the basis
    i = 0
    while i < len(basis):
        if basis[i] >= base_cols:
            col = next((j for j in range(base_cols) if tab[i][j] != 0), None)
            if col is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, i, col)
            basis[i] = col
        i += 1
    tab = [row[:base_cols] + [row[-1]] for row in tab]
    cost2 = [Fraction(0)] * base_cols
    for j in range(n):
        p, mcol = colmap[j]
        cost2[p] = c[j]
        if mcol >= 0:
            cost2[mcol] = -c[j]
    status = _run(tab, basis, cost2, set(range(base_cols)))
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    vals = [Fraction(0)] * base_cols
    for i, b in enumerate(basis):
        vals[b] = tab[i][-1]
    x = []
    for j in range(n):
        p, mcol = colmap[j]
        x.append(vals[p] - (vals[mcol] if mcol >= 0 else 0))
    x = tuple(x)
    return LPResult(OPTIMAL, x, dot(c, x))


def strict_lp_feasible(eqs: Sequence[Sequence], ineqs: Sequence[Sequence],
                       stricts: Sequence[Sequence], dim: int) -> Vec | None:
    """Decide whether some v has eqs.v = 0, ineqs.v <= 0 and stricts.v < 0.

    Returns an integer-primitive witness or None. Maximizes a slack t with
    stricts.v + t <= 0, t <= 1; feasible iff the optimum is positive.
    """
    if not stricts:
        return zeros(dim)
    a_ub = [list(r) + [0] for r in ineqs]
    b_ub = [0] * len(ineqs)
    for r in stricts:
        a_ub.append(list(r) + [1])
        b_ub.append(0)
    a_ub.append([0] * dim + [1])
    b_ub.append(1)
    a_eq = [list(r) + [0] for r in eqs]
    res = linprog_exact([0] * dim + [1], a_ub, b_ub, a_eq, [0] * len(eqs), nvars=dim + 1)
    if res.status != OPTIMAL or res.value <= 0:
        return None
    return primitive(res.x[:dim])
