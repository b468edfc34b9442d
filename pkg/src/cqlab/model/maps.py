"""Constraint maps F : R^n -> R^d with derivative oracles."""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np

from ..errors import InexactDerivative, OrderCap
from .expr import (canonical, eval_interval, eval_numpy, is_polynomial, parse_ast,
                   taylor2, to_polynomial, _is_exact)
from .polynomial import Polynomial, combine

ORDER_CAP = 6


class SmoothMap:
    """Common interface; see PolynomialMap and ExpressionMap."""

    n: int
    d: int
    sources: tuple

    @property
    def is_polynomial(self) -> bool:
        return False

    def eval_many(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def component(self, i: int) -> "SmoothMap":
        raise NotImplementedError


class PolynomialMap(SmoothMap):
    def __init__(self, components: Sequence[Polynomial], sources: Sequence[str] | None = None):
        self.components = tuple(components)
        self.n = self.components[0].n if self.components else 0
        self.d = len(self.components)
        self.sources = tuple(sources) if sources else tuple(repr(c) for c in self.components)

    @property
    def is_polynomial(self) -> bool:
        return True

    @property
    def degree(self) -> int:
        return max((c.degree for c in self.components), default=0)

    def is_affine(self) -> bool:
        return self.degree <= 1

    def __call__(self, x: Sequence) -> tuple:
        return tuple(c(x) for c in self.components)

    def exact_value(self, x: Sequence) -> tuple:
        return self(x)

    def eval_many(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.stack([c.eval_float(x) for c in self.components], axis=1)

    def jacobian(self, x0: Sequence) -> tuple:
        return tuple(tuple(c.derivative(j)(x0) for j in range(self.n)) for c in self.components)

    def scalarize(self, lam: Sequence) -> Polynomial:
        return combine(self.components, [Fraction(l) for l in lam])

    def hessian_scalarized(self, lam: Sequence, x0: Sequence) -> tuple:
        p = self.scalarize(lam)
        rows = []
        for i in range(self.n):
            di = p.derivative(i)
            rows.append(tuple(di.derivative(j)(x0) for j in range(self.n)))
        return tuple(rows)

    def higher_partial(self, lam: Sequence, alpha: Sequence[int], x0: Sequence) -> Fraction:
        if sum(alpha) > ORDER_CAP:
            raise OrderCap(f"derivative order {sum(alpha)} exceeds the cap {ORDER_CAP}")
        return self.scalarize(lam).partial(alpha, x0)

    def taylor_forms(self, lam: Sequence, x0: Sequence) -> dict[int, dict]:
        """q -> sum_{|alpha|=q} D^alpha<lam,F>(x0)/alpha! w^alpha, for q >= 1."""
        shifted = self.scalarize(lam).shift(x0)
        out: dict[int, dict] = {}
        for a, c in shifted.coeffs.items():
            q = sum(a)
            if q:
                out.setdefault(q, {})[a] = c
        return out

    def component(self, i: int) -> "PolynomialMap":
        return PolynomialMap([self.components[i]], [self.sources[i]])

    def block_polynomial(self, lam_block: Sequence, idx: Sequence[int]) -> Polynomial:
        return combine([self.components[i] for i in idx], list(lam_block))


class ExpressionMap(SmoothMap):
    """Elementary expressions; derivatives up to order 2 by forward mode."""

    def __init__(self, asts: Sequence, n: int, sources: Sequence[str] | None = None):
        self.asts = tuple(asts)
        self.n = n
        self.d = len(self.asts)
        self.sources = tuple(sources) if sources else tuple(canonical(a) for a in self.asts)

    def _t2(self, x0):
        return [taylor2(a, x0) for a in self.asts]

    def exact_value(self, x: Sequence) -> tuple:
        vals = [t.val for t in self._t2(x)]
        if not all(_is_exact(v) for v in vals):
            raise InexactDerivative("value is not rational at this point")
        return tuple(vals)

    def interval_value(self, x: Sequence) -> list:
        return [eval_interval(a, x) for a in self.asts]

    def eval_many(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.stack([eval_numpy(a, x) for a in self.asts], axis=1)

    def jacobian(self, x0: Sequence) -> tuple:
        rows = []
        for t in self._t2(x0):
            if not all(_is_exact(g) for g in t.grad):
                raise InexactDerivative("Jacobian entry is not rational at this point")
            rows.append(tuple(t.grad))
        return tuple(rows)

    def hessian_scalarized(self, lam: Sequence, x0: Sequence) -> tuple:
        n = self.n
        acc = [[Fraction(0)] * n for _ in range(n)]
        for l, t in zip(lam, self._t2(x0)):
            l = Fraction(l)
            if l == 0:
                continue
            for i in range(n):
                for j in range(n):
                    h = t.hess[i][j]
                    if not _is_exact(h):
                        raise InexactDerivative("Hessian entry is not rational at this point")
                    acc[i][j] += l * h
        return tuple(tuple(r) for r in acc)

    def higher_partial(self, lam: Sequence, alpha: Sequence[int], x0: Sequence) -> Fraction:
        q = sum(alpha)
        if q >= 3:
            raise OrderCap("expression maps provide derivatives up to order 2")
        if q == 0:
            return sum((Fraction(l) * v for l, v in zip(lam, self.exact_value(x0))), Fraction(0))
        if q == 1:
            j = list(alpha).index(1)
            jac = self.jacobian(x0)
            return sum((Fraction(l) * jac[i][j] for i, l in enumerate(lam)), Fraction(0))
        idx = [i for i, e in enumerate(alpha) for _ in range(e)]
        return self.hessian_scalarized(lam, x0)[idx[0]][idx[1]]

    def component(self, i: int) -> "ExpressionMap":
        return ExpressionMap([self.asts[i]], self.n, [self.sources[i]])


def build_map(sources: Sequence[str], n: int) -> SmoothMap:
    """Parse component expressions; all-polynomial sources become a PolynomialMap."""
    asts = []
    for s in sources:
        node, _ = parse_ast(s, n)
        asts.append(node)
    if all(is_polynomial(a) for a in asts):
        return PolynomialMap([to_polynomial(a, n) for a in asts], list(sources))
    return ExpressionMap(asts, n, list(sources))


def parse_expression(src: str, n: int | None = None) -> SmoothMap:
    """Single-component map from an expression string."""
    node, maxvar = parse_ast(src, n)
    n = n if n is not None else max(maxvar, 1)
    if is_polynomial(node):
        return PolynomialMap([to_polynomial(node, n)], [src])
    return ExpressionMap([node], n, [src])


def polynomial_map_from_tables(tables: Sequence[dict], n: int) -> PolynomialMap:
    comps = [Polynomial(n, {tuple(a): Fraction(c) for a, c in t.items()}) for t in tables]
    return PolynomialMap(comps)


def alpha_factorial(alpha: Sequence[int]) -> int:
    out = 1
    for e in alpha:
        out *= factorial(e)
    return out


def jacobian(F: SmoothMap, x0: Sequence) -> tuple:
    return F.jacobian(x0)


def hessian_scalarized(F: SmoothMap, lam: Sequence, x0: Sequence) -> tuple:
    return F.hessian_scalarized(lam, x0)


def higher_partial(F: SmoothMap, lam: Sequence, alpha: Sequence[int], x0: Sequence) -> Fraction:
    return F.higher_partial(lam, alpha, x0)
