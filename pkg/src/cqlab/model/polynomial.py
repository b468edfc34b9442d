"""Sparse multivariate polynomials with exact rational coefficients."""
from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np


class Polynomial:
    """Sum of c_alpha x^alpha over multi-indices alpha in N^n."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Mapping[tuple, Fraction] | None = None):
        self.n = n
        self.coeffs = {tuple(a): Fraction(c) for a, c in (coeffs or {}).items() if c != 0}

    @staticmethod
    def constant(n: int, c) -> "Polynomial":
        return Polynomial(n, {(0,) * n: Fraction(c)})

    @staticmethod
    def variable(n: int, i: int) -> "Polynomial":
        return Polynomial(n, {tuple(int(k == i) for k in range(n)): Fraction(1)})

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, Fraction(0)) + c
        return Polynomial(self.n, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict = {}
        for a, c in self.coeffs.items():
            for b, e in other.coeffs.items():
                k = tuple(x + y for x, y in zip(a, b))
                out[k] = out.get(k, Fraction(0)) + c * e
        return Polynomial(self.n, out)

    def scale(self, s) -> "Polynomial":
        s = Fraction(s)
        return Polynomial(self.n, {a: s * c for a, c in self.coeffs.items()})

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.coeffs.items()))))

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    def constant_term(self) -> Fraction:
        return self.coeffs.get((0,) * self.n, Fraction(0))

    def __call__(self, x: Sequence) -> Fraction:
        total = Fraction(0)
        for a, c in self.coeffs.items():
            term = c
            for xi, e in zip(x, a):
                if e:
                    term *= Fraction(xi) ** e
            total += term
        return total

    def eval_float(self, x: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation; x has shape (m, n)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[0])
        for a, c in self.coeffs.items():
            term = np.full(x.shape[0], float(c))
            for i, e in enumerate(a):
                if e:
                    term = term * x[:, i] ** e
            out += term
        return out

    def derivative(self, i: int) -> "Polynomial":
        out = {}
        for a, c in self.coeffs.items():
            if a[i]:
                b = list(a)
                b[i] -= 1
                out[tuple(b)] = c * a[i]
        return Polynomial(self.n, out)

    def shift(self, x0: Sequence) -> "Polynomial":
        """The polynomial h -> p(x0 + h)."""
        x0 = [Fraction(v) for v in x0]
        out: dict = {}
        for a, c in self.coeffs.items():
            # expand prod_i (x0_i + h_i)^{a_i}
            terms = {(): c}
            for i, e in enumerate(a):
                nxt = {}
                for pre, v in terms.items():
                    for k in range(e + 1):
                        coef = comb(e, k) * (x0[i] ** (e - k) if e - k else 1)
                        if coef == 0:
                            continue
                        nxt[pre + (k,)] = nxt.get(pre + (k,), Fraction(0)) + v * coef
                terms = nxt
            for b, v in terms.items():
                out[b] = out.get(b, Fraction(0)) + v
        return Polynomial(self.n, out)

    def homogeneous_part(self, q: int) -> dict:
        return {a: c for a, c in self.coeffs.items() if sum(a) == q}

    def partial(self, alpha: Sequence[int], x0: Sequence) -> Fraction:
        """D^alpha p (x0) = alpha! * coefficient of h^alpha in p(x0 + h)."""
        alpha = tuple(alpha)
        c = self.shift(x0).coeffs.get(alpha, Fraction(0))
        f = 1
        for e in alpha:
            f *= factorial(e)
        return c * f

    def substitute_univariate(self, path: Sequence[tuple[Fraction, int]]) -> list[Fraction]:
        """Coefficients (low first) of t -> p(v_1 t^e_1, ..., v_n t^e_n)."""
        out: dict[int, Fraction] = {}
        for a, c in self.coeffs.items():
            power = 0
            val = c
            for (v, e), k in zip(path, a):
                if k:
                    val *= Fraction(v) ** k
                    power += e * k
            if val:
                out[power] = out.get(power, Fraction(0)) + val
        if not out:
            return []
        top = max(out)
        return [out.get(k, Fraction(0)) for k in range(top + 1)]

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {self.coeffs})"


def combine(polys: Sequence[Polynomial], weights: Sequence) -> Polynomial:
    out = Polynomial(polys[0].n)
    for p, w in zip(polys, weights):
        if w:
            out = out + p.scale(w)
    return out
