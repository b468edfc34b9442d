"""Exact sign decisions for quadratic and homogeneous polynomial forms."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..errors import BasisDependent
from .linalg import Vec, matmul, primitive, rank, transpose, unit

ND = "ND"
NSD = "NSD"
INDEFINITE = "INDEFINITE"

ALWAYS_NONPOSITIVE = "ALWAYS_NONPOSITIVE"
ALWAYS_NEGATIVE_OFF_ORIGIN = "ALWAYS_NEGATIVE_OFF_ORIGIN"
VIOLATED = "VIOLATED"
UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class Definiteness:
    kind: str  # ND, NSD or INDEFINITE
    witness: Vec | None = None  # INDEFINITE: v'Qv > 0; NSD: nonzero v with v'Qv = 0


@dataclass(frozen=True)
class SignDecision:
    outcome: str
    witness: Vec | None = None  # VIOLATED: p(w) > 0; otherwise optional zero of p

    @property
    def nonpositive(self) -> bool:
        return self.outcome in (ALWAYS_NONPOSITIVE, ALWAYS_NEGATIVE_OFF_ORIGIN)

    @property
    def negative(self) -> bool:
        return self.outcome == ALWAYS_NEGATIVE_OFF_ORIGIN


def _classify(m: list[list[Fraction]]) -> tuple[str, list[Fraction] | None]:
    """Symmetric pivoting on the restricted matrix; witnesses are lifted back."""
    k = len(m)
    if k == 0:
        return ND, None
    for i in range(k):
        if m[i][i] > 0:
            return INDEFINITE, [Fraction(int(j == i)) for j in range(k)]
    piv = next((i for i in range(k) if m[i][i] < 0), None)
    if piv is None:
        for i in range(k):
            for j in range(i + 1, k):
                if m[i][j] != 0:
                    w = [Fraction(0)] * k
                    w[i] = Fraction(1)
                    w[j] = Fraction(1 if m[i][j] > 0 else -1)
                    return INDEFINITE, w
        return NSD, [Fraction(int(j == 0)) for j in range(k)]
    rest = [i for i in range(k) if i != piv]
    p = m[piv][piv]
    schur = [[m[i][j] - m[i][piv] * m[piv][j] / p for j in rest] for i in rest]
    kind, w = _classify(schur)
    if w is None:
        return kind, None
    full = [Fraction(0)] * k
    for idx, i in enumerate(rest):
        full[i] = w[idx]
    full[piv] = -sum(m[piv][i] * full[i] for i in rest) / p
    return kind, full


def nsd_on_subspace(q: Sequence[Sequence], basis: Sequence[Sequence]) -> Definiteness:
    """Classify the quadratic form v'Qv restricted to span(basis).

    ND: negative for every nonzero subspace vector; NSD: nonpositive but with
    a nonzero root; INDEFINITE: some subspace vector gives a positive value.
    An empty basis is ND vacuously.
    """
    n = len(q)
    basis = [tuple(Fraction(x) for x in b) for b in basis]
    if not basis:
        return Definiteness(ND)
    if rank(basis, n) < len(basis):
        raise BasisDependent("basis vectors are linearly dependent")
    bt = transpose(basis)  # n x k
    restricted = matmul(matmul(basis, q), bt)
    kind, w = _classify([list(r) for r in restricted])
    if w is None:
        return Definiteness(kind)
    v = tuple(sum(w[j] * basis[j][i] for j in range(len(basis))) for i in range(n))
    return Definiteness(kind, primitive(v))


# --- univariate polynomials: coefficient lists, lowest degree first ---------

def _trim(p: list[Fraction]) -> list[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _peval(p: Sequence[Fraction], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


def _deriv(p):
    return _trim([i * c for i, c in enumerate(p)][1:])


def _divmod(a, b):
    a = _trim(a)
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and a:
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a = _trim(a)
    return _trim(q), a


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    return [c / a[-1] for c in a] if a else a


def sturm_sequence(p: Sequence[Fraction]) -> list[list[Fraction]]:
    p = _trim(list(p))
    seq = [p, _deriv(p)]
    while seq[-1]:
        _, r = _divmod(seq[-2], seq[-1])
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq, t) -> int:
    signs = [s for s in (_peval(p, t) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def isolate_real_roots(p: Sequence[Fraction]) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (l, r] each holding exactly one real root of p.

    Endpoints are never roots. p must not be identically zero.
    """
    p = _trim([Fraction(c) for c in p])
    if len(p) <= 1:
        return []
    sf, _ = _divmod(p, _gcd(p, _deriv(p)))
    seq = sturm_sequence(sf)
    bound = 1 + max(abs(c / sf[-1]) for c in sf[:-1])
    out = []
    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        n = _sign_changes(seq, a) - _sign_changes(seq, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        j = 1
        m = (a + b) / 2
        while _peval(sf, m) == 0:
            j += 1
            m = a + (b - a) * (Fraction(1, 2) + Fraction(1, 2 ** j))
        stack.append((m, b))
        stack.append((a, m))
    return sorted(out)


def univariate_sign_on_line(p: Sequence[Fraction]) -> tuple[str, Fraction | None]:
    """Sign behaviour of p on the whole real line.

    Returns (ALWAYS_NEGATIVE_OFF_ORIGIN, None) when p < 0 everywhere,
    (ALWAYS_NONPOSITIVE, None) when p <= 0 with zeros, (VIOLATED, t) with p(t) > 0.
    """
    p = _trim([Fraction(c) for c in p])
    if not p:
        return ALWAYS_NONPOSITIVE, None
    roots = isolate_real_roots(p)
    tests = [Fraction(0)] if not roots else [roots[0][0]] + [r for _, r in roots]
    for t in tests:
        if _peval(p, t) > 0:
            return VIOLATED, t
    return (ALWAYS_NONPOSITIVE if roots else ALWAYS_NEGATIVE_OFF_ORIGIN), None


def univariate_positive_near_zero(p: Sequence[Fraction]) -> int:
    """Sign pattern of p(t) for small t: returns the exponent/sign info.

    Output: 0 if p is identically zero; +1 if p(t) > 0 for all small t > 0;
    -1 if p(t) < 0 for all small t > 0.
    """
    p = _trim([Fraction(c) for c in p])
    for c in p:
        if c != 0:
            return 1 if c > 0 else -1
    return 0


# --- homogeneous forms -------------------------------------------------------

Poly = Mapping[tuple, Fraction]


def eval_poly(p: Poly, w: Sequence) -> Fraction:
    total = Fraction(0)
    for alpha, c in p.items():
        if c == 0:
            continue
        term = Fraction(c)
        for wi, e in zip(w, alpha):
            if e:
                term *= Fraction(wi) ** e
        total += term
    return total


def _clean(p: Poly) -> dict:
    return {tuple(a): Fraction(c) for a, c in p.items() if c != 0}


def _find_nonzero_point(p: dict, n: int, q: int) -> Vec:
    for pt in itertools.product(range(q + 1), repeat=n):
        if eval_poly(p, pt) != 0:
            return tuple(Fraction(x) for x in pt)
    raise AssertionError("nonzero polynomial vanished on a full grid")


def _restrict(p: dict, used: list[int]) -> dict:
    return {tuple(a[i] for i in used): c for a, c in p.items()}


def _lift(w: Sequence, used: list[int], n: int) -> Vec:
    out = [Fraction(0)] * n
    for k, i in enumerate(used):
        out[i] = Fraction(w[k])
    return tuple(out)


def homogeneous_sign_decide(p: Poly, strict: bool = False, n: int | None = None,
                            seed: int = 0, samples: int = 2000) -> SignDecision:
    """Decide whether a homogeneous form is <= 0 (or < 0 off the origin).

    ``strict`` only affects how much effort goes into the strict question;
    the outcome always reports the strongest property established.
    """
    p = _clean(p)
    if n is None:
        n = len(next(iter(p))) if p else 1
    if not p:
        return SignDecision(ALWAYS_NONPOSITIVE, unit(n, 0))
    degrees = {sum(a) for a in p}
    if len(degrees) != 1:
        raise ValueError("form is not homogeneous")
    q = degrees.pop()
    if q % 2 == 1:
        w = _find_nonzero_point(p, n, q)
        if eval_poly(p, w) < 0:
            w = tuple(-x for x in w)
        return SignDecision(VIOLATED, primitive(w))
    used = [i for i in range(n) if any(a[i] for a in p)]
    if len(used) < n:
        zero = unit(n, next(i for i in range(n) if i not in used))
        sub = homogeneous_sign_decide(_restrict(p, used), strict, len(used), seed, samples)
        if sub.outcome == VIOLATED:
            return SignDecision(VIOLATED, _lift(sub.witness, used, n))
        if sub.nonpositive:
            return SignDecision(ALWAYS_NONPOSITIVE, zero)
        return sub
    if q == 2:
        mat = [[Fraction(0)] * n for _ in range(n)]
        for a, c in p.items():
            idx = [i for i in range(n) for _ in range(a[i])]
            i, j = idx
            if i == j:
                mat[i][i] += c
            else:
                mat[i][j] += c / 2
                mat[j][i] += c / 2
        res = nsd_on_subspace(mat, [unit(n, i) for i in range(n)])
        if res.kind == ND:
            return SignDecision(ALWAYS_NEGATIVE_OFF_ORIGIN)
        if res.kind == NSD:
            return SignDecision(ALWAYS_NONPOSITIVE, res.witness)
        return SignDecision(VIOLATED, res.witness)
    if n == 1:
        c = p[(q,)]
        return SignDecision(ALWAYS_NEGATIVE_OFF_ORIGIN) if c < 0 else SignDecision(VIOLATED, (Fraction(1),))
    if n == 2:
        lead = p.get((q, 0), Fraction(0))
        if lead > 0:
            return SignDecision(VIOLATED, (Fraction(1), Fraction(0)))
        g = [p.get((k, q - k), Fraction(0)) for k in range(q + 1)]
        outcome, t = univariate_sign_on_line(g)
        if outcome == VIOLATED:
            return SignDecision(VIOLATED, primitive((t, Fraction(1))))
        if outcome == ALWAYS_NEGATIVE_OFF_ORIGIN and lead < 0:
            return SignDecision(ALWAYS_NEGATIVE_OFF_ORIGIN)
        zero = (Fraction(1), Fraction(0)) if lead == 0 else None
        return SignDecision(ALWAYS_NONPOSITIVE, zero)
    # n >= 3, even degree >= 4: diagonal certificate, else falsification
    if all(c < 0 and all(e % 2 == 0 for e in a) for a, c in p.items()):
        pure = all(p.get(tuple(q if k == i else 0 for k in range(n)), 0) < 0 for i in range(n))
        return SignDecision(ALWAYS_NEGATIVE_OFF_ORIGIN if pure else ALWAYS_NONPOSITIVE)
    rng = random.Random(seed)
    for pt in itertools.product(range(-2, 3), repeat=n):
        if eval_poly(p, pt) > 0:
            return SignDecision(VIOLATED, primitive(tuple(Fraction(x) for x in pt)))
    for _ in range(samples):
        pt = tuple(Fraction(rng.randint(-64, 64), rng.randint(1, 16)) for _ in range(n))
        if eval_poly(p, pt) > 0:
            return SignDecision(VIOLATED, primitive(pt))
    return SignDecision(UNDECIDED)
