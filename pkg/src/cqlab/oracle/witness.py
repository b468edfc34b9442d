"""Search for sequences x^k -> x̄ along which the blockwise products
<lam_nu, F_nu(x^k) - F_nu(x̄)> are all strictly positive.

Paths have the form x(t) = x̄ + (v_i t^e_i)_i with small integer exponents,
evaluated at t_k = t0 2^-k. On polynomial maps the sign of each block along
a path is read off exactly from the lowest-order coefficient in t.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..kernel.linalg import Vec, primitive, vec
from ..model.instance import GmpInstance
from ..model.maps import ExpressionMap, PolynomialMap
from ..model.multiindex import MultiIndex, delta_p, support
from ..model.expr import interval_mid, iv_precision

FLOAT_MARGIN = 1e-9


@dataclass
class WitnessSequence:
    lam: Vec
    u: Vec  # limit direction (integer-primitive)
    blocks: list  # labels nu in I_delta(lam), 1-based
    delta: tuple
    v: Vec
    exponents: tuple
    t: list  # parameter values t_k
    points: list  # x^k
    values: list  # per point: block values
    exact: bool = True
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "lambda": list(self.lam),
            "u": list(self.u),
            "delta": list(self.delta),
            "blocks": list(self.blocks),
            "path": {"v": list(self.v), "exponents": list(self.exponents)},
            "terms": [{"t": t, "x": list(x), "values": list(vals)}
                      for t, x, vals in zip(self.t, self.points, self.values)],
            "exact": self.exact,
        }


@dataclass(frozen=True)
class SearchConfig:
    grid: int = 2  # direction entries in {-grid..grid}
    exponents: tuple = (1, 2, 3)
    radii: int = 20
    terms: int = 3
    max_paths: int = 20000


def _block_index_sets(delta: MultiIndex, lam: Sequence) -> list[list[int]]:
    blocks = delta.blocks()
    return [blocks[nu - 1] for nu in support(delta, lam)]


def _directions(n: int, grid: int) -> list[Vec]:
    seen = set()
    out = []
    rng = range(-grid, grid + 1)
    if n > 4:
        cands = []
        for i in range(n):
            for s in (1, -1):
                e = [0] * n
                e[i] = s
                cands.append(e)
        for i, j in itertools.combinations(range(n), 2):
            for si, sj in itertools.product((1, -1), repeat=2):
                e = [0] * n
                e[i], e[j] = si, sj
                cands.append(e)
    else:
        cands = itertools.product(rng, repeat=n)
    for c in cands:
        if not any(c):
            continue
        p = primitive(tuple(Fraction(x) for x in c))
        if p not in seen:
            seen.add(p)
            out.append(p)
    out.sort(key=lambda p: (sum(abs(x) for x in p), [-x for x in p]))
    return out


def _paths(n: int, cfg: SearchConfig, u: Sequence | None):
    """Candidate (v, exponents) pairs. With a direction u the leading part
    of the path is u itself and the remaining coordinates move faster."""
    if u is None:
        seen = set()
        for exps in itertools.product(cfg.exponents, repeat=n):
            for v in _directions(n, cfg.grid):
                key = (v, tuple(e if x != 0 else 0 for e, x in zip(exps, v)))
                if key in seen:
                    continue
                seen.add(key)
                yield v, exps
        return
    u = primitive(vec(u))
    rest = [i for i in range(n) if u[i] == 0]
    for e0 in (1, 2):
        higher = [e for e in range(e0 + 1, 3 * e0 + 1)]
        for exps_rest in itertools.product(higher, repeat=len(rest)):
            for vals in itertools.product(range(-cfg.grid, cfg.grid + 1), repeat=len(rest)):
                v = list(u)
                exps = [e0] * n
                for i, e, x in zip(rest, exps_rest, vals):
                    v[i] = Fraction(x)
                    exps[i] = e
                yield tuple(v), tuple(exps)


def limit_direction(v: Sequence, exps: Sequence) -> Vec:
    m = min(e for e, x in zip(exps, v) if x != 0)
    return primitive(tuple(x if e == m and x != 0 else Fraction(0) for x, e in zip(v, exps)))


def _lowest(coeffs: list[Fraction]) -> Fraction:
    return next((c for c in coeffs if c != 0), Fraction(0))


def _peval(coeffs, t):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def _search_polynomial(inst, lam, idx_sets, cfg, u, labels, delta):
    F: PolynomialMap = inst.F
    xbar = inst.point
    block_polys = []
    for idx in idx_sets:
        p = F.block_polynomial([lam[i] for i in idx], idx).shift(xbar)
        p = p - p.__class__.constant(p.n, p.constant_term())
        block_polys.append(p)
    for count, (v, exps) in enumerate(_paths(inst.n, cfg, u)):
        if count >= cfg.max_paths:
            break
        path = list(zip(v, exps))
        series = [p.substitute_univariate(path) for p in block_polys]
        if not all(_lowest(s) > 0 for s in series):
            continue
        # positive for all small t: collect the first run of positive radii
        run = []
        for k in range(1, cfg.radii + 40):
            t = Fraction(1, 2 ** k)
            vals = [_peval(s, t) for s in series]
            if all(x > 0 for x in vals):
                run.append((t, vals))
                if len(run) == cfg.terms:
                    break
            else:
                run = []
        if len(run) < cfg.terms:
            continue
        pts = [tuple(xb + vi * t ** e for xb, vi, e in zip(xbar, v, exps)) for t, _ in run]
        return WitnessSequence(tuple(lam), limit_direction(v, exps), labels, delta.parts, tuple(v), tuple(exps),
                               [t for t, _ in run], pts, [vals for _, vals in run], True)
    return None


def _block_values_interval(inst, lam, idx_sets, x):
    F: ExpressionMap = inst.F
    fx = F.interval_value(x)
    f0 = F.interval_value(inst.point)
    out = []
    for idx in idx_sets:
        acc = 0
        for i in idx:
            if lam[i]:
                acc = acc + (fx[i] - f0[i]) * _iv_frac(lam[i])
        out.append(acc)
    return out


def _iv_frac(q):
    import mpmath
    return mpmath.iv.mpf(q.numerator) / q.denominator


def _search_expression(inst, lam, idx_sets, cfg, u, labels, delta):
    xbar = np.array([float(x) for x in inst.point])
    lamf = np.array([float(x) for x in lam])
    paths = []
    for count, (v, exps) in enumerate(_paths(inst.n, cfg, u)):
        if count >= cfg.max_paths:
            break
        paths.append((v, exps))
    if not paths:
        return None
    ks = np.arange(1, cfg.radii + 1)
    ts = 2.0 ** (-ks)
    f0 = inst.F.eval_many(xbar[None, :])[0]
    for v, exps in paths:
        vf = np.array([float(x) for x in v])
        ef = np.array(exps, dtype=float)
        X = xbar[None, :] + vf[None, :] * ts[:, None] ** ef[None, :]
        FX = inst.F.eval_many(X) - f0[None, :]
        vals = np.stack([(FX[:, idx] * lamf[idx]).sum(axis=1) for idx in idx_sets], axis=1)
        good = np.all(vals > FLOAT_MARGIN, axis=1)
        run = []
        for j in range(len(ts)):
            run = run + [j] if good[j] else []
            if len(run) == cfg.terms:
                break
        if len(run) < cfg.terms:
            continue
        # rigorous re-verification with interval arithmetic
        terms, ok = [], True
        for j in run:
            t = Fraction(1, 2 ** int(ks[j]))
            x = tuple(Fraction(xb) + vi * t ** e for xb, vi, e in zip(inst.point, v, exps))
            with iv_precision(120):
                ivs = _block_values_interval(inst, lam, idx_sets, x)
                if not all(iv.a > FLOAT_MARGIN for iv in ivs):
                    ok = False
                    break
                terms.append((t, x, [float(interval_mid(iv)) for iv in ivs]))
        if not ok:
            continue
        return WitnessSequence(tuple(lam), limit_direction(v, exps), labels, delta.parts, tuple(v), tuple(exps),
                               [t for t, _, _ in terms], [x for _, x, _ in terms], [vl for _, _, vl in terms],
                               False, ["values verified by interval arithmetic above the float margin"])
    return None


def witness_search(inst: GmpInstance, lam: Sequence, delta: MultiIndex | None = None,
                   u: Sequence | None = None, cfg: SearchConfig | None = None) -> WitnessSequence | None:
    """Find x^k -> x̄ with <lam_nu, F_nu(x^k) - F_nu(x̄)> > 0 for every block
    nu in the support of lam; with ``u`` the sequence approaches along u."""
    cfg = cfg or SearchConfig()
    lam = vec(lam)
    delta = delta or delta_p(inst.d)
    labels = support(delta, lam)
    if not labels:
        return None
    idx_sets = _block_index_sets(delta, lam)
    if isinstance(inst.F, PolynomialMap):
        return _search_polynomial(inst, lam, idx_sets, cfg, u, labels, delta)
    return _search_expression(inst, lam, idx_sets, cfg, u, labels, delta)


def reverify(inst: GmpInstance, w: WitnessSequence) -> bool:
    """Recompute the block values at the printed points."""
    delta = MultiIndex(w.delta)
    idx_sets = _block_index_sets(delta, w.lam)
    if w.exact:
        fbar = inst.F.exact_value(inst.point)
        for x in w.points:
            fx = inst.F.exact_value(x)
            for idx in idx_sets:
                if sum((w.lam[i] * (fx[i] - fbar[i]) for i in idx), Fraction(0)) <= 0:
                    return False
        return True
    with iv_precision(120):
        for x in w.points:
            if not all(iv.a > FLOAT_MARGIN for iv in _block_values_interval(inst, w.lam, idx_sets, x)):
                return False
    return True
