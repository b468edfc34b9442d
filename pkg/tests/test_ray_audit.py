"""Soundness audit of the ray reduction.

Every HOLDS certificate from the second-order, polynomial and m-th order
conditions (point-based and directional) is confronted with 10^4 seeded
samples (lam, u): lam a random nonnegative combination of the generators of
one multiplier piece, u a random direction (inside the class pullback for the
directional conditions). Taylor coefficients come from an independent symbolic
expansion of <lam, F(x̄ + t u)>.
"""
import random
from fractions import Fraction

import pytest
import sympy

from cqlab.checks import (check_soscms, multiplier_rays, ray_nd_check, rung_dir_mth_osc, rung_mth_osc,
                          rung_polyn_osc, _guard)
from cqlab.fixtures import fixtures, get_fixture
from cqlab.kernel.linalg import dot
from cqlab.model.maps import ORDER_CAP, PolynomialMap
from cqlab.multipliers import direction_classes, lambda0

from helpers import random_instance, sym_components, sym_rational

SAMPLES = 10_000
RANDOM = range(50)


class TaylorTable:
    """coefficient of t^q in F_i(x̄ + t u), as exact monomial tables in u."""

    def __init__(self, inst, upto):
        comps, xs = sym_components(inst)
        t = sympy.Symbol("t")
        us = sympy.symbols(" ".join(f"u{i + 1}" for i in range(inst.n)), seq=True)
        subs = {x: sym_rational(xb) + t * u for x, xb, u in zip(xs, inst.point, us)}
        self.upto = upto
        self.table = []
        for c in comps:
            e = sympy.expand(sympy.series(c.subs(subs), t, 0, upto + 1).removeO())
            rows = {}
            for q in range(1, upto + 1):
                p = sympy.Poly(e.coeff(t, q), *us)
                rows[q] = [(m, Fraction(str(k))) for m, k in p.terms() if k != 0]
            self.table.append(rows)

    def component_values(self, u):
        """vals[i][q] = coefficient of t^q in F_i(x̄ + t u)."""
        out = []
        for rows in self.table:
            vq = {}
            for q, terms in rows.items():
                acc = Fraction(0)
                for mono, k in terms:
                    term = k
                    for ui, e in zip(u, mono):
                        if e:
                            term *= ui ** e
                    acc += term
                vq[q] = acc
            out.append(vq)
        return out

    @staticmethod
    def form(vals, lam, q):
        return sum((l * v[q] for l, v in zip(lam, vals) if l), Fraction(0))


def _sample_lambda(rng, pieces):
    """Nonzero lam in one piece: random nonnegative ray weights plus signed lineality."""
    while True:
        c = rng.choice(pieces)
        lam = [Fraction(0)] * c.dim
        for r in c.v.rays:
            w = Fraction(rng.randint(0, 6), rng.randint(1, 3))
            lam = [a + w * b for a, b in zip(lam, r)]
        for l in c.v.lineality:
            w = rng.randint(-4, 4)
            lam = [a + w * b for a, b in zip(lam, l)]
        if any(lam):
            return lam


def _sample_u(rng, n):
    while True:
        u = [Fraction(rng.randint(-12, 12)) for _ in range(n)]
        if any(u):
            return u


def _sample_u_in_class(rng, c, n):
    """Nonzero u in the relatively open pullback of a direction class."""
    basis = c.pullback_basis
    w = c.pullback_witness
    for _ in range(200):
        z = [rng.randint(-6, 6) for _ in basis]
        near = rng.random() < 0.5
        u = [Fraction(sum(zj * b[i] for zj, b in zip(z, basis))) + (10 * w[i] if near else 0) for i in range(n)]
        if any(u) and all(dot(r, u) < 0 for r in c.pullback_stricts):
            return u
    return list(w)


def _certificates(inst):
    """HOLDS verdicts of the audited conditions, as (label, kind, m)."""
    poly = isinstance(inst.F, PolynomialMap)
    top = min(max(inst.F.degree, 2), ORDER_CAP) if poly else 2
    out = []
    runs = [("soscpn", lambda: rung_mth_osc(inst, 2), "point", 2),
            ("soscms", lambda: check_soscms(inst), "dir", 2),
            ("dir2", lambda: rung_dir_mth_osc(inst, 2), "dir", 2)]
    runs += [(f"osc{m}", lambda m=m: rung_mth_osc(inst, m), "point", m) for m in range(3, top + 1)]
    runs += [(f"dir_osc{m}", lambda m=m: rung_dir_mth_osc(inst, m), "dir", m) for m in range(3, top + 1)]
    if poly:
        runs += [("polyn", lambda: rung_polyn_osc(inst), "point_poly", inst.F.degree),
                 ("dir_polyn", lambda: rung_dir_mth_osc(inst, 0, polynomial=True), "dir_poly", inst.F.degree)]
    for label, fn, kind, m in runs:
        v = _guard(label, fn)
        if v.holds and not v.certificate.get("vacuous"):
            out.append((label, kind, m))
    return out


def _violation(table, vals, lam, kind, m):
    """Return a description if (lam, u) contradicts the certified inequalities."""
    poly = kind.endswith("poly")
    for q in range(1, m + 1):
        f = table.form(vals, lam, q)
        if (poly or q < m) and f > 0:
            return f"order {q} form positive: {f}"
        if not poly and q == m and f >= 0:
            return f"order {m} form not negative: {f}"
    return None


def audit(inst, seed=0):
    """Count samples per certificate; raise on the first contradiction."""
    certs = _certificates(inst)
    if not certs:
        return {}
    table = TaylorTable(inst, max(m for _, _, m in certs))
    rng = random.Random(seed)
    counts = {}
    lam_pieces = lambda0(inst).pieces()
    classes = [c for c in direction_classes(inst) if c.pullback_nonzero and c.multipliers.has_nonzero]
    for label, kind, m in certs:
        if kind.startswith("point") and not lam_pieces:
            continue
        if kind.startswith("dir") and not classes:
            continue
        for _ in range(SAMPLES):
            if kind.startswith("point"):
                lam = _sample_lambda(rng, lam_pieces)
                u = _sample_u(rng, inst.n)
            else:
                c = rng.choice(classes)
                lam = _sample_lambda(rng, c.multipliers.pieces())
                u = _sample_u_in_class(rng, c, inst.n)
            bad = _violation(table, table.component_values(u), lam, kind, m)
            assert bad is None, (inst.name, label, lam, u, bad)
        counts[label] = SAMPLES
    return counts


FIXTURES = [n for n in fixtures() if not get_fixture(n).load().is_analytic]


@pytest.mark.parametrize("name", FIXTURES)
def test_audit_fixture(name):
    audit(get_fixture(name).load())


def test_audit_random_instances():
    audited = 0
    for s in RANDOM:
        audited += len(audit(random_instance(s), seed=s))
    assert audited >= 20


def test_audit_supplied_ray_condition():
    """The oracle-only example: ND on the supplied ray, checked on samples."""
    inst = get_fixture("ex32").load()
    assert ray_nd_check(inst, [(0, -1)]).holds
    table = TaylorTable(inst, 2)
    rng = random.Random(0)
    for _ in range(SAMPLES):
        lam = [0, -Fraction(rng.randint(1, 9), rng.randint(1, 4))]
        u = _sample_u(rng, 1)
        assert table.form(table.component_values(u), lam, 2) < 0


def test_audit_detects_a_planted_false_certificate():
    """Sanity of the audit itself: a form that is only semidefinite is caught."""
    inst = get_fixture("ex41_0_m1_0_0").load()  # <lam, F> = -x1^4 for lam = (0, 0, 1)
    table = TaylorTable(inst, 2)
    pieces = lambda0(inst).pieces()
    rays, _ = multiplier_rays(lambda0(inst))
    assert rays == [(0, 0, 1)]
    rng = random.Random(1)
    lam = _sample_lambda(rng, pieces)
    assert _violation(table, table.component_values([1, 0]), lam, "point", 2) is not None
