"""Constraint-qualification checks with three-valued verdicts.

Every check returns a Verdict: HOLDS with a certificate, FAILS with a
witness, or UNDECIDED with notes. Sufficient conditions (SOSCMS, m-th order
conditions, ...) report whether the condition itself is satisfied; the
implication closure in ``check_all`` turns those into statements about the
constraint qualifications they imply.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import (AnalyticGamma, AssumptionNotGuaranteed, EmptyPool, InexactDerivative,
                     InternalConsistencyError, OrderCap)
from .kernel.forms import ND, VIOLATED, eval_poly, homogeneous_sign_decide, nsd_on_subspace
from .kernel.linalg import Vec, dot, is_zero, nullspace, primitive, quad, unit, vec
from .kernel.lp import OPTIMAL, linprog_exact
from .model.instance import GmpInstance
from .model.maps import ORDER_CAP, PolynomialMap
from .model.multiindex import MultiIndex, delta_p, delta_q, is_admissible, support
from .model.polynomial import Polynomial
from .multipliers import DirectionClass, MultiplierSet, direction_classes, lambda0
from .oracle.probe import ProbeConfig, mscq_probe
from .oracle.witness import SearchConfig, WitnessSequence, witness_search

HOLDS = "HOLDS"
FAILS = "FAILS"
UNDECIDED = "UNDECIDED"


@dataclass
class Verdict:
    check: str
    status: str
    certificate: dict = field(default_factory=dict)
    witness: object = None  # WitnessSequence or a plain dict
    notes: list = field(default_factory=list)
    derived_from: str | None = None  # source node of the implication arrow
    exact: bool = True

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    @property
    def fails(self) -> bool:
        return self.status == FAILS


@dataclass(frozen=True)
class CheckRequest:
    which: tuple = ("all",)
    delta: MultiIndex | None = None
    directional: bool = False
    budget: int = 20000  # witness-search path budget
    seed: int = 0


# --- shared helpers ----------------------------------------------------------------

def _cached(inst: GmpInstance, key: str, fn: Callable):
    store = inst.__dict__.setdefault("_check_cache", {})
    if key not in store:
        store[key] = fn()
    return store[key]


def _lambda0(inst: GmpInstance) -> MultiplierSet:
    return _cached(inst, "lambda0", lambda: lambda0(inst))


def _classes(inst: GmpInstance) -> list[DirectionClass]:
    return _cached(inst, "classes", lambda: direction_classes(inst))


def _active_classes(inst: GmpInstance) -> list[DirectionClass]:
    return [c for c in _classes(inst) if c.pullback_nonzero and c.multipliers.has_nonzero]


def multiplier_rays(ms: MultiplierSet) -> tuple[list[Vec], list[Vec]]:
    """Distinct extreme rays and lineality directions over all pieces."""
    rays, lins = [], []
    for c in ms.pieces():
        for r in c.v.rays:
            r = primitive(r)
            if r not in rays:
                rays.append(r)
        for l in c.v.lineality:
            l = primitive(l)
            if l not in lins and tuple(-x for x in l) not in lins:
                lins.append(l)
    return rays, lins


def _signed(rays: Sequence[Vec], lins: Sequence[Vec]) -> list[Vec]:
    return list(rays) + [s for l in lins for s in (l, tuple(-x for x in l))]


def _forms(inst: GmpInstance, lam: Sequence, upto: int) -> dict[int, dict]:
    """Homogeneous Taylor forms q -> {alpha: D^alpha<lam,F>(x̄)/alpha!} for 1 <= q <= upto."""
    if upto > ORDER_CAP:
        raise OrderCap(f"order {upto} exceeds the cap {ORDER_CAP}")
    F = inst.F
    if isinstance(F, PolynomialMap):
        return {q: f for q, f in F.taylor_forms(lam, inst.point).items() if q <= upto}
    if upto > 2:
        raise OrderCap("expression maps provide derivatives up to order 2")
    n = inst.n
    out = {}
    g = [sum((l * row[j] for l, row in zip(lam, inst.jac)), Fraction(0)) for j in range(n)]
    out[1] = {tuple(int(k == j) for k in range(n)): g[j] for j in range(n) if g[j] != 0}
    if upto >= 2:
        h = inst.hessian(lam)
        f2 = {}
        for i in range(n):
            for j in range(i, n):
                c = h[i][i] / 2 if i == j else h[i][j]
                if c != 0:
                    a = [0] * n
                    a[i] += 1
                    a[j] += 1
                    f2[tuple(a)] = c
        out[2] = f2
    return out


def _compose(form: dict, basis: Sequence[Vec], n: int) -> dict:
    """The form p(sum_j z_j b_j) as a form in the basis coordinates z."""
    k = len(basis)
    zs = [Polynomial.variable(k, j) for j in range(k)]
    xs = []
    for i in range(n):
        acc = Polynomial(k)
        for j in range(k):
            if basis[j][i] != 0:
                acc = acc + zs[j].scale(basis[j][i])
        xs.append(acc)
    total = Polynomial(k)
    for alpha, c in form.items():
        term = Polynomial.constant(k, c)
        for i, e in enumerate(alpha):
            if e:
                term = term * xs[i] ** e
        total = total + term
    return dict(total.coeffs)


def _nonpositive_near(form: dict, u: Vec, n: int) -> tuple[str, str]:
    """Decide p <= 0 on a neighbourhood of u (p a homogeneous form).

    Returns (status, reason) with status HOLDS, FAILS or UNDECIDED.
    """
    if not any(c != 0 for c in form.values()):
        return HOLDS, "form vanishes"
    val = eval_poly(form, u)
    if val < 0:
        return HOLDS, "negative at u"
    if val > 0:
        return FAILS, "positive at u"
    p = Polynomial(n, form)
    grad = [p.derivative(i)(u) for i in range(n)]
    if any(g != 0 for g in grad):
        return FAILS, "zero at u with nonzero gradient"
    if homogeneous_sign_decide(form, n=n).nonpositive:
        return HOLDS, "globally nonpositive"
    hess = [[p.derivative(i).derivative(j)(u) for j in range(n)] for i in range(n)]
    perp = nullspace([list(u)], n)
    if nsd_on_subspace(hess, perp).kind == ND:
        return HOLDS, "local maximum on the sphere at u"
    return UNDECIDED, "degenerate zero at u"


def _lift(z: Sequence, basis: Sequence[Vec], n: int) -> Vec:
    return primitive(tuple(sum((zj * b[i] for zj, b in zip(z, basis)), Fraction(0)) for i in range(n)))


def _witness_rung(lam, u=None, **kw) -> dict:
    out = {"lambda": list(lam)}
    if u is not None:
        out["u"] = list(u)
    out.update(kw)
    return out


def _vacuous(check: str, reason: str) -> Verdict:
    return Verdict(check, HOLDS, {"vacuous": True, "reason": reason})


def _order_name(m: int) -> str:
    return {1: "1st", 2: "2nd", 3: "3rd"}.get(m, f"{m}th")


# --- first-order conditions -----------------------------------------------------------

def check_gmfcq(inst: GmpInstance) -> Verdict:
    """Lambda0(x̄) = {0}."""
    ms = _lambda0(inst)
    if not ms.has_nonzero:
        return Verdict("gmfcq", HOLDS, {"lambda0": ms.describe()})
    rays, lins = multiplier_rays(ms)
    lam = (rays + lins)[0]
    return Verdict("gmfcq", FAILS, {"lambda0": ms.describe()}, _witness_rung(lam))


def check_foscms(inst: GmpInstance) -> Verdict:
    """No critical direction carries a nonzero directional multiplier."""
    classes = _classes(inst)
    cert = []
    for c in classes:
        if not c.pullback_nonzero:
            cert.append({"direction": list(c.witness_dir), "reason": "no nonzero critical u"})
            continue
        if c.multipliers.has_nonzero:
            rays, lins = multiplier_rays(c.multipliers)
            lam = (rays + lins)[0]
            return Verdict("foscms", FAILS, {"classes": len(classes)},
                           _witness_rung(lam, c.pullback_witness, multipliers=c.multipliers.describe()))
        cert.append({"direction": list(c.witness_dir), "u": list(c.pullback_witness),
                     "reason": "trivial directional multipliers"})
    return Verdict("foscms", HOLDS, {"classes": cert})


# --- second-order condition for metric subregularity ------------------------------------

def _sample_region(c: DirectionClass, n: int, rng: random.Random, count: int) -> list[Vec]:
    out = []
    for _ in range(count):
        z = [Fraction(rng.randint(-8, 8)) for _ in c.pullback_basis]
        u = _lift(z, c.pullback_basis, n) if any(z) else None
        if u is None or is_zero(u):
            continue
        if all(dot(r, u) < 0 for r in c.pullback_stricts):
            out.append(u)
    return out


def check_soscms(inst: GmpInstance, seed: int = 0, samples: int = 2000, name: str = "soscms") -> Verdict:
    """u'∇²<lam,F>(x̄)u < 0 for every critical u and 0 != lam in Lambda0(x̄;u).

    The form is linear in lam, so extreme rays of each multiplier piece
    suffice; a lineality direction makes the strict inequality impossible.
    """
    n = inst.n
    rng = random.Random(seed)
    cert, undecided = [], []
    for c in _active_classes(inst):
        rays, lins = multiplier_rays(c.multipliers)
        if lins:
            return Verdict(name, FAILS, {"reason": "multiplier piece contains a line"},
                           _witness_rung(lins[0], c.pullback_witness))
        for r in rays:
            try:
                q = inst.hessian(r)
            except InexactDerivative as exc:
                undecided.append(str(exc))
                continue
            if c.pullback_dim <= 1:
                u = c.pullback_witness
                val = quad(q, u)
                if val >= 0:
                    return Verdict(name, FAILS, {}, _witness_rung(r, u, value=val))
                cert.append({"lambda": list(r), "u": list(u), "value": val})
                continue
            res = nsd_on_subspace(q, c.pullback_basis)
            if res.kind == ND:
                cert.append({"lambda": list(r), "subspace": [list(b) for b in c.pullback_basis], "kind": ND})
                continue
            if not c.pullback_stricts:
                u = res.witness
                return Verdict(name, FAILS, {}, _witness_rung(r, u, value=quad(q, u)))
            bad = next((u for u in _sample_region(c, n, rng, samples) if quad(q, u) >= 0), None)
            if bad is not None:
                return Verdict(name, FAILS, {}, _witness_rung(r, bad, value=quad(q, bad)))
            undecided.append(f"ray {list(r)}: form not definite on the span, no violation sampled")
    if undecided:
        return Verdict(name, UNDECIDED, {"checked": cert}, notes=undecided)
    if not cert:
        return _vacuous(name, "no critical direction with nonzero multipliers")
    return Verdict(name, HOLDS, {"rays": cert})


# --- pseudo-normality rungs -------------------------------------------------------------

def rung_robinson(inst: GmpInstance) -> Verdict:
    if isinstance(inst.F, PolynomialMap) and inst.F.is_affine():
        return Verdict("robinson", HOLDS, {"reason": "F is affine"})
    return Verdict("robinson", FAILS, {"reason": "F is not affine"})


def rung_mth_osc(inst: GmpInstance, m: int, rays=None, lins=None) -> Verdict:
    """For every multiplier ray: forms of order q < m are <= 0 everywhere and
    the order-m form is < 0 off the origin. m = 2 is SOSCPN."""
    name = "soscpn" if m == 2 else f"osc{m}"
    if rays is None:
        rays, lins = multiplier_rays(_lambda0(inst))
    if not rays and not lins:
        return _vacuous(name, "no nonzero multiplier")
    if lins:
        return Verdict(name, FAILS, {"reason": "multiplier cone contains a line"}, _witness_rung(lins[0]))
    n = inst.n
    cert, undecided = [], []
    for r in rays:
        try:
            forms = _forms(inst, r, m)
        except (OrderCap, InexactDerivative) as exc:
            return Verdict(name, UNDECIDED, notes=[str(exc)])
        for q in range(1, m + 1):
            dec = homogeneous_sign_decide(forms.get(q, {}), strict=(q == m), n=n)
            if dec.outcome == VIOLATED:
                return Verdict(name, FAILS, {"order": q},
                               _witness_rung(r, dec.witness, order=q, value=eval_poly(forms.get(q, {}), dec.witness)))
            if q == m and not dec.negative:
                if dec.nonpositive:
                    w = dec.witness
                    return Verdict(name, FAILS, {"order": q, "reason": "order-m form has a nontrivial zero"},
                                   _witness_rung(r, w, order=q) if w is not None else _witness_rung(r, order=q))
                undecided.append(f"ray {list(r)}: order {q} sign undecided")
            elif q < m and not dec.nonpositive:
                undecided.append(f"ray {list(r)}: order {q} sign undecided")
        cert.append({"lambda": list(r), "orders": list(range(1, m + 1))})
    if undecided:
        return Verdict(name, UNDECIDED, {"checked": cert}, notes=undecided)
    return Verdict(name, HOLDS, {"m": m, "rays": cert})


def rung_polyn_osc(inst: GmpInstance, rays=None, lins=None) -> Verdict:
    """Polynomial F of degree m: every form of order q <= m is <= 0 on R^n."""
    name = "polyn_osc"
    if not isinstance(inst.F, PolynomialMap):
        return Verdict(name, FAILS, {"reason": "F is not polynomial"})
    m = inst.F.degree
    if rays is None:
        rays, lins = multiplier_rays(_lambda0(inst))
    if not rays and not lins:
        return _vacuous(name, "no nonzero multiplier")
    if m > ORDER_CAP:
        return Verdict(name, UNDECIDED, notes=[f"degree {m} exceeds the cap {ORDER_CAP}"])
    n = inst.n
    cert, undecided = [], []
    for r in _signed(rays, lins):
        forms = _forms(inst, r, m)
        for q in range(1, m + 1):
            dec = homogeneous_sign_decide(forms.get(q, {}), n=n)
            if dec.outcome == VIOLATED:
                return Verdict(name, FAILS, {"degree": m},
                               _witness_rung(r, dec.witness, order=q, value=eval_poly(forms[q], dec.witness)))
            if not dec.nonpositive:
                undecided.append(f"ray {list(r)}: order {q} sign undecided")
        cert.append(list(r))
    if undecided:
        return Verdict(name, UNDECIDED, notes=undecided)
    return Verdict(name, HOLDS, {"degree": m, "rays": cert})


def _univariate_parts(p: Polynomial, n: int) -> list[list[Fraction]] | None:
    """Coefficients (low first) of each variable if p is a sum of univariate terms."""
    parts = [[] for _ in range(n)]
    for alpha, c in p.coeffs.items():
        used = [i for i, e in enumerate(alpha) if e]
        if len(used) > 1:
            return None
        if not used or c == 0:
            continue
        i = used[0]
        e = alpha[i]
        parts[i].extend([Fraction(0)] * (e + 1 - len(parts[i])))
        parts[i][e] += c
    return parts


def _line_witness(inst: GmpInstance, lam: Vec, i: int, sign: int, coeffs: list[Fraction]) -> WitnessSequence:
    """x̄ + sign t e_i with t = 2^-k: the first three radii where the value is positive."""
    n = inst.n
    run = []
    for k in range(1, 80):
        t = Fraction(1, 2 ** k)
        val = sum((c * (sign * t) ** e for e, c in enumerate(coeffs)), Fraction(0))
        if val > 0:
            run.append((t, val))
            if len(run) == 3:
                break
        else:
            run = []
    v = tuple(Fraction(sign) if j == i else Fraction(0) for j in range(n))
    pts = [tuple(xb + vi * t for xb, vi in zip(inst.point, v)) for t, _ in run]
    return WitnessSequence(tuple(lam), v, [1], (inst.d,), v, tuple([1] * n),
                           [t for t, _ in run], pts, [[val] for _, val in run], True)


def rung_pn_local_max(inst: GmpInstance, rays=None, lins=None) -> Verdict:
    """Exact local maximality of <lam,F> at x̄ when it splits into univariate parts.

    A separable polynomial has a local maximum at x̄ iff every part does, and
    a univariate part does iff it vanishes or its lowest term has even degree
    and a negative coefficient. A failing part yields an exact sequence.
    """
    name = "pn_local_max"
    if not isinstance(inst.F, PolynomialMap):
        return Verdict(name, UNDECIDED, notes=["F is not polynomial"])
    if rays is None:
        rays, lins = multiplier_rays(_lambda0(inst))
    if not rays and not lins:
        return _vacuous(name, "no nonzero multiplier")
    n = inst.n
    cert = []
    for r in _signed(rays, lins):
        p = inst.F.scalarize(r).shift(inst.point)
        parts = _univariate_parts(p, n)
        if parts is None:
            return Verdict(name, UNDECIDED, notes=[f"<lam,F> for lam={list(r)} is not separable"])
        for i, coeffs in enumerate(parts):
            e = next((k for k, c in enumerate(coeffs) if k > 0 and c != 0), None)
            if e is None:
                continue
            c = coeffs[e]
            if e % 2 == 0 and c < 0:
                continue
            sign = 1 if (e % 2 == 0 or c > 0) else -1
            w = _line_witness(inst, r, i, sign, coeffs)
            return Verdict(name, FAILS, {"variable": i + 1, "lowest_order": e}, w)
        cert.append(list(r))
    return Verdict(name, HOLDS, {"separable": True, "rays": cert})


def _class_directions(c: DirectionClass) -> list[Vec]:
    u = c.pullback_witness
    if c.pullback_stricts:
        return [u]
    return [u, tuple(-x for x in u)]


def _restricted_negative(form: dict, c: DirectionClass, n: int) -> tuple[str, Vec | None]:
    """Is the form < 0 on every nonzero u of the class pullback?"""
    if c.pullback_dim <= 1:
        for u in _class_directions(c):
            if eval_poly(form, u) >= 0:
                return FAILS, u
        return HOLDS, None
    sub = _compose(form, c.pullback_basis, n)
    dec = homogeneous_sign_decide(sub, strict=True, n=len(c.pullback_basis))
    if dec.negative:
        return HOLDS, None
    if dec.witness is not None:
        u = _lift(dec.witness, c.pullback_basis, n)
        for cand in (u, tuple(-x for x in u)):
            if all(dot(r, cand) < 0 for r in c.pullback_stricts) and eval_poly(form, cand) >= 0:
                return FAILS, cand
    return UNDECIDED, None


def _nonpositive_on_class(form: dict, c: DirectionClass, n: int) -> tuple[str, Vec | None, str]:
    """Is the form <= 0 on a neighbourhood of every u in the class pullback?"""
    if c.pullback_dim <= 1:
        for u in _class_directions(c):
            st, why = _nonpositive_near(form, u, n)
            if st != HOLDS:
                return st, u, why
        return HOLDS, None, "checked at the pullback direction"
    if homogeneous_sign_decide(form, n=n).nonpositive:
        return HOLDS, None, "globally nonpositive"
    st, u = _restricted_negative(form, c, n)
    if st == HOLDS:
        return HOLDS, None, "negative on the pullback"
    if st == FAILS and eval_poly(form, u) > 0:
        return FAILS, u, "positive at a critical direction"
    return UNDECIDED, u, "sign near the pullback undecided"


def rung_dir_mth_osc(inst: GmpInstance, m: int, polynomial: bool = False) -> Verdict:
    """Directional m-th order condition: per critical class, multiplier ray and
    critical u, forms of order q < m are <= 0 near u and the order-m form is
    < 0 at u. With ``polynomial`` (F of degree m) every order q <= m only
    needs <= 0 near u."""
    name = "dir_polyn_osc" if polynomial else ("soscdirpn" if m == 2 else f"dir_osc{m}")
    if polynomial:
        if not isinstance(inst.F, PolynomialMap):
            return Verdict(name, FAILS, {"reason": "F is not polynomial"})
        m = inst.F.degree
    n = inst.n
    active = _active_classes(inst)
    if not active:
        return _vacuous(name, "no critical direction with nonzero multipliers")
    cert, undecided = [], []
    for c in active:
        rays, lins = multiplier_rays(c.multipliers)
        if lins and not polynomial:
            return Verdict(name, FAILS, {"reason": "multiplier piece contains a line"},
                           _witness_rung(lins[0], c.pullback_witness))
        for r in _signed(rays, lins):
            try:
                forms = _forms(inst, r, m)
            except (OrderCap, InexactDerivative) as exc:
                return Verdict(name, UNDECIDED, notes=[str(exc)])
            top = m if polynomial else m - 1
            for q in range(1, top + 1):
                st, u, why = _nonpositive_on_class(forms.get(q, {}), c, n)
                if st == FAILS:
                    return Verdict(name, FAILS, {"order": q, "reason": why}, _witness_rung(r, u, order=q))
                if st == UNDECIDED:
                    undecided.append(f"ray {list(r)}, order {q}: {why}")
            if not polynomial:
                st, u = _restricted_negative(forms.get(m, {}), c, n)
                if st == FAILS:
                    return Verdict(name, FAILS, {"order": m, "reason": "order-m form not negative"},
                                   _witness_rung(r, u, order=m, value=eval_poly(forms.get(m, {}), u)))
                if st == UNDECIDED:
                    undecided.append(f"ray {list(r)}, order {m}: strict sign undecided")
            cert.append({"direction": list(c.witness_dir), "u": list(c.pullback_witness), "lambda": list(r)})
    if undecided:
        return Verdict(name, UNDECIDED, {"checked": cert}, notes=undecided)
    return Verdict(name, HOLDS, {"m": m, "classes": cert})


# --- pseudo- and PQ-normality --------------------------------------------------------------

def _search(inst, gens, delta, u, cfg) -> WitnessSequence | None:
    for lam in gens:
        w = witness_search(inst, lam, delta, u, cfg)
        if w is not None:
            return w
    return None


def check_pseudo_normality(inst: GmpInstance, directional: bool = False,
                           cfg: SearchConfig | None = None) -> Verdict:
    """Ladder of sufficient conditions, then exact falsification by sequences.

    For disjunctive sets pseudo-normality is equivalent to x̄ being a local
    maximizer of <lam,F> for all lam in Lambda0(x̄) (directionally: along
    sequences tangent to u, lam in Lambda0(x̄;u)), so a sequence with a
    positive value is an exact violation.
    """
    inst.require_disjunctive()
    name = "dir_pn" if directional else "pn"
    cfg = cfg or SearchConfig()
    trail = []

    def done(v: Verdict, final: str) -> Verdict:
        return Verdict(name, final, {"rung": v.check, **v.certificate}, v.witness,
                       trail + v.notes, exact=v.exact)

    if not directional:
        rays, lins = multiplier_rays(_lambda0(inst))
        if not rays and not lins:
            return _vacuous(name, "GMFCQ: no nonzero multiplier")
        rungs = [lambda: rung_robinson(inst), lambda: rung_mth_osc(inst, 2, rays, lins),
                 lambda: rung_polyn_osc(inst, rays, lins)]
        rungs += [lambda m=m: rung_mth_osc(inst, m, rays, lins) for m in range(3, _max_order(inst) + 1)]
        rungs.append(lambda: rung_pn_local_max(inst, rays, lins))
    else:
        if not _active_classes(inst):
            return _vacuous(name, "FOSCMS: no critical direction with nonzero multipliers")
        rungs = [lambda: rung_robinson(inst), lambda: rung_dir_mth_osc(inst, 2),
                 lambda: rung_dir_mth_osc(inst, 0, polynomial=True)]
        rungs += [lambda m=m: rung_dir_mth_osc(inst, m) for m in range(3, _max_order(inst) + 1)]
        rungs.append(lambda: rung_pn_local_max(inst))
    for rung in rungs:
        v = rung()
        if v.holds:
            return done(v, HOLDS)
        if v.check == "pn_local_max" and v.fails and not directional:
            return done(v, FAILS)
        trail.append(f"{v.check}: {v.status}")
    if not directional:
        w = _search(inst, _signed(rays, lins), delta_p(inst.d), None, cfg)
        if w is not None:
            return Verdict(name, FAILS, {"rung": "witness_search"}, w, trail, exact=w.exact)
    else:
        for c in _active_classes(inst):
            rays_c, lins_c = multiplier_rays(c.multipliers)
            for u in _class_directions(c):
                w = _search(inst, _signed(rays_c, lins_c), delta_p(inst.d), u, cfg)
                if w is not None:
                    return Verdict(name, FAILS, {"rung": "witness_search", "u": list(u)}, w, trail,
                                   exact=w.exact)
    return Verdict(name, UNDECIDED, {}, None, trail + ["no sufficient condition certified, no violation found"])


def _max_order(inst: GmpInstance) -> int:
    if isinstance(inst.F, PolynomialMap):
        return min(max(inst.F.degree, 2), ORDER_CAP)
    return 2


def _block_data(inst: GmpInstance, lam: Vec, delta: MultiIndex):
    """Per block nu in I_delta(lam): row lam_nu' ∇F_nu(x̄) and Hessian of <lam_nu,F_nu>."""
    blocks = delta.blocks()
    out = []
    for nu in support(delta, lam):
        idx = blocks[nu - 1]
        part = tuple(lam[i] if i in idx else Fraction(0) for i in range(inst.d))
        row = tuple(sum((part[i] * inst.jac[i][j] for i in idx), Fraction(0)) for j in range(inst.n))
        out.append((nu, row, inst.hessian(part)))
    return out


def _pqn_lp(blocks, u0: Vec, n: int) -> tuple[str, Fraction | None, Vec | None]:
    """max t s.t. t <= a_nu.w + u0'H_nu u0, u0.w = 0; the condition holds iff the optimum is < 0.

    Scaling u = s u0 multiplies the Hessian term by s^2 and w ranges over a
    subspace, so one LP covers every nonzero multiple of u0.
    """
    a_ub, b_ub = [], []
    for _, row, h in blocks:
        a_ub.append([-x for x in row] + [1])
        b_ub.append(quad(h, u0))
    res = linprog_exact([0] * n + [1], a_ub, b_ub, [list(u0) + [0]], [0], nvars=n + 1)
    if res.status != OPTIMAL:
        return FAILS, None, None
    w = res.x[:n]
    return (HOLDS if res.value < 0 else FAILS), res.value, w


def check_soscpqn(inst: GmpInstance, delta: MultiIndex, directional: bool = False) -> Verdict:
    """Second-order sufficient condition for PQ-normality w.r.t. delta.

    Decided exactly on multiplier pieces that are single rays, where the
    premise set is {0} (vacuous) or a line (one LP). Other pieces leave the
    condition UNDECIDED: the min over blocks is not linear in lam.
    """
    inst.require_disjunctive()
    tag = "sosc" + ("dir" if directional else "") + _pqn_tag(inst, delta)
    n = inst.n
    cert, undecided = [], []
    if directional:
        work = [(c.multipliers, _class_directions(c)) for c in _active_classes(inst)]
    else:
        work = [(_lambda0(inst), None)]
    for ms, us in work:
        if not ms.has_nonzero:
            continue
        for piece in ms.pieces():
            if piece.v.lineality or len(piece.v.rays) != 1:
                if piece.v.rays or piece.v.lineality:
                    undecided.append("multiplier piece is not a single ray")
                continue
            r = primitive(piece.v.rays[0])
            try:
                blocks = _block_data(inst, r, delta)
            except InexactDerivative as exc:
                undecided.append(str(exc))
                continue
            rows = [row for _, row, _ in blocks if not is_zero(row)]
            if us is None:
                prem = nullspace(rows, n)
                if not prem:
                    cert.append({"lambda": list(r), "vacuous": True,
                                 "reason": "premise forces u = 0"})
                    continue
                if len(prem) > 1:
                    undecided.append(f"ray {list(r)}: premise subspace of dimension {len(prem)}")
                    continue
                cands = [primitive(prem[0])]
            else:
                cands = [u for u in us if all(dot(row, u) == 0 for row in rows)]
                if not cands:
                    cert.append({"lambda": list(r), "vacuous": True,
                                 "reason": "premise fails at the critical directions"})
                    continue
            for u0 in cands:
                st, val, w = _pqn_lp(blocks, u0, n)
                if st != HOLDS:
                    return Verdict(tag, FAILS, {"lp_value": val},
                                   _witness_rung(r, u0, w=list(w) if w is not None else None))
                cert.append({"lambda": list(r), "u": list(u0), "lp_value": val})
    if undecided:
        return Verdict(tag, UNDECIDED, {"checked": cert}, notes=undecided)
    if not cert:
        return _vacuous(tag, "no nonzero multiplier")
    return Verdict(tag, HOLDS, {"rays": cert})


def _pqn_tag(inst: GmpInstance, delta: MultiIndex) -> str:
    if delta == delta_p(inst.d):
        return "pn"
    if delta == delta_q(inst.d):
        return "qn"
    return f"pqn({','.join(map(str, delta.parts))})"


def check_pq_normality(inst: GmpInstance, delta: MultiIndex, directional: bool = False,
                       cfg: SearchConfig | None = None) -> Verdict:
    """PQ-normality w.r.t. delta.

    Pseudo-normality implies it outright, and a sequence violating the
    simplified blockwise condition violates it without further assumptions.
    Certifying it through SOSCPQN needs delta to be admissible; when neither
    route decides an inadmissible delta, AssumptionNotGuaranteed is raised.
    """
    gamma = inst.require_disjunctive()
    if delta.d != inst.d:
        raise ValueError(f"multi-index {delta} does not match dimension {inst.d}")
    if delta == delta_p(inst.d):
        return check_pseudo_normality(inst, directional, cfg)
    cfg = cfg or SearchConfig()
    name = ("dir_" if directional else "") + _pqn_tag(inst, delta)
    admissible = is_admissible(gamma, delta)
    notes = [] if admissible else [f"multi-index {delta} is not admissible for this set"]
    pn = check_pseudo_normality(inst, directional, cfg)
    if pn.holds:
        return Verdict(name, HOLDS, {"rung": "pseudo-normality", **pn.certificate}, notes=notes)
    if admissible:
        s = check_soscpqn(inst, delta, directional)
        if s.holds:
            return Verdict(name, HOLDS, {"rung": s.check, **s.certificate}, notes=notes)
        notes.append(f"{s.check}: {s.status}")
    if directional:
        searches = []
        for c in _active_classes(inst):
            rays, lins = multiplier_rays(c.multipliers)
            searches += [(g, u) for u in _class_directions(c) for g in _combos(rays, lins)]
    else:
        rays, lins = multiplier_rays(_lambda0(inst))
        searches = [(g, None) for g in _combos(rays, lins)]
    for g, u in searches:
        w = witness_search(inst, g, delta, u, cfg)
        if w is not None:
            return Verdict(name, FAILS, {"rung": "witness_search"}, w, notes, exact=w.exact)
    if not admissible:
        raise AssumptionNotGuaranteed(
            f"{name}: no violation found and multi-index {delta} is not admissible for this set")
    return Verdict(name, UNDECIDED, {}, None, notes + ["no violation found"])


def _combos(rays, lins) -> list[Vec]:
    gens = _signed(rays, lins)
    out = list(gens)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            s = tuple(a + b for a, b in zip(gens[i], gens[j]))
            if not is_zero(s):
                s = primitive(s)
                if s not in out:
                    out.append(s)
    return out


def ray_nd_check(inst: GmpInstance, rays: Sequence[Sequence]) -> Verdict:
    """Negative definiteness of ∇²<lam,F>(x̄) on R^n for user-supplied rays.

    Applies to any set, including oracle-only ones, but certifies nothing
    about MSCQ by itself: without the blockwise vanishing assumption the
    implication is not available.
    """
    cert = []
    for r in rays:
        r = vec(r)
        res = nsd_on_subspace(inst.hessian(r), [unit(inst.n, i) for i in range(inst.n)])
        cert.append({"lambda": list(r), "kind": res.kind})
        if res.kind != ND:
            return Verdict("soscpn_rays", FAILS, {"rays": cert}, _witness_rung(r, res.witness))
    return Verdict("soscpn_rays", HOLDS, {"rays": cert},
                   notes=["condition on supplied rays only; MSCQ not implied without the blockwise assumption"])


# --- implication closure --------------------------------------------------------------------

ARROWS = (
    ("gmfcq", "foscms"), ("gmfcq", "pn"), ("robinson", "pn"), ("soscpn", "pn"),
    ("soscpn", "soscdirpn"), ("soscdirpn", "dir_pn"), ("foscms", "soscms"), ("foscms", "dir_pn"),
    ("soscms", "mscq"), ("pn", "qn"), ("pn", "dir_pn"), ("qn", "dir_qn"), ("dir_pn", "dir_qn"),
    ("dir_qn", "mscq"), ("pn", "mscq"),
)
CONDITIONAL_ARROWS = (("soscqn", "qn"),)  # only when delta^Q is admissible

ROOT_ORDER = ("gmfcq", "robinson", "foscms", "soscpn", "soscms", "soscdirpn", "pn", "soscqn", "qn",
              "dir_pn", "dir_qn")
CHECK_ORDER = ("gmfcq", "robinson", "foscms", "soscms", "soscpn", "soscdirpn", "pn", "dir_pn",
               "soscqn", "qn", "dir_qn", "soscpn_rays", "mscq")


@dataclass
class CheckReport:
    verdicts: dict  # name -> Verdict, in CHECK_ORDER
    probe: object = None  # ProbeResult or None
    probe_notes: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    seed: int = 0


def _arrows(inst: GmpInstance) -> list[tuple[str, str]]:
    out = list(ARROWS)
    if not inst.is_analytic and is_admissible(inst.gamma, delta_q(inst.d)):
        out += list(CONDITIONAL_ARROWS)
    return out


def close_implications(verdicts: dict, arrows: Sequence[tuple[str, str]]) -> dict:
    """Propagate HOLDS forward and exact FAILS backward along the arrows.

    Derived verdicts name their source; an implied HOLDS meeting an exact
    FAILS raises InternalConsistencyError.
    """
    succ: dict[str, list[str]] = {}
    pred: dict[str, list[str]] = {}
    for a, b in arrows:
        succ.setdefault(a, []).append(b)
        pred.setdefault(b, []).append(a)
    computed = dict(verdicts)
    out = dict(verdicts)
    chains: dict[str, list[str]] = {}
    for root in ROOT_ORDER:
        if root not in computed or not computed[root].holds:
            continue
        queue, seen = [root], {root}
        while queue:
            a = queue.pop(0)
            for b in succ.get(a, []):
                if b in seen:
                    continue
                seen.add(b)
                cur = out.get(b)
                if cur is not None and cur.fails:
                    raise InternalConsistencyError(
                        f"{b} FAILS but is implied by {a} HOLDS (chain from {root})")
                chain = chains.get(a, [a])
                if cur is not None and cur.holds:
                    # pass through, so later nodes name the earliest root
                    chains.setdefault(b, chain + [b])
                    queue.append(b)
                    continue
                chains[b] = chain + [b]
                notes = list(cur.notes) if cur is not None else []
                out[b] = Verdict(b, HOLDS, {"chain": chains[b]}, None, notes, derived_from=a,
                                 exact=all(out[x].exact for x in chain))
                queue.append(b)
    changed = True
    while changed:
        changed = False
        for a, b in arrows:
            vb, va = out.get(b), out.get(a)
            if vb is not None and vb.fails and (va is None or va.status == UNDECIDED):
                notes = list(va.notes) if va is not None else []
                out[a] = Verdict(a, FAILS, {"contrapositive_of": b}, vb.witness, notes, derived_from=b,
                                 exact=vb.exact)
                changed = True
    return out


def _guard(name: str, fn: Callable[[], Verdict]) -> Verdict:
    try:
        return fn()
    except AnalyticGamma:
        return Verdict(name, UNDECIDED, notes=["set is oracle-only: exact cone work unavailable"])
    except AssumptionNotGuaranteed as exc:
        return Verdict(name, UNDECIDED, notes=[f"AssumptionNotGuaranteed: {exc}"])
    except (OrderCap, InexactDerivative) as exc:
        return Verdict(name, UNDECIDED, notes=[str(exc)])


def check_all(inst: GmpInstance, budget: int = 20000, seed: int = 0, probe: bool = True,
              user_rays: Sequence[Sequence] | None = None, probe_cfg: ProbeConfig | None = None,
              clock: Callable[[], float] | None = None) -> CheckReport:
    """Run every applicable check, close under the implication arrows and attach the probe."""
    import time
    clock = clock or time.perf_counter
    cfg = SearchConfig(max_paths=budget)
    dq = delta_q(inst.d)
    plan = {
        "gmfcq": lambda: check_gmfcq(inst),
        "robinson": lambda: (inst.require_disjunctive(), rung_robinson(inst))[1],
        "foscms": lambda: check_foscms(inst),
        "soscms": lambda: check_soscms(inst, seed),
        "soscpn": lambda: rung_mth_osc(inst, 2),
        "soscdirpn": lambda: _rename(check_soscms(inst, seed), "soscdirpn",
                                     "coincides with SOSCMS for disjunctive sets"),
        "pn": lambda: check_pseudo_normality(inst, False, cfg),
        "dir_pn": lambda: check_pseudo_normality(inst, True, cfg),
        "soscqn": lambda: _rename(check_soscpqn(inst, dq), "soscqn"),
        "qn": lambda: _rename(check_pq_normality(inst, dq, False, cfg), "qn"),
        "dir_qn": lambda: _rename(check_pq_normality(inst, dq, True, cfg), "dir_qn"),
    }
    verdicts, timings = {}, {}
    for name, fn in plan.items():
        t0 = clock()
        verdicts[name] = _guard(name, fn)
        timings[name] = clock() - t0
    user_rays = inst.user_rays if user_rays is None else user_rays
    if user_rays:
        verdicts["soscpn_rays"] = _guard("soscpn_rays", lambda: ray_nd_check(inst, user_rays))
    verdicts["mscq"] = Verdict("mscq", UNDECIDED, exact=False)
    closed = close_implications(verdicts, [] if inst.is_analytic else _arrows(inst))
    report = CheckReport({k: closed[k] for k in CHECK_ORDER if k in closed}, seed=seed, timings=timings)
    if probe:
        t0 = clock()
        pcfg = probe_cfg or ProbeConfig(seed=seed)
        try:
            report.probe = mscq_probe(inst, pcfg)
        except EmptyPool as exc:
            report.probe_notes.append(f"EmptyPool: {exc}")
        timings["probe"] = clock() - t0
    m = report.verdicts["mscq"]
    if not m.holds:
        note = f"probe: {report.probe.verdict}" if report.probe is not None else "probe unavailable"
        m.notes.append(note)
    elif report.probe is not None and report.probe.verdict == "DIVERGENCE_SUSPECTED":
        m.notes.append("probe suggests divergence although MSCQ is implied; check the sampling setup")
    return report


def _rename(v: Verdict, name: str, note: str | None = None) -> Verdict:
    v.check = name
    if note:
        v.notes.append(note)
    return v


def run_request(inst: GmpInstance, req: CheckRequest) -> dict:
    """Run the checks named in a request; ``all`` dispatches to check_all."""
    cfg = SearchConfig(max_paths=req.budget)
    delta = req.delta
    table = {
        "gmfcq": lambda: check_gmfcq(inst),
        "foscms": lambda: check_foscms(inst),
        "soscms": lambda: check_soscms(inst, req.seed),
        "soscpn": lambda: rung_mth_osc(inst, 2),
        "pn": lambda: check_pseudo_normality(inst, req.directional, cfg),
        "qn": lambda: check_pq_normality(inst, delta or delta_q(inst.d), req.directional, cfg),
        "pqn": lambda: check_pq_normality(inst, delta or delta_p(inst.d), req.directional, cfg),
        "soscqn": lambda: _rename(check_soscpqn(inst, delta or delta_q(inst.d), req.directional), "soscqn"),
        "soscpqn": lambda: check_soscpqn(inst, delta or delta_p(inst.d), req.directional),
        "robinson": lambda: rung_robinson(inst),
    }
    out = {}
    for name in req.which:
        if name not in table:
            raise ValueError(f"unknown check '{name}'; choose from {', '.join(sorted(table))} or all")
        out[name] = table[name]()
    return out
