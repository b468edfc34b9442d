"""Distances, feasible-set estimates, the error-bound probe, witness search and penalties."""
import math
import random
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog, minimize

from cqlab.errors import MissingObjective
from cqlab.fixtures import fixtures, get_fixture
from cqlab.model import build_map, delta_p, delta_q, make_instance, prototype_set
from cqlab.oracle.distance import FloatDistance, distance_to_gamma
from cqlab.oracle.probe import (BOUNDED, DIVERGENCE_SUSPECTED, ProbeConfig, composed_distance,
                                feasible_distance_estimate, feasible_distance_function, mpcc_penalty_closed_form,
                                mscq_probe, penalty_probe)
from cqlab.oracle.witness import reverify, witness_search
from cqlab.sets import cone_set

from helpers import random_disjunctive_set


def load(name):
    return get_fixture(name).load()


# --- distance to the set --------------------------------------------------------------------------

def test_distance_examples():
    cc = prototype_set("CC")
    assert distance_to_gamma(cc, (3, 4), squared=True) == 9
    assert distance_to_gamma(cc, (3, 4)) == 3
    assert distance_to_gamma(cc, (0, 7)) == 0
    upper = cone_set([((), ((1, -1),))], 2)  # y2 >= y1
    assert distance_to_gamma(upper, (1, 0), squared=True) == Fraction(1, 2)
    assert math.isclose(distance_to_gamma(upper, (1, 0)), 1 / math.sqrt(2))


def _distinct_sets():
    seen, out = set(), []
    for name in fixtures():
        inst = load(name)
        if inst.is_analytic:
            continue
        key = repr(inst.gamma.pieces)
        if key not in seen:
            seen.add(key)
            out.append((name, inst.gamma, inst.ybar))
    return out


@pytest.mark.parametrize("name,gamma,ybar", _distinct_sets(), ids=lambda v: v if isinstance(v, str) else "")
def test_zero_distance_iff_member(name, gamma, ybar):
    rng = random.Random(11)
    members = 0
    for _ in range(10_000):
        # small denominators put many samples on faces and edges
        y = [yb + Fraction(rng.randint(-4, 4), rng.choice([1, 2, 4])) * (rng.random() < 0.8) for yb in ybar]
        inside = gamma.contains(y)
        members += inside
        assert (distance_to_gamma(gamma, y, squared=True) == 0) == inside
    assert 0 < members < 10_000


def _qp_distance(p, y):
    """Independent float projection onto one piece."""
    A = np.array([[float(x) for x in a] for a, _ in p.ineqs]).reshape(-1, p.dim)
    b = np.array([float(x) for _, x in p.ineqs])
    E = np.array([[float(x) for x in a] for a, _ in p.eqs]).reshape(-1, p.dim)
    e = np.array([float(x) for _, x in p.eqs])
    cons = []
    if len(b):
        cons.append({"type": "ineq", "fun": lambda z: b - A @ z, "jac": lambda z: -A})
    if len(e):
        cons.append({"type": "eq", "fun": lambda z: E @ z - e, "jac": lambda z: E})
    y = np.array(y, float)
    res = minimize(lambda z: ((z - y) ** 2).sum(), np.zeros(p.dim), jac=lambda z: 2 * (z - y),
                   constraints=cons, method="SLSQP", options={"ftol": 1e-14, "maxiter": 500})
    return math.sqrt(((res.x - y) ** 2).sum())


def _lp_distance(p, y, norm):
    """Independent l1 / linf distance to one piece via an LP in (z, s)."""
    d = p.dim
    y = np.array(y, float)
    if norm == "linf":  # vars z (d), s (1); |z_i - y_i| <= s
        c = np.r_[np.zeros(d), 1.0]
        rows = [np.r_[np.eye(d)[i], -1.0] for i in range(d)] + [np.r_[-np.eye(d)[i], -1.0] for i in range(d)]
        rhs = list(y) + list(-y)
    else:  # vars z (d), s (d); |z_i - y_i| <= s_i
        c = np.r_[np.zeros(d), np.ones(d)]
        rows = [np.r_[np.eye(d)[i], -np.eye(d)[i]] for i in range(d)] + \
               [np.r_[-np.eye(d)[i], -np.eye(d)[i]] for i in range(d)]
        rhs = list(y) + list(-y)
    extra = len(c) - d
    for a, bb in p.ineqs:
        rows.append(np.r_[[float(x) for x in a], np.zeros(extra)])
        rhs.append(float(bb))
    a_eq = [np.r_[[float(x) for x in a], np.zeros(extra)] for a, _ in p.eqs] or None
    b_eq = [float(x) for _, x in p.eqs] or None
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * len(c), method="highs-ds", options={"presolve": False})
    return res.fun


def test_distance_agrees_with_independent_projection():
    rng = random.Random(5)
    for s in range(60):
        g = random_disjunctive_set(s)
        fd = FloatDistance(g)
        for _ in range(5):
            y = [Fraction(rng.randint(-9, 9), 3) for _ in range(g.dim)]
            want = min(_qp_distance(p, y) for p in g.pieces)
            got = distance_to_gamma(g, y)
            assert abs(got - want) < 1e-5, (s, y)
            assert abs(fd(np.array([[float(v) for v in y]]))[0] - got) < 1e-9
            for norm in ("l1", "linf"):
                want = min(_lp_distance(p, y, norm) for p in g.pieces)
                assert abs(float(distance_to_gamma(g, y, norm)) - want) < 1e-7, (s, y, norm)


# --- feasible-set distance --------------------------------------------------------------------

def test_feasible_distance_overrides():
    assert math.isclose(feasible_distance_estimate(load("ex34"), [0.1]), 0.1)
    assert feasible_distance_estimate(load("ex34"), [-0.1]) == 0
    assert math.isclose(feasible_distance_estimate(load("ex32"), [0.01]), 0.01)


def test_feasible_distance_pool():
    inst = load("mpcc_demo")  # X = [0, inf) x {0}, no override: grid pool
    assert inst.feasible_distance is None
    cfg = ProbeConfig()
    assert feasible_distance_estimate(inst, [0.25, 0], cfg) == 0
    for x in ([-0.1, 0.2], [0.3, -0.05], [0.01, 0.01]):
        true = math.hypot(min(x[0], 0), x[1])
        assert abs(feasible_distance_estimate(inst, x, cfg) - true) <= cfg.feasible_pool_resolution


# --- MSCQ probe ------------------------------------------------------------------------------------

@pytest.fixture(scope="module")
def probes():
    return {n: mscq_probe(load(n), ProbeConfig(seed=0)) for n in ("ex31", "ex32", "ex34", "ex33")}


def test_probe_examples(probes):
    assert probes["ex31"].verdict == BOUNDED and probes["ex31"].kappa <= 4
    assert probes["ex33"].verdict == BOUNDED
    assert probes["ex32"].verdict == DIVERGENCE_SUSPECTED and -0.65 <= probes["ex32"].slope <= -0.35
    assert probes["ex34"].verdict == DIVERGENCE_SUSPECTED and -2.5 <= probes["ex34"].slope <= -1.5


def test_probe_is_deterministic(probes):
    again = mscq_probe(load("ex32"), ProbeConfig(seed=0))
    assert again.to_dict() == probes["ex32"].to_dict()


def test_probe_kappa_bounds_ratios(probes):
    for res in probes.values():
        if res.verdict == BOUNDED:
            assert all(r is None or r <= res.kappa for r in res.ratios)


def test_probe_witness_reproduces_ratios(probes):
    for name in ("ex32", "ex34"):
        inst = load(name)
        d_x = feasible_distance_function(inst, ProbeConfig())
        for r, x, q in probes[name].witness:
            x = np.array([x], float)
            assert np.all(np.isfinite(x)) and np.linalg.norm(x - 0) <= r * (1 + 1e-12)
            ratio = d_x(x)[0] / composed_distance(inst, x, "l2")[0]
            assert math.isclose(ratio, q, rel_tol=1e-9)


def test_probe_radii_decrease():
    r = ProbeConfig().radii
    assert r[0] == 0.5 and len(r) == 21 and np.all(np.diff(r) < 0)


# --- witness search -------------------------------------------------------------------------------

def test_search_example33():
    inst = load("ex33")
    w = witness_search(inst, (1, 1), delta_p(2))
    assert w is not None and reverify(inst, w) and len(w.points) >= 3
    for x, vals in zip(w.points, w.values):
        assert vals[0] == Fraction(x[0]) ** 2 > 0
    assert witness_search(inst, (1, 1), delta_q(2)) is None


def test_search_example31_scalar_blocks():
    inst = load("ex31")
    w = witness_search(inst, (0, -1), delta_q(2))
    assert w is not None and reverify(inst, w) and w.blocks == [2]
    for x, vals in zip(w.points, w.values):
        assert vals[0] == Fraction(x[0]) ** 2


def test_search_on_expression_map():
    inst = load("ex34")  # F = (x, sin x) into {y1 <= y2}; lam = (1, -1)
    w = witness_search(inst, (1, -1), delta_p(2))
    assert w is not None and not w.exact and reverify(inst, w)
    for x in w.points:
        x = float(x[0])
        assert x - math.sin(x) > 0


# --- penalty probe ----------------------------------------------------------------------------------

def test_penalty_exact_when_objective_dominates():
    inst = replace(load("ex31"), objective=build_map(["x1^2"], 1))
    rep = penalty_probe(inst)
    assert rep.exact_alpha == 1.0


def test_penalty_needs_objective():
    with pytest.raises(MissingObjective):
        penalty_probe(load("ex31"))


def test_mpcc_penalty_closed_form_matches_generic():
    cc2 = prototype_set("CC", 2)
    rng = random.Random(3)
    for _ in range(1000):
        y = [Fraction(rng.randint(-20, 20), rng.randint(1, 6)) for _ in range(4)]
        assert distance_to_gamma(cc2, y, "l1_linf") == mpcc_penalty_closed_form(y)
    t = Fraction(3, 7)
    assert distance_to_gamma(prototype_set("CC"), (t, t), "l1_linf") == t == mpcc_penalty_closed_form((t, t))


def test_mpcc_penalty_through_the_map():
    inst = make_instance(["x1 - x2^2", "x2 + x1*x2", "x1^2 - x2", "x2"], prototype_set("CC", 2), ["0", "0"],
                         objective="x1 + x2")
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.5, 0.5, (200, 2))
    generic = composed_distance(inst, x, "l1_linf")
    closed = [float(mpcc_penalty_closed_form([Fraction(v) for v in row])) for row in inst.F.eval_many(x)]
    assert np.allclose(generic, closed, rtol=0, atol=1e-12)
    rep = penalty_probe(inst, norm="l1_linf", cfg=ProbeConfig(samples_per_radius=64, levels=10))
    assert len(rep.margins) == 11 and rep.norm == "l1_linf"
