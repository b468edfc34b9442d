"""Hypothesis property tests for invariants of the distance, multiplier and closure layers."""
from fractions import Fraction

from hypothesis import assume, given, settings, strategies as st

from cqlab.checks import ARROWS, FAILS, HOLDS, Verdict, close_implications
from cqlab.kernel.linalg import fmt_rational
from cqlab.multipliers import lambda0, lambda0_directional
from cqlab.oracle.distance import distance_to_gamma

from helpers import random_disjunctive_set, random_instance

seeds = st.integers(0, 10_000)
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


@given(rationals)
def test_rational_format_round_trips(q):
    assert Fraction(fmt_rational(q)) == q


@settings(max_examples=80, deadline=None)
@given(seeds, st.lists(rationals, min_size=3, max_size=3))
def test_distance_vanishes_exactly_on_the_set(seed, y):
    g = random_disjunctive_set(seed)
    y = y[:g.dim]
    d2 = distance_to_gamma(g, y, squared=True)
    assert d2 >= 0 and (d2 == 0) == g.contains(y)


@settings(max_examples=80, deadline=None)
@given(seeds, st.lists(rationals, min_size=3, max_size=3), st.lists(rationals, min_size=3, max_size=3))
def test_distance_is_one_lipschitz(seed, y, z):
    g = random_disjunctive_set(seed)
    y, z = y[:g.dim], z[:g.dim]
    for norm in ("l1", "linf"):
        gap = abs(distance_to_gamma(g, y, norm) - distance_to_gamma(g, z, norm))
        step = sum(abs(a - b) for a, b in zip(y, z)) if norm == "l1" else max(abs(a - b) for a, b in zip(y, z))
        assert gap <= step


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 200), st.lists(st.integers(-5, 5), min_size=2, max_size=2),
       st.fractions(min_value=Fraction(1, 10), max_value=10))
def test_directional_multipliers_form_a_cone_inside_the_point_cone(seed, u, t):
    inst = random_instance(seed)
    u = u[:inst.n]
    assume(any(u))
    base = lambda0(inst)
    dirs = lambda0_directional(inst, u)
    for g in dirs.generators():
        assert base.cone.contains(g)
        assert dirs.cone.contains([t * x for x in g])
    assert lambda0_directional(inst, [t * x for x in u]).describe() == dirs.describe()


NODES = sorted({a for a, _ in ARROWS} | {b for _, b in ARROWS})


def _closed_truth(raw):
    """Smallest arrow-closed set containing the chosen nodes."""
    truth = set(raw)
    changed = True
    while changed:
        changed = False
        for a, b in ARROWS:
            if a in truth and b not in truth:
                truth.add(b)
                changed = True
    return truth


@given(st.sets(st.sampled_from(NODES)), st.sets(st.sampled_from(NODES)))
def test_closure_agrees_with_every_consistent_world(raw, revealed):
    truth = _closed_truth(raw)
    given_ = {n: Verdict(n, HOLDS if n in truth else FAILS) for n in revealed}
    out = close_implications(given_, ARROWS)
    for n, v in out.items():
        if v.holds:
            assert n in truth
        if v.fails:
            assert n not in truth
    for a, b in ARROWS:
        if a in out and out[a].holds:
            assert b in out and out[b].holds
        if b in out and out[b].fails:
            assert a in out and out[a].fails
