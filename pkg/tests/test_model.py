"""Maps, derivatives, prototypes, multi-indices and the problem-file loader."""
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from cqlab.errors import (ExpressionSyntaxError, InexactDerivative, InfeasiblePoint, OrderCap,
                          ProblemFileError, UnknownFunction)
from cqlab.model import (MultiIndex, build_map, delta_p, delta_q, is_admissible, load_problem_text,
                         make_instance, prototype_set)
from cqlab.model.expr import interval_mid, interval_rad, iv_precision, parse_ast, taylor2
from cqlab.model.maps import ExpressionMap, PolynomialMap, parse_expression
from cqlab.model.multiindex import admissible_multi_indices, finest_admissible, refine, support
from cqlab.sets import cone_set, product_set

X1, X2 = sympy.symbols("x1 x2")


# --- parsing -------------------------------------------------------------------------------

def test_polynomial_source_is_lowered():
    f = parse_expression("x1 + x1^2", 1)
    assert isinstance(f, PolynomialMap)
    assert f.components[0].coeffs == {(1,): 1, (2,): 1}


def test_transcendental_source_stays_expression():
    assert isinstance(parse_expression("sin(x1)", 1), ExpressionMap)


def test_syntax_error_offset():
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse_expression("x1 + + 2", 1)
    assert exc.value.offset == 5


def test_unknown_function():
    with pytest.raises(UnknownFunction):
        parse_expression("tan(x1)", 1)


def test_rational_literals_exact():
    f = parse_expression("1/3*x1 - 2/7", 1)
    assert f.exact_value([Fraction(3)]) == (Fraction(5, 7),)


# --- derivatives against a symbolic oracle ----------------------------------------------------

def _sym(src):
    return sympy.sympify(src.replace("^", "**"), locals={"x1": X1, "x2": X2})


POLY_SOURCES = ["x1 - x1^2*x2 + 3*x2^4", "2/3*x1^3 - x2^2 + x1*x2", "(x1 + x2)^3 - 5"]


def test_jacobian_hessian_match_sympy():
    F = build_map(POLY_SOURCES, 2)
    rng = random.Random(0)
    for _ in range(20):
        x0 = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(2)]
        lam = [rng.randint(-2, 2) for _ in range(3)]
        subs = {X1: sympy.Rational(x0[0]), X2: sympy.Rational(x0[1])}
        jac = F.jacobian(x0)
        for i, s in enumerate(POLY_SOURCES):
            e = _sym(s)
            for j, v in enumerate((X1, X2)):
                assert jac[i][j] == Fraction(str(sympy.diff(e, v).subs(subs)))
        scal = sum(l * _sym(s) for l, s in zip(lam, POLY_SOURCES))
        hess = F.hessian_scalarized(lam, x0)
        for i, vi in enumerate((X1, X2)):
            for j, vj in enumerate((X1, X2)):
                assert hess[i][j] == Fraction(str(sympy.diff(scal, vi, vj).subs(subs)))


def test_quartic_family_derivatives():
    a, b, c, d = 2, -1, 3, 5
    F = build_map(["x1", "x2", f"{a}*x1^2 + ({b})*x1^4 + {c}*x2^2 + {d}*x2^4"], 2)
    assert F.jacobian([0, 0]) == ((1, 0), (0, 1), (0, 0))
    lam = (0, 0, Fraction(1, 2))
    assert F.hessian_scalarized(lam, [0, 0]) == ((2 * lam[2] * a, 0), (0, 2 * lam[2] * c))
    assert F.higher_partial((0, 0, 1), (4, 0), [0, 0]) == 24 * b


def test_example_jacobian():
    assert build_map(["x1", "-x1^2"], 1).jacobian([0]) == ((1,), (0,))


def test_polynomial_and_expression_paths_agree():
    rng = random.Random(1)
    for _ in range(100):
        src = [f"{rng.randint(-3, 3)}*x1^{rng.randint(0, 3)}*x2^{rng.randint(0, 2)} + x1*x2 - {rng.randint(0, 4)}"
               for _ in range(2)]
        poly = build_map(src, 2)
        expr = ExpressionMap([parse_ast(s, 2)[0] for s in src], 2)
        x0 = [Fraction(rng.randint(-6, 6), rng.randint(1, 5)) for _ in range(2)]
        lam = [rng.randint(-3, 3) for _ in range(2)]
        assert poly.exact_value(x0) == expr.exact_value(x0)
        assert poly.jacobian(x0) == expr.jacobian(x0)
        assert poly.hessian_scalarized(lam, x0) == expr.hessian_scalarized(lam, x0)


EXPR_SOURCES = ["sin(x1)*x2 + exp(x1*x2)", "cos(x1^2 - x2) + x1^3"]


@pytest.mark.parametrize("src", EXPR_SOURCES)
def test_expression_enclosures_contain_true_derivatives(src):
    ast, _ = parse_ast(src, 2)
    e = _sym(src)
    rng = random.Random(2)
    for _ in range(10):
        x0 = [Fraction(rng.randint(-8, 8), 7) for _ in range(2)]
        t = taylor2(ast, x0)
        subs = {X1: sympy.Rational(x0[0]), X2: sympy.Rational(x0[1])}
        for j, v in enumerate((X1, X2)):
            with mpmath.workprec(160), iv_precision(160):
                true = mpmath.mpf(str(sympy.diff(e, v).subs(subs).evalf(45)))
                g = t.grad[j]
                if isinstance(g, Fraction):
                    assert abs(true - mpmath.mpf(g.numerator) / g.denominator) < mpmath.mpf(10) ** -30
                else:
                    assert true in g
                    assert interval_rad(g) < 1e-25


def test_expression_derivatives_finite_difference_order():
    F = build_map(EXPR_SOURCES, 2)
    x0 = [Fraction(1, 3), Fraction(-1, 2)]
    ts = [taylor2(parse_ast(s, 2)[0], x0) for s in EXPR_SOURCES]
    xf = np.array([float(v) for v in x0])
    for i, t in enumerate(ts):
        for j in range(2):
            exact = interval_mid(t.grad[j]) if not isinstance(t.grad[j], Fraction) else float(t.grad[j])
            errs = []
            for h in (1e-3, 1e-4):
                e = np.eye(2)[j] * h
                fd = (F.eval_many(xf + e)[0, i] - F.eval_many(xf - e)[0, i]) / (2 * h)
                errs.append(abs(fd - exact))
                assert errs[-1] <= 10 * h * h * (1 + abs(exact)) + 1e-9
            assert errs[1] <= errs[0] + 1e-10


def test_expression_order_cap_and_inexact_values():
    F = build_map(["sin(x1)"], 1)
    with pytest.raises(OrderCap):
        F.higher_partial([1], [3], [0])
    with pytest.raises(InexactDerivative):
        F.exact_value([1])
    assert F.jacobian([0]) == ((1,),)


# --- prototypes and multi-indices ----------------------------------------------------------

def _pieces(g):
    return {tuple(p.intervals()) for p in g.pieces}


def test_prototype_pieces():
    inf = None
    assert _pieces(prototype_set("CC")) == {((0, inf), (0, 0)), ((0, 0), (0, inf))}
    assert _pieces(prototype_set("SC")) == {((inf, inf), (0, 0)), ((0, 0), (inf, inf))}
    assert _pieces(prototype_set("rCC")) == {((inf, inf), (0, 0)), ((0, 0), (0, 1))}
    assert _pieces(prototype_set("VC")) == {((inf, 0), (0, inf)), ((0, inf), (0, 0))}
    nlp = prototype_set("NLP", r=1, d=3)
    assert _pieces(nlp) == {((0, 0), (inf, 0), (inf, 0))}
    for kind in ("CC", "VC", "rCC", "rPC", "SC"):
        assert prototype_set(kind, 3).ortho_flag
        assert prototype_set(kind, 3).dim == 6


def test_admissible_multi_indices():
    cc = prototype_set("CC")
    assert set(admissible_multi_indices(cc)) >= {delta_p(2), delta_q(2)}
    halfplane = cone_set([((), ((1, -1),))], 2)
    assert admissible_multi_indices(halfplane) == [delta_p(2)]
    assert not is_admissible(halfplane, delta_q(2))
    mixed = product_set(cc, cone_set([((), ((1, -1), (-1, -1)))], 2))
    assert finest_admissible(mixed) == MultiIndex((1, 1, 2))
    assert is_admissible(mixed, MultiIndex((2, 2)))
    assert not is_admissible(mixed, MultiIndex((1, 1, 1, 1)))


def test_admissible_is_closed_under_coarsening():
    from cqlab.model.multiindex import coarsenings
    g = product_set(prototype_set("VC", 2), cone_set([((), ((1, 1),))], 2))
    fine = finest_admissible(g)
    for c in coarsenings(fine):
        assert is_admissible(g, c)


def test_refinement_and_support():
    assert refine(MultiIndex((1, 3, 1, 1, 1)), MultiIndex((1, 4, 2)))
    assert not refine(MultiIndex((2, 2, 3)), MultiIndex((1, 4, 2)))
    d = MultiIndex((2, 1))
    assert refine(delta_q(3), d) and refine(d, delta_p(3))
    assert support(MultiIndex((1, 1)), (0, -1)) == [2]


# --- instances and problem files -------------------------------------------------------------

def test_infeasible_point_rejected():
    with pytest.raises(InfeasiblePoint):
        make_instance(["x1 + 1", "x1 + 1"], prototype_set("CC"), ["0"])


PROBLEM = """
[problem]
n = 1
d = 2
[map]
components = ["x1", "-x1^2"]
[gamma]
pieces = [{ ineq = [[1, -1, 0], [-1, -1, "0/1"]] }]
[point]
x = ["0"]
"""


def test_problem_file_round_trip():
    inst = load_problem_text(PROBLEM, "p")
    assert inst.n == 1 and inst.d == 2 and inst.point == (0,)
    assert inst.summary()["gamma_class"] == "disjunctive"


@pytest.mark.parametrize("mutation,needle", [
    (lambda s: s.replace("[point]\nx = [\"0\"]", ""), "[point]"),
    (lambda s: s.replace("d = 2", "d = 3"), "components"),
    (lambda s: s.replace("[1, -1, 0]", "[1, -1]"), "coefficients"),
    (lambda s: s.replace("[problem]", "[problem"), "parse"),
])
def test_problem_file_errors(mutation, needle):
    with pytest.raises(ProblemFileError) as exc:
        load_problem_text(mutation(PROBLEM))
    assert needle in str(exc.value)


def test_monomial_tables():
    text = PROBLEM.replace('components = ["x1", "-x1^2"]', 'tables = [{ "1" = 1 }, { "2" = "-1" }]')
    inst = load_problem_text(text)
    assert inst.F.exact_value([Fraction(1, 2)]) == (Fraction(1, 2), Fraction(-1, 4))
