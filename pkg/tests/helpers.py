"""Seeded generators shared by the property suites."""
import random
from fractions import Fraction

from cqlab.sets import DisjunctiveSet, HPoly


def random_disjunctive_set(seed: int, max_dim: int = 3, max_pieces: int = 3, max_rows: int = 4):
    """Union of polyhedra in R^d, every piece with small integer data.

    The first piece always contains the origin, so y = 0 lies in the set.
    Some later pieces may miss the origin (inactive there).
    """
    rng = random.Random(seed)
    d = rng.randint(1, max_dim)
    pieces = []
    for k in range(rng.randint(1, max_pieces)):
        rows = []
        for _ in range(rng.randint(1, max_rows)):
            a = [rng.randint(-2, 2) for _ in range(d)]
            if not any(a):
                a[rng.randrange(d)] = 1
            b = 0 if k == 0 else rng.choice([0, 0, 1, -1])
            if k == 0 and rng.random() < 0.3:
                b = 1
            rows.append((tuple(a), b))
        eqs = ()
        if d > 1 and len(rows) > 1 and rng.random() < 0.2:
            a, b = rows.pop()
            eqs = ((a, 0 if k == 0 else b),)
        pieces.append(HPoly(d, eqs, tuple(rows)))
    pieces = [p for p in pieces if _nonempty(p)]
    return DisjunctiveSet(tuple(pieces), f"random{seed}")


def _nonempty(p: HPoly) -> bool:
    from cqlab.kernel.lp import INFEASIBLE, linprog_exact
    a_eq = [list(a) for a, _ in p.eqs]
    b_eq = [b for _, b in p.eqs]
    a_ub = [list(a) for a, _ in p.ineqs]
    b_ub = [b for _, b in p.ineqs]
    return linprog_exact([0] * p.dim, a_ub, b_ub, a_eq, b_eq, nvars=p.dim).status != INFEASIBLE


def int_grid(dim: int, k: int):
    from itertools import product
    return [tuple(Fraction(v) for v in w) for w in product(range(-k, k + 1), repeat=dim)]


def random_polynomial_source(rng: random.Random, n: int, max_deg: int = 4) -> str:
    """Polynomial vanishing at 0; the linear part is often zero so that
    multipliers survive the kernel condition."""
    from itertools import product
    terms = []
    for alpha in product(range(max_deg + 1), repeat=n):
        deg = sum(alpha)
        if deg == 0 or deg > max_deg:
            continue
        p = 0.3 if deg == 1 else (0.5 if deg == 2 else 0.2)
        if rng.random() >= p:
            continue
        c = rng.choice([-2, -1, 1, 2])
        mono = "*".join(f"x{i + 1}^{e}" for i, e in enumerate(alpha) if e)
        terms.append(f"({c})*{mono}")
    return " + ".join(terms) if terms else "0"


def random_instance(seed: int, max_n: int = 2):
    """Polynomial F with F(0) = 0 into a random union of polyhedra containing 0."""
    from cqlab.model import make_instance
    rng = random.Random(10_000 + seed)
    gamma = random_disjunctive_set(seed, max_dim=3)
    n = rng.randint(1, max_n)
    comps = [random_polynomial_source(rng, n) for _ in range(gamma.dim)]
    return make_instance(comps, gamma, ["0"] * n, name=f"rand{seed}")


# --- symbolic oracle ---------------------------------------------------------------------

def sym_components(inst):
    """The components of F as sympy expressions in x1..xn."""
    import sympy
    xs = sympy.symbols(" ".join(f"x{i + 1}" for i in range(inst.n)), seq=True)
    env = {f"x{i + 1}": x for i, x in enumerate(xs)}
    return [sympy.sympify(s.replace("^", "**"), locals=env) for s in inst.F.sources], xs


def sym_rational(v):
    import sympy
    return sympy.Rational(Fraction(v).numerator, Fraction(v).denominator)


def directional_coefficient(inst, lam, u, q):
    """Coefficient of t^q in <lam, F(x̄ + t u)>, computed symbolically."""
    import sympy
    comps, xs = sym_components(inst)
    t = sympy.Symbol("t")
    subs = {x: sym_rational(xb) + t * sym_rational(ui) for x, xb, ui in zip(xs, inst.point, u)}
    s = sum(sym_rational(l) * c.subs(subs) for l, c in zip(lam, comps))
    poly = sympy.series(s, t, 0, q + 1).removeO()
    return Fraction(str(sympy.expand(poly).coeff(t, q)))


def block_value(inst, lam, idx, x):
    """<lam_idx, F_idx(x) - F_idx(x̄)> as an exact sympy number."""
    comps, xs = sym_components(inst)

    def at(p):
        return {xv: sym_rational(v) for xv, v in zip(xs, p)}

    return sum(sym_rational(lam[i]) * (comps[i].subs(at(x)) - comps[i].subs(at(inst.point))) for i in idx)


# acceptance results, filled by test_acceptance and printed by the terminal summary hook
ACCEPTANCE: dict = {}
