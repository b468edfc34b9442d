"""GMP instances, prototype sets and the problem-file loader."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..errors import AnalyticGamma, InfeasiblePoint, MissingObjective, ProblemFileError
from ..kernel.linalg import frac, vec
from ..sets import DisjunctiveSet, HPoly, box, power_set, product_set
from .analytic import ANALYTIC_SETS, feasible_distance_factory
from .maps import SmoothMap, build_map, polynomial_map_from_tables

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib


# --- prototypes ------------------------------------------------------------------

def _nlp(r: int, d: int) -> DisjunctiveSet:
    return DisjunctiveSet((box([(0, 0)] * r + [(None, 0)] * (d - r)),), f"NLP({r},{d})")


_PROTOTYPES = {
    "CC": lambda: DisjunctiveSet((box([(0, None), (0, 0)]), box([(0, 0), (0, None)])), "CC"),
    "VC": lambda: DisjunctiveSet((box([(None, 0), (0, None)]), box([(0, None), (0, 0)])), "VC"),
    "rCC": lambda: DisjunctiveSet((box([(None, None), (0, 0)]), box([(0, 0), (0, 1)])), "rCC"),
    "rPC": lambda: DisjunctiveSet((box([(None, 0), (0, 1)]), box([(0, None), (0, 0)])), "rPC"),
    "SC": lambda: DisjunctiveSet((box([(None, None), (0, 0)]), box([(0, 0), (None, None)])), "SC"),
}


def prototype_set(kind: str, copies: int = 1, r: int | None = None, d: int | None = None) -> DisjunctiveSet:
    """Standard complementarity-type sets; NLP(r, d) = {0}^r x R_-^(d-r)."""
    if kind.upper() == "NLP":
        if r is None or d is None or not 0 <= r <= d:
            raise ValueError("NLP needs 0 <= r <= d")
        base = _nlp(r, d)
    elif kind in _PROTOTYPES:
        base = _PROTOTYPES[kind]()
    else:
        raise ValueError(f"unknown prototype '{kind}'")
    return power_set(base, copies, f"{base.name}^{copies}" if copies > 1 else base.name)


# --- instance ------------------------------------------------------------------------

@dataclass
class GmpInstance:
    """min f(x) s.t. F(x) in Gamma at the reference point x̄."""
    F: SmoothMap
    gamma: object  # DisjunctiveSet or AnalyticSet
    point: tuple
    objective: SmoothMap | None = None
    name: str = ""
    feasible_distance: Callable | None = field(default=None, repr=False)
    feasible_set_name: str | None = None
    description: str = ""
    user_rays: tuple = ()  # multiplier rays supplied for oracle-only sets

    def __post_init__(self):
        self.point = vec(self.point)
        self.user_rays = tuple(vec(r) for r in self.user_rays)
        if len(self.point) != self.F.n:
            raise ValueError("point dimension does not match the map")
        if self.F.d != self.gamma.dim:
            raise ValueError("map range dimension does not match the set")
        if self.objective is not None and (self.objective.d != 1 or self.objective.n != self.F.n):
            raise ValueError("objective must be a scalar map on the same domain")
        if self.is_analytic:
            y = self.F.eval_many(np.array([[float(v) for v in self.point]]))
            if not self.gamma.contains_float(y[0]):
                raise InfeasiblePoint("F(x̄) is not in the set")
        elif not self.gamma.contains(self.ybar):
            raise InfeasiblePoint("F(x̄) is not in the set")

    @property
    def n(self) -> int:
        return self.F.n

    @property
    def d(self) -> int:
        return self.F.d

    @property
    def is_analytic(self) -> bool:
        return getattr(self.gamma, "is_analytic", False)

    def require_disjunctive(self) -> DisjunctiveSet:
        if self.is_analytic:
            raise AnalyticGamma(f"set '{self.gamma.name}' is oracle-only; exact checks are unavailable")
        return self.gamma

    @cached_property
    def ybar(self) -> tuple:
        return tuple(self.F.exact_value(self.point))

    @cached_property
    def jac(self) -> tuple:
        return tuple(self.F.jacobian(self.point))

    def jac_t_rows(self) -> list[tuple]:
        """Rows of the equation system jac^T lam = 0 (one per variable)."""
        return [tuple(self.jac[i][j] for i in range(self.d)) for j in range(self.n)]

    def image(self, u: Sequence) -> tuple:
        return tuple(sum((row[j] * Fraction(u[j]) for j in range(self.n)), Fraction(0)) for row in self.jac)

    def hessian(self, lam: Sequence) -> tuple:
        return self.F.hessian_scalarized(lam, self.point)

    def grad_objective(self) -> tuple:
        if self.objective is None:
            raise MissingObjective("instance has no objective")
        return tuple(self.objective.jacobian(self.point)[0])

    def summary(self) -> dict:
        kind = self.gamma.name if self.is_analytic else (self.gamma.name or "disjunctive")
        return {
            "name": self.name,
            "n": self.n,
            "d": self.d,
            "map": list(self.F.sources),
            "map_class": "polynomial" if self.F.is_polynomial else "expression",
            "gamma": kind,
            "gamma_class": "analytic" if self.is_analytic else ("ortho-disjunctive" if self.gamma.ortho_flag else "disjunctive"),
            "point": list(self.point),
        }


# --- problem files ------------------------------------------------------------------------

def _rows(raw, d, what):
    rows = []
    for r in raw:
        if len(r) != d + 1:
            raise ProblemFileError(f"{what} row {r} needs {d} coefficients and a right-hand side")
        try:
            rows.append((tuple(frac(str(x)) for x in r[:d]), frac(str(r[d]))))
        except (ValueError, ZeroDivisionError) as exc:
            raise ProblemFileError(f"bad rational in {what} row {r}: {exc}") from None
    return tuple(rows)


def _pieces(raw, d) -> tuple:
    pieces = []
    for p in raw:
        if "box" in p:
            ivs = []
            for lo, hi in p["box"]:
                conv = lambda v: None if str(v).lower() in ("-inf", "inf", "+inf", "none") else frac(str(v))
                ivs.append((conv(lo), conv(hi)))
            pieces.append(box(ivs))
            continue
        pieces.append(HPoly(d, _rows(p.get("eq", []), d, "eq"), _rows(p.get("ineq", []), d, "ineq")))
    return tuple(pieces)


def _gamma_from(spec: dict, d: int | None):
    if "blocks" in spec:
        blocks = [_gamma_from(b, b.get("dim")) for b in spec["blocks"]]
        out = blocks[0]
        for b in blocks[1:]:
            out = product_set(out, b)
        return out
    if "prototype" in spec:
        return prototype_set(spec["prototype"], int(spec.get("copies", 1)), spec.get("r"), spec.get("d", d))
    if "analytic" in spec:
        name = spec["analytic"]
        if name not in ANALYTIC_SETS:
            raise ProblemFileError(f"unknown analytic set '{name}'")
        return ANALYTIC_SETS[name]
    if "pieces" in spec:
        if d is None:
            raise ProblemFileError("explicit pieces need the dimension (problem.d or block dim)")
        return DisjunctiveSet(_pieces(spec["pieces"], d), spec.get("name", "pieces"))
    raise ProblemFileError("[gamma] needs one of: prototype, pieces, analytic, blocks")


def load_problem_text(text: str, name: str = "") -> GmpInstance:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ProblemFileError(f"cannot parse problem file: {exc}") from None
    for sec in ("problem", "map", "gamma", "point"):
        if sec not in data:
            raise ProblemFileError(f"missing section [{sec}]")
    try:
        n = int(data["problem"]["n"])
        d = int(data["problem"]["d"])
    except (KeyError, ValueError):
        raise ProblemFileError("[problem] needs integers n and d") from None
    m = data["map"]
    if "components" in m:
        F = build_map([str(s) for s in m["components"]], n)
    elif "tables" in m:
        tables = []
        for t in m["tables"]:
            tables.append({tuple(int(e) for e in k.split(",")): frac(str(v)) for k, v in t.items()})
        F = polynomial_map_from_tables(tables, n)
    else:
        raise ProblemFileError("[map] needs 'components' or 'tables'")
    if F.d != d:
        raise ProblemFileError(f"[map] has {F.d} components but d = {d}")
    gamma = _gamma_from(data["gamma"], d)
    try:
        point = tuple(frac(str(v)) for v in data["point"]["x"])
    except (KeyError, ValueError, ZeroDivisionError):
        raise ProblemFileError("[point] needs x = [rationals]") from None
    objective = None
    if "objective" in data:
        objective = build_map([str(data["objective"]["expr"])], n)
    fd = None
    fname = data.get("probe", {}).get("feasible_set")
    if fname:
        try:
            fd = feasible_distance_factory(fname)(point)
        except KeyError as exc:
            raise ProblemFileError(str(exc)) from None
    try:
        rays = tuple(tuple(frac(str(v)) for v in r) for r in data.get("multipliers", {}).get("rays", []))
    except (ValueError, ZeroDivisionError):
        raise ProblemFileError("[multipliers] rays must be lists of rationals") from None
    if any(len(r) != d for r in rays):
        raise ProblemFileError(f"[multipliers] rays need {d} entries")
    return GmpInstance(F, gamma, point, objective, data.get("name", name), fd, fname,
                       data.get("description", ""), rays)


def load_problem(path: str | Path) -> GmpInstance:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc}") from None
    return load_problem_text(text, path.stem)


def make_instance(components: Sequence[str], gamma, point, objective: str | None = None,
                  name: str = "", feasible_set: str | None = None, user_rays: Sequence = ()) -> GmpInstance:
    n = len(point)
    F = build_map(list(components), n)
    obj = build_map([objective], n) if objective else None
    fd = feasible_distance_factory(feasible_set)(vec(point)) if feasible_set else None
    return GmpInstance(F, gamma, point, obj, name, fd, feasible_set, "", tuple(user_rays))
