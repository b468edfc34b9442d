"""Multiplier cones, direction classes and M-stationarity."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import MissingObjective
from .kernel.cones import Cone, HCone
from .kernel.linalg import Vec, is_zero, nullspace, vec
from .kernel.lp import OPTIMAL, linprog_exact, strict_lp_feasible
from .model.instance import GmpInstance
from .normals import (PolyConeUnion, _hyperplanes, directional_limiting_normal_cone,
                      limiting_normal_cone, sign_cells, tangent_cone)


@dataclass(frozen=True)
class MultiplierSet:
    """A union of multiplier cones; no pieces is EMPTY, which differs from {0}."""
    cone: PolyConeUnion
    origin: str = "standard"  # or "directional"
    direction: Vec | None = None

    @property
    def is_empty(self) -> bool:
        return self.cone.is_empty

    @property
    def is_trivial(self) -> bool:
        return self.cone.is_trivial

    @property
    def has_nonzero(self) -> bool:
        return not self.is_empty and not self.is_trivial

    def pieces(self) -> tuple:
        return self.cone.pieces

    def generators(self) -> list[Vec]:
        return self.cone.nonzero_generators()

    def describe(self) -> str:
        if self.is_empty:
            return "EMPTY"
        if self.is_trivial:
            return "{0}"
        return " U ".join(_fmt_cone(c) for c in self.cone.pieces)


def _fmt_cone(c: Cone) -> str:
    from .kernel.linalg import fmt_vec
    parts = [f"R+{fmt_vec(r)}" for r in c.v.rays] + [f"R{fmt_vec(l)}" for l in c.v.lineality]
    return " + ".join(parts) if parts else "{0}"


def _kernel_rows(inst: GmpInstance) -> list[Vec]:
    """Rows of grad F(x̄)^T lam = 0, zero rows dropped."""
    return [r for r in inst.jac_t_rows() if not is_zero(r)]


def intersect_kernel(inst: GmpInstance, union: PolyConeUnion) -> PolyConeUnion:
    rows = tuple(_kernel_rows(inst))
    pieces = [Cone.from_h(HCone(union.dim, c.h.eqs + rows, c.h.ineqs)) for c in union.pieces]
    return PolyConeUnion.of(union.dim, pieces)


def lambda0(inst: GmpInstance) -> MultiplierSet:
    gamma = inst.require_disjunctive()
    return MultiplierSet(intersect_kernel(inst, limiting_normal_cone(gamma, inst.ybar)))


def lambda0_directional(inst: GmpInstance, u: Sequence) -> MultiplierSet:
    gamma = inst.require_disjunctive()
    u = vec(u)
    n_dir = directional_limiting_normal_cone(gamma, inst.ybar, inst.image(u))
    return MultiplierSet(intersect_kernel(inst, n_dir), "directional", u)


@dataclass(frozen=True)
class DirectionClass:
    """Relatively open cell of range directions with constant N(ȳ; ·).

    The region is {dir : sign(plane_k . dir) = signs_k}; the pullback is the
    set of u with grad F(x̄) u in the region, described by equality and
    strict rows in R^n.
    """
    planes: tuple
    signs: tuple
    witness_dir: Vec
    normal_value: PolyConeUnion
    multipliers: MultiplierSet
    pullback_eqs: tuple
    pullback_stricts: tuple
    pullback_witness: Vec | None  # nonzero u in the pullback, or None
    pullback_basis: tuple = field(default=())  # basis of the span of the pullback closure

    @property
    def pullback_nonzero(self) -> bool:
        return self.pullback_witness is not None

    @property
    def pullback_dim(self) -> int:
        return len(self.pullback_basis) if self.pullback_nonzero else 0

    def contains_dir(self, d: Sequence) -> bool:
        from .kernel.linalg import dot
        for a, s in zip(self.planes, self.signs):
            v = dot(a, d)
            if (v > 0) - (v < 0) != s:
                return False
        return True

    def contains_u(self, inst: GmpInstance, u: Sequence) -> bool:
        return self.contains_dir(inst.image(u))


def _tangent_planes(inst: GmpInstance) -> list[Vec]:
    t = tangent_cone(inst.gamma, inst.ybar, use_factors=False)
    rows = []
    for c in t.pieces:
        rows.extend(c.h.eqs)
        rows.extend(c.h.ineqs)
    if not rows:
        return []
    planes, _ = _hyperplanes(rows)
    return planes


def direction_classes(inst: GmpInstance) -> list[DirectionClass]:
    """Cells of the tangent-cone arrangement lying in T(ȳ), in a fixed order."""
    gamma = inst.require_disjunctive()
    ybar = inst.ybar
    t = tangent_cone(gamma, ybar)
    planes = _tangent_planes(inst)
    jac = inst.jac
    out = []
    for signs, w in sign_cells(planes, gamma.dim):
        if not t.contains(w):
            continue
        value = directional_limiting_normal_cone(gamma, ybar, w)
        eqs, stricts = [], []
        for a, s in zip(planes, signs):
            row = tuple(sum((a[i] * jac[i][j] for i in range(gamma.dim)), Fraction(0)) for j in range(inst.n))
            if s == 0:
                eqs.append(row)
            elif s < 0:
                stricts.append(row)
            else:
                stricts.append(tuple(-x for x in row))
        basis = tuple(nullspace([r for r in eqs if not is_zero(r)], inst.n))
        if stricts:
            if any(is_zero(r) for r in stricts):
                uw = None
            else:
                uw = strict_lp_feasible(eqs, [], stricts, inst.n)
        else:
            uw = basis[0] if basis else None
        mult = MultiplierSet(intersect_kernel(inst, value), "directional", w)
        out.append(DirectionClass(tuple(planes), signs, w, value, mult, tuple(eqs), tuple(stricts),
                                  uw, basis))
    return out


def class_of(classes: Sequence[DirectionClass], d: Sequence) -> DirectionClass | None:
    for c in classes:
        if c.contains_dir(d):
            return c
    return None


# --- M-stationarity ----------------------------------------------------------------

@dataclass(frozen=True)
class Stationarity:
    stationary: bool
    multiplier: Vec | None = None
    piece: int | None = None
    mpcc_pattern: list | None = None  # per complementarity pair: sign-pattern report


def _solve_on_piece(inst: GmpInstance, grad_f: Vec, c: Cone) -> Vec | None:
    d = inst.d
    a_eq = [list(r) for r in inst.jac_t_rows()] + [list(r) for r in c.h.eqs]
    b_eq = [-g for g in grad_f] + [0] * len(c.h.eqs)
    a_ub = [list(r) for r in c.h.ineqs]
    res = linprog_exact([0] * d, a_ub, [0] * len(a_ub), a_eq, b_eq, nvars=d)
    return res.x if res.status == OPTIMAL else None


def _is_cc_product(gamma) -> bool:
    names = [f.name for f in gamma.factors] if gamma.factors is not None else [gamma.name]
    return all(n == "CC" for n in names)


def mpcc_sign_pattern(lam: Sequence, ybar: Sequence) -> list[dict]:
    """Per pair (G_i, H_i): index class and whether the M-stationarity sign
    condition (both <= 0 or product zero on the biactive set) holds."""
    out = []
    for i in range(0, len(lam), 2):
        g, h = ybar[i], ybar[i + 1]
        lg, lh = lam[i], lam[i + 1]
        if g == 0 and h == 0:
            kind = "biactive"
            ok = (lg <= 0 and lh <= 0) or lg * lh == 0
        elif g == 0:
            kind = "G-active"
            ok = lh == 0
        else:
            kind = "H-active"
            ok = lg == 0
        out.append({"pair": i // 2 + 1, "class": kind, "lambda_G": lg, "lambda_H": lh, "ok": ok})
    return out


def m_stationarity(inst: GmpInstance) -> Stationarity:
    """0 = grad f(x̄) + grad F(x̄)^T lam with lam in N(F(x̄)), decided piecewise."""
    if inst.objective is None:
        raise MissingObjective("M-stationarity needs an objective")
    gamma = inst.require_disjunctive()
    grad_f = inst.grad_objective()
    n_cone = limiting_normal_cone(gamma, inst.ybar)
    for k, c in enumerate(n_cone.pieces):
        lam = _solve_on_piece(inst, grad_f, c)
        if lam is not None:
            pattern = mpcc_sign_pattern(lam, inst.ybar) if _is_cc_product(gamma) else None
            return Stationarity(True, lam, k, pattern)
    return Stationarity(False)
