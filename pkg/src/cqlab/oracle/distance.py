"""Distances to disjunctive sets: exact rational routes and a vectorized
float route used by the sampling probes."""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from ..kernel.linalg import dot, inverse, matmul, matvec, row_basis, sub, transpose, vec
from ..kernel.lp import OPTIMAL, linprog_exact
from ..sets import DisjunctiveSet, HPoly

NORMS = ("l2", "l1", "linf", "l1_linf")


# --- exact route -----------------------------------------------------------------------

def _clamp_box(p: HPoly, y: Sequence) -> list[Fraction]:
    """Per-coordinate gaps (y_i - clamp(y_i)) to a box piece."""
    gaps = []
    for (lo, hi), v in zip(p.intervals(), y):
        if lo is not None and v < lo:
            gaps.append(v - lo)
        elif hi is not None and v > hi:
            gaps.append(v - hi)
        else:
            gaps.append(Fraction(0))
    return gaps


def _project_affine(y: Sequence, rows: Sequence[Sequence], rhs: Sequence) -> tuple | None:
    """Orthogonal projection of y onto {z : rows z = rhs} (None if inconsistent)."""
    d = len(y)
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    basis = row_basis(aug, d + 1)
    if any(all(x == 0 for x in r[:d]) and r[d] != 0 for r in basis):
        return None
    a = [r[:d] for r in basis]
    b = [r[d] for r in basis]
    if not a:
        return tuple(y)
    gram_inv = inverse(matmul(a, transpose(a, d)))
    resid = sub(matvec(a, y), b)
    mult = matvec(gram_inv, resid)
    corr = matvec(transpose(a, d), mult)
    return tuple(yi - ci for yi, ci in zip(y, corr))


def _sq_dist_piece(p: HPoly, y: Sequence) -> Fraction:
    if p.is_box():
        return sum((g * g for g in _clamp_box(p, y)), Fraction(0))
    if p.contains(y):
        return Fraction(0)
    best = None
    eq_rows = [a for a, _ in p.eqs]
    eq_rhs = [b for _, b in p.eqs]
    m = len(p.ineqs)
    for k in range(0, min(m, p.dim) + 1):
        for face in combinations(range(m), k):
            rows = eq_rows + [p.ineqs[j][0] for j in face]
            rhs = eq_rhs + [p.ineqs[j][1] for j in face]
            z = _project_affine(y, rows, rhs)
            if z is None or not p.contains(z):
                continue
            dz = sub(y, z)
            val = dot(dz, dz)
            if best is None or val < best:
                best = val
    return best


def _lp_dist_piece(p: HPoly, y: Sequence, norm: str) -> Fraction:
    """l1 or linf distance to a general polyhedron by an exact LP over (z, s)."""
    d = p.dim
    if norm == "l1":
        nv = 2 * d
        c = [0] * d + [-1] * d
    else:
        nv = d + 1
        c = [0] * d + [-1]
    a_ub, b_ub = [], []
    for i in range(d):
        for sgn in (1, -1):
            row = [0] * nv
            row[i] = -sgn  # sgn*(y_i - z_i) <= s
            row[d + (i if norm == "l1" else 0)] = -1
            a_ub.append(row)
            b_ub.append(-sgn * y[i])
    for a, b in p.ineqs:
        a_ub.append(list(a) + [0] * (nv - d))
        b_ub.append(b)
    a_eq = [list(a) + [0] * (nv - d) for a, _ in p.eqs]
    b_eq = [b for _, b in p.eqs]
    res = linprog_exact(c, a_ub, b_ub, a_eq, b_eq, nvars=nv)
    if res.status != OPTIMAL:
        raise ValueError("empty polyhedral piece")
    return -res.value


def _dist_piece(p: HPoly, y: Sequence, norm: str) -> Fraction:
    if norm == "l2":
        return _sq_dist_piece(p, y)
    if p.is_box():
        gaps = [abs(g) for g in _clamp_box(p, y)]
        return sum(gaps, Fraction(0)) if norm == "l1" else max(gaps, default=Fraction(0))
    return _lp_dist_piece(p, y, norm)


def distance_to_gamma(gamma: DisjunctiveSet, y: Sequence, norm: str = "l2", squared: bool = False):
    """d_Gamma(y) as the minimum over pieces.

    l1 and linf distances are exact rationals. For l2 the exact value is the
    squared distance (returned when ``squared``); otherwise its float root.
    ``l1_linf`` sums linf distances over the declared product factors.
    """
    if norm not in NORMS:
        raise ValueError(f"unknown norm '{norm}'")
    y = vec(y)
    if norm == "l1_linf":
        if gamma.factors is None:
            return distance_to_gamma(gamma, y, "linf")
        return sum((distance_to_gamma(f, yi, "linf") for f, yi in zip(gamma.factors, gamma.split(y))),
                   Fraction(0))
    val = min(_dist_piece(p, y, norm) for p in gamma.pieces)
    if norm == "l2" and not squared:
        return math.sqrt(val)
    return val


# --- vectorized float route -------------------------------------------------------------

class FloatDistance:
    """Precomputed float l2 distance to a disjunctive set, evaluated on arrays."""

    def __init__(self, gamma: DisjunctiveSet):
        self.gamma = gamma
        self.parts = []
        for p in gamma.pieces:
            if p.is_box():
                lo = np.array([-np.inf if a is None else float(a) for a, _ in p.intervals()])
                hi = np.array([np.inf if b is None else float(b) for _, b in p.intervals()])
                self.parts.append(("box", lo, hi))
            else:
                self.parts.append(("poly", p, self._faces(p)))

    @staticmethod
    def _faces(p: HPoly):
        eq_rows = [a for a, _ in p.eqs]
        eq_rhs = [b for _, b in p.eqs]
        A = np.array([[float(x) for x in a] for a, _ in p.ineqs]).reshape(len(p.ineqs), p.dim)
        b = np.array([float(x) for _, x in p.ineqs])
        E = np.array([[float(x) for x in a] for a in eq_rows]).reshape(len(eq_rows), p.dim)
        e = np.array([float(x) for x in eq_rhs])
        faces = []
        for k in range(0, min(len(p.ineqs), p.dim) + 1):
            for face in combinations(range(len(p.ineqs)), k):
                rows = eq_rows + [p.ineqs[j][0] for j in face]
                rhs = eq_rhs + [p.ineqs[j][1] for j in face]
                aug = [list(r) + [v] for r, v in zip(rows, rhs)]
                basis = row_basis(aug, p.dim + 1)
                if any(all(x == 0 for x in r[:p.dim]) and r[p.dim] != 0 for r in basis):
                    continue
                if not basis:
                    faces.append((np.eye(p.dim), np.zeros(p.dim)))
                    continue
                M = np.array([[float(x) for x in r[:p.dim]] for r in basis])
                c = np.array([float(r[p.dim]) for r in basis])
                G = np.linalg.inv(M @ M.T)
                P = np.eye(p.dim) - M.T @ G @ M
                off = M.T @ G @ c
                faces.append((P, off))
        return A, b, E, e, faces

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        best = np.full(y.shape[0], np.inf)
        for part in self.parts:
            if part[0] == "box":
                _, lo, hi = part
                d = np.linalg.norm(y - np.clip(y, lo, hi), axis=1)
            else:
                _, p, (A, b, E, e, faces) = part
                d = np.full(y.shape[0], np.inf)
                # relative tolerance: near a cone vertex the data are tiny
                rhs = max(np.abs(b).max() if b.size else 0.0, np.abs(e).max() if e.size else 0.0)
                for P, off in faces:
                    z = y @ P.T + off
                    scale = 1e-10 * (rhs + np.abs(z).max(axis=1))
                    ok = np.all(z @ A.T <= b + scale[:, None], axis=1) if A.size else np.ones(len(z), bool)
                    if E.size:
                        ok &= np.all(np.abs(z @ E.T - e) <= scale[:, None], axis=1)
                    dist = np.linalg.norm(y - z, axis=1)
                    d = np.where(ok, np.minimum(d, dist), d)
            best = np.minimum(best, d)
        return best


def gamma_distance_function(gamma):
    """Vectorized l2 distance callable for disjunctive or analytic sets."""
    if getattr(gamma, "is_analytic", False):
        return gamma.distance
    return FloatDistance(gamma)
