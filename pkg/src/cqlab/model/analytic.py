"""Oracle-only (non-polyhedral) sets and closed-form feasible-set distances.

These are used by the sampling module only. Distances are computed in
floats from the optimality conditions of the projection, solved for all
sample points at once through companion-matrix eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def _real_roots_batch(coeffs: np.ndarray) -> np.ndarray:
    """Roots of many polynomials (rows: highest degree first) as a complex
    array of shape (m, deg)."""
    coeffs = np.asarray(coeffs, dtype=float)
    m, k = coeffs.shape
    deg = k - 1
    comp = np.zeros((m, deg, deg))
    comp[:, 0, :] = -coeffs[:, 1:] / coeffs[:, :1]
    if deg > 1:
        comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1.0
    return np.linalg.eigvals(comp)


def _candidates(roots: np.ndarray, lo: float | None = None) -> np.ndarray:
    r = roots.real.copy()
    bad = np.abs(roots.imag) > 1e-9 * (1 + np.abs(roots.real))
    if lo is not None:
        bad |= r < lo
    r[bad] = np.nan
    return r


@dataclass(frozen=True)
class AnalyticSet:
    """A closed set known through membership and distance oracles."""
    name: str
    dim: int
    membership: Callable[[np.ndarray], np.ndarray]
    distance: Callable[[np.ndarray], np.ndarray]
    description: str = ""

    @property
    def is_analytic(self) -> bool:
        return True

    @property
    def ortho_flag(self) -> bool:
        return False

    factors = None

    def contains_float(self, y) -> bool:
        return bool(self.membership(np.atleast_2d(np.asarray(y, dtype=float)))[0])


def _epi_power_distance(y: np.ndarray) -> np.ndarray:
    """Distance to {y2 >= |y1|^(3/2)}.

    With t = s^2 on the boundary the stationarity condition of
    (s^2 - a)^2 + (s^3 - b)^2 is s = 0 or 3 s^4 + 2 s^2 - 3 b s - 2 a = 0.
    """
    y = np.atleast_2d(y)
    a = np.abs(y[:, 0])
    b = y[:, 1]
    inside = b >= a ** 1.5
    coeffs = np.stack([np.full_like(a, 3.0), np.zeros_like(a), np.full_like(a, 2.0), -3 * b, -2 * a], axis=1)
    s = _candidates(_real_roots_batch(coeffs), lo=0.0)
    # polish the real roots with two Newton steps
    for _ in range(2):
        h = 3 * s ** 4 + 2 * s ** 2 - 3 * b[:, None] * s - 2 * a[:, None]
        dh = 12 * s ** 3 + 4 * s - 3 * b[:, None]
        with np.errstate(invalid="ignore", divide="ignore"):
            step = np.where(np.abs(dh) > 0, h / dh, 0.0)
        s = np.where(np.isnan(s), s, np.maximum(s - step, 0.0))
    s = np.concatenate([s, np.zeros((len(a), 1))], axis=1)
    phi = (s ** 2 - a[:, None]) ** 2 + (s ** 3 - b[:, None]) ** 2
    d = np.sqrt(np.nanmin(phi, axis=1))
    return np.where(inside, 0.0, d)


def _hypo_square_distance(y: np.ndarray) -> np.ndarray:
    """Distance to {y2 <= y1^2}: nearest boundary point (t, t^2) solves
    2 t^3 + (1 - 2 b) t - a = 0."""
    y = np.atleast_2d(y)
    a, b = y[:, 0], y[:, 1]
    inside = b <= a ** 2
    coeffs = np.stack([np.full_like(a, 2.0), np.zeros_like(a), 1 - 2 * b, -a], axis=1)
    t = _candidates(_real_roots_batch(coeffs))
    for _ in range(2):
        h = 2 * t ** 3 + (1 - 2 * b[:, None]) * t - a[:, None]
        dh = 6 * t ** 2 + (1 - 2 * b[:, None])
        with np.errstate(invalid="ignore", divide="ignore"):
            step = np.where(np.abs(dh) > 0, h / dh, 0.0)
        t = np.where(np.isnan(t), t, t - step)
    phi = (t - a[:, None]) ** 2 + (t ** 2 - b[:, None]) ** 2
    d = np.sqrt(np.nanmin(phi, axis=1))
    return np.where(inside, 0.0, d)


ANALYTIC_SETS: dict[str, AnalyticSet] = {
    "epi_abs_3_2": AnalyticSet(
        "epi_abs_3_2", 2,
        lambda y: np.atleast_2d(y)[:, 1] >= np.abs(np.atleast_2d(y)[:, 0]) ** 1.5,
        _epi_power_distance,
        "{y : y2 >= |y1|^(3/2)}"),
    "hypo_square": AnalyticSet(
        "hypo_square", 2,
        lambda y: np.atleast_2d(y)[:, 1] <= np.atleast_2d(y)[:, 0] ** 2,
        _hypo_square_distance,
        "{y : y2 <= y1^2}"),
}


# --- closed-form distances to feasible sets X = F^-1(Gamma) near the point ---------

def _origin(xbar):
    xb = np.asarray([float(v) for v in xbar])
    return lambda x: np.linalg.norm(np.atleast_2d(x) - xb, axis=1)


def _whole(xbar):
    return lambda x: np.zeros(np.atleast_2d(x).shape[0])


def _nonpositive_halfline(xbar):
    xb = float(xbar[0])
    return lambda x: np.maximum(np.atleast_2d(x)[:, 0] - xb, 0.0)


def _first_axis(xbar):
    """X = R x {x2bar} locally."""
    xb = float(xbar[1])
    return lambda x: np.abs(np.atleast_2d(x)[:, 1] - xb)


def _coordinate_cross(xbar):
    """X = {x1 = x1bar} U {x2 = x2bar} locally."""
    xb = np.asarray([float(v) for v in xbar])
    return lambda x: np.abs(np.atleast_2d(x) - xb).min(axis=1)


def quartic_band(a, b, c, d):
    """Feasible set of F = (x1, x2, a x1^2 + b x1^4 + c x2^2 + d x2^4) into
    R x {y3 <= -|y2|} near 0: {|x2| <= rho(x1)} where rho solves
    r + c r^2 + d r^4 = -(a x1^2 + b x1^4). Returns the vertical distance,
    an upper estimate of d_X that is sharp up to the slope of the band."""
    a, b, c, d = (float(v) for v in (a, b, c, d))

    def dist(x):
        x = np.atleast_2d(x)
        phi = a * x[:, 0] ** 2 + b * x[:, 0] ** 4
        s = np.maximum(-phi, 0.0)
        r = s.copy()
        for _ in range(30):
            g = r + c * r ** 2 + d * r ** 4 - s
            dg = 1 + 2 * c * r + 4 * d * r ** 3
            r = np.maximum(r - g / dg, 0.0)
        return np.maximum(np.abs(x[:, 1]) - r, 0.0)

    def factory(xbar):
        if a > 0 or (a == 0 and b > 0):
            return _origin(xbar)
        return dist

    return factory


FEASIBLE_SETS: dict[str, Callable] = {
    "origin": _origin,
    "whole": _whole,
    "nonpositive_halfline": _nonpositive_halfline,
    "first_axis": _first_axis,
    "coordinate_cross": _coordinate_cross,
}


def feasible_distance_factory(name: str):
    if name in FEASIBLE_SETS:
        return FEASIBLE_SETS[name]
    if name.startswith("quartic_band"):
        args = name[len("quartic_band"):].strip("()").split(",")
        from fractions import Fraction
        return quartic_band(*(Fraction(a.strip()) for a in args))
    raise KeyError(f"unknown feasible-set override '{name}'")
