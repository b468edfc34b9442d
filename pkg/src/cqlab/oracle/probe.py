"""Seeded sampling probes: error-bound ratios for MSCQ and penalty exactness."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import EmptyPool, MissingObjective
from ..model.instance import GmpInstance
from .distance import distance_to_gamma, gamma_distance_function

BOUNDED = "BOUNDED"
DIVERGENCE_SUSPECTED = "DIVERGENCE_SUSPECTED"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ProbeConfig:
    r0: float = 0.5
    levels: int = 20  # radii r0 * 2^-j for j = 0..levels
    samples_per_radius: int = 512
    seed: int = 0
    feasible_pool_resolution: float = 1 / 32
    divergence_threshold: float = -0.25
    fit_points: int = 8

    @property
    def radii(self) -> np.ndarray:
        return self.r0 * 2.0 ** (-np.arange(self.levels + 1))


@dataclass
class ProbeResult:
    radii: list
    ratios: list  # sup sampled ratio per radius (None if no usable sample)
    slope: float | None
    kappa: float | None
    verdict: str
    witness: list = field(default_factory=list)  # per radius: (r, x, ratio) of the maximizer
    notes: list = field(default_factory=list)

    def to_dict(self, digits: int = 12) -> dict:
        rnd = lambda v: None if v is None else float(f"{v:.{digits}g}")
        return {
            "verdict": self.verdict,
            "kappa": rnd(self.kappa),
            "slope": rnd(self.slope),
            "radii": [rnd(r) for r in self.radii],
            "ratios": [rnd(r) for r in self.ratios],
            "witness": [{"r": rnd(r), "x": [rnd(v) for v in x], "ratio": rnd(q)} for r, x, q in self.witness],
            "notes": list(self.notes),
        }


# --- feasible-set distance ------------------------------------------------------------

def _pool(inst: GmpInstance, cfg: ProbeConfig) -> np.ndarray:
    """Grid points near x̄ whose image lies in Gamma (to grid-step^2)."""
    h = cfg.feasible_pool_resolution
    k = int(round(cfg.r0 / h))
    axis = np.arange(-k, k + 1) * h
    mesh = np.stack(np.meshgrid(*([axis] * inst.n), indexing="ij"), axis=-1).reshape(-1, inst.n)
    xbar = np.array([float(v) for v in inst.point])
    pts = xbar + mesh
    dist = gamma_distance_function(inst.gamma)(inst.F.eval_many(pts))
    keep = pts[dist <= h * h]
    if keep.shape[0] == 0:
        raise EmptyPool("no feasible grid point found near the reference point")
    return keep


def feasible_distance_function(inst: GmpInstance, cfg: ProbeConfig):
    """Vectorized estimate of d_X: the instance override when present, else
    the distance to a feasible grid pool."""
    if inst.feasible_distance is not None:
        return inst.feasible_distance
    pool = _pool(inst, cfg)

    def dist(x):
        x = np.atleast_2d(x)
        out = np.empty(x.shape[0])
        for s in range(0, x.shape[0], 256):
            chunk = x[s:s + 256]
            out[s:s + 256] = np.sqrt(((chunk[:, None, :] - pool[None, :, :]) ** 2).sum(axis=2)).min(axis=1)
        return out

    return dist


def feasible_distance_estimate(inst: GmpInstance, x: Sequence, cfg: ProbeConfig | None = None) -> float:
    cfg = cfg or ProbeConfig()
    return float(feasible_distance_function(inst, cfg)(np.array([[float(v) for v in x]]))[0])


# --- MSCQ probe --------------------------------------------------------------------------

def _critical_directions(inst: GmpInstance) -> list[np.ndarray]:
    """Pullback witnesses of direction classes carrying nonzero multipliers."""
    if inst.is_analytic:
        return []
    from ..multipliers import direction_classes
    out = []
    try:
        classes = direction_classes(inst)
    except Exception:  # critical directions only enrich the sample
        return []
    for c in classes:
        if c.pullback_nonzero and c.multipliers.has_nonzero:
            u = np.array([float(v) for v in c.pullback_witness])
            u /= np.linalg.norm(u)
            out.append(u)
            if not c.pullback_stricts:
                out.append(-u)
    return out


def _directions(inst: GmpInstance, cfg: ProbeConfig, rng: np.random.Generator) -> np.ndarray:
    n = inst.n
    fixed = [np.eye(n)[i] * s for i in range(n) for s in (1.0, -1.0)]
    fixed += _critical_directions(inst)
    m = max(cfg.samples_per_radius - len(fixed), 0)
    rand = rng.standard_normal((m, n))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    return np.vstack([np.array(fixed).reshape(-1, n), rand]), len(fixed)


def mscq_probe(inst: GmpInstance, cfg: ProbeConfig | None = None) -> ProbeResult:
    """Sample x near x̄ outside X and track sup d_X(x) / d_Gamma(F(x)) per radius."""
    cfg = cfg or ProbeConfig()
    rng = np.random.default_rng(cfg.seed)
    xbar = np.array([float(v) for v in inst.point])
    dirs, nfixed = _directions(inst, cfg, rng)
    d_gamma = gamma_distance_function(inst.gamma)
    d_x = feasible_distance_function(inst, cfg)
    radii = cfg.radii
    ratios, witness = [], []
    for r in radii:
        scale = np.ones(len(dirs))
        scale[nfixed:] = rng.uniform(0.5, 1.0, len(dirs) - nfixed)
        pts = xbar + (r * scale)[:, None] * dirs
        dg = d_gamma(inst.F.eval_many(pts))
        dx = d_x(pts)
        usable = (dg > 0) & (dx > 0) & np.isfinite(dg) & np.isfinite(dx)
        if not usable.any():
            ratios.append(None)
            continue
        q = np.where(usable, dx / np.where(usable, dg, 1.0), -np.inf)
        j = int(np.argmax(q))
        ratios.append(float(q[j]))
        witness.append((float(r), pts[j].tolist(), float(q[j])))
    res = ProbeResult([float(r) for r in radii], ratios, None, None, INCONCLUSIVE, witness)
    fit = [(np.log(r), np.log(q)) for r, q in zip(radii, ratios) if q is not None and q > 0][-cfg.fit_points:]
    if len(fit) < 3:
        res.notes.append("too few radii with points outside the feasible set")
        return res
    xs, ys = np.array(fit).T
    slope = float(np.polyfit(xs, ys, 1)[0])
    res.slope = slope
    if slope <= cfg.divergence_threshold:
        res.verdict = DIVERGENCE_SUSPECTED
        res.witness = witness[-cfg.fit_points:]
    else:
        res.verdict = BOUNDED
        res.kappa = max(q for q in ratios if q is not None)
        res.witness = []
    return res


# --- penalty probe ------------------------------------------------------------------------

@dataclass
class PenaltyReport:
    alphas: list
    margins: list  # per alpha: per radius min sampled P_a(x) - P_a(x̄)
    exact_alpha: float | None
    norm: str

    def to_dict(self, digits: int = 12) -> dict:
        rnd = lambda v: float(f"{v:.{digits}g}")
        return {"norm": self.norm, "alphas": self.alphas, "exact_alpha": self.exact_alpha,
                "margins": [[rnd(m) for m in row] for row in self.margins]}


def composed_distance(inst: GmpInstance, x: np.ndarray, norm: str) -> np.ndarray:
    """d_Gamma(F(x)) in the requested norm, float-valued per sample."""
    if norm == "l2":
        return gamma_distance_function(inst.gamma)(inst.F.eval_many(x))
    gamma = inst.require_disjunctive()
    y = inst.F.eval_many(x)
    out = np.empty(len(y))
    for k, row in enumerate(y):
        out[k] = float(distance_to_gamma(gamma, [Fraction(v) for v in row], norm))
    return out


def penalty_probe(inst: GmpInstance, alphas: Sequence[float] | None = None, norm: str = "l2",
                  cfg: ProbeConfig | None = None) -> PenaltyReport:
    if inst.objective is None:
        raise MissingObjective("the penalty probe needs an objective")
    cfg = cfg or ProbeConfig(samples_per_radius=128)
    alphas = list(alphas) if alphas is not None else [float(2 ** k) for k in range(11)]
    rng = np.random.default_rng(cfg.seed)
    xbar = np.array([float(v) for v in inst.point])
    f0 = inst.objective.eval_many(xbar[None, :])[:, 0][0]
    per_radius = []
    for r in cfg.radii:
        dirs = rng.standard_normal((cfg.samples_per_radius, inst.n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        pts = xbar + r * rng.uniform(0.0, 1.0, (len(dirs), 1)) * dirs
        per_radius.append((inst.objective.eval_many(pts)[:, 0] - f0, composed_distance(inst, pts, norm)))
    margins, exact = [], None
    for a in alphas:
        row = [float(np.min(df + a * dg)) for df, dg in per_radius]
        margins.append(row)
        if exact is None and min(row[-2:]) >= 0:
            exact = a
    return PenaltyReport(alphas, margins, exact, norm)


def mpcc_penalty_closed_form(values: Sequence) -> Fraction:
    """sum_i |min(G_i, H_i)| for stacked pairs (G_1, H_1, G_2, H_2, ...)."""
    vals = [Fraction(v) for v in values]
    return sum((abs(min(vals[i], vals[i + 1])) for i in range(0, len(vals), 2)), Fraction(0))
