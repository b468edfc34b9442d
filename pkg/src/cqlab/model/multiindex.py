"""Multi-indices: ordered factorizations of the range dimension into blocks."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import accumulate
from typing import Sequence

from ..errors import AssumptionNotGuaranteed


@dataclass(frozen=True)
class MultiIndex:
    parts: tuple

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts or any(p <= 0 for p in parts):
            raise ValueError("multi-index parts must be positive integers")
        object.__setattr__(self, "parts", parts)

    @property
    def d(self) -> int:
        return sum(self.parts)

    @property
    def labels(self) -> tuple:
        return tuple(range(1, len(self.parts) + 1))

    def blocks(self) -> list[list[int]]:
        """Coordinate indices (0-based) of each block."""
        out, k = [], 0
        for p in self.parts:
            out.append(list(range(k, k + p)))
            k += p
        return out

    def cuts(self) -> set[int]:
        return set(accumulate(self.parts))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


def delta_p(d: int) -> MultiIndex:
    return MultiIndex((d,))


def delta_q(d: int) -> MultiIndex:
    return MultiIndex((1,) * d)


def refine(fine: MultiIndex, coarse: MultiIndex) -> bool:
    """True iff `fine` is a refinement of `coarse` (splits its blocks further)."""
    if fine.d != coarse.d:
        raise ValueError("multi-indices of different total size")
    return coarse.cuts() <= fine.cuts()


def support(delta: MultiIndex, lam: Sequence) -> list[int]:
    """Labels (1-based) of blocks where lam is not identically zero."""
    return [k + 1 for k, b in enumerate(delta.blocks()) if any(lam[i] != 0 for i in b)]


def coarsenings(delta: MultiIndex) -> list[MultiIndex]:
    """Every multi-index that delta refines (merging consecutive blocks)."""
    parts = delta.parts
    out = []
    inner = list(accumulate(parts))[:-1]
    for mask in range(1 << len(inner)):
        cuts = [c for k, c in enumerate(inner) if mask >> k & 1]
        bounds = [0] + cuts + [delta.d]
        out.append(MultiIndex(tuple(b - a for a, b in zip(bounds, bounds[1:]))))
    return sorted(set(out), key=lambda m: (len(m.parts), m.parts))


def finest_admissible(gamma) -> MultiIndex:
    """Finest block structure for which (P2) is structurally guaranteed.

    Ortho-disjunctive sets admit all scalar blocks; declared products admit
    their factor blocks, each refined further when that factor is ortho.
    """
    d = gamma.dim
    if gamma.ortho_flag:
        return delta_q(d)
    if gamma.factors is None:
        return delta_p(d)
    parts = []
    for f in gamma.factors:
        parts.extend(finest_admissible(f).parts)
    return MultiIndex(tuple(parts))


def admissible_multi_indices(gamma) -> list[MultiIndex]:
    """All structurally admissible multi-indices, coarsest first."""
    return coarsenings(finest_admissible(gamma))


def is_admissible(gamma, delta: MultiIndex) -> bool:
    return refine(finest_admissible(gamma), delta)


def require_admissible(gamma, delta: MultiIndex) -> None:
    if not is_admissible(gamma, delta):
        raise AssumptionNotGuaranteed(
            f"multi-index {delta} is not admissible by structure for this set; "
            f"finest admissible is {finest_admissible(gamma)}")


def parse_delta(text: str) -> MultiIndex:
    return MultiIndex(tuple(int(t) for t in text.replace("(", "").replace(")", "").split(",") if t.strip()))
