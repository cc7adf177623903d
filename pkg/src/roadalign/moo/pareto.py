"""Dominance, non-dominated filtering and 2-D hypervolume (minimisation)."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

__all__ = ["dominates", "ParetoPoint", "ParetoFront", "ParetoArchive", "pareto_filter", "hypervolume"]


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse than ``b`` in both objectives and differs from it."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


@dataclass(frozen=True)
class ParetoPoint:
    f: tuple
    x: Optional[np.ndarray] = None
    index: int = -1


class ParetoFront:
    """Mutually non-dominated points sorted by first objective ascending."""

    def __init__(self, points: Iterable[ParetoPoint] = ()):
        self.points = list(points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def F(self) -> np.ndarray:
        """Objective values as an (n, 2) array."""
        if not self.points:
            return np.empty((0, 2))
        return np.array([p.f for p in self.points], dtype=float)

    @property
    def X(self) -> np.ndarray:
        return np.array([p.x for p in self.points])

    @property
    def indices(self) -> list:
        return [p.index for p in self.points]

    def hypervolume(self, ref) -> float:
        return hypervolume(self.F, ref)

    def __repr__(self):
        return f"ParetoFront(n={len(self.points)})"


def pareto_filter(points) -> ParetoFront:
    """Non-dominated subset of ``points``.

    ``points`` may be objective pairs or :class:`ParetoPoint` instances. Exact
    duplicates collapse to the one with the smallest evaluation index (input
    order when no index is given).
    """
    pts = []
    for i, p in enumerate(points):
        if not isinstance(p, ParetoPoint):
            p = ParetoPoint((float(p[0]), float(p[1])), None, i)
        pts.append(p)
    pts.sort(key=lambda p: (p.f[0], p.f[1], p.index))
    kept = []
    best_f2 = np.inf
    for p in pts:
        if p.f[1] < best_f2:
            kept.append(p)
            best_f2 = p.f[1]
    return ParetoFront(kept)


class ParetoArchive:
    """Incrementally maintained non-dominated set."""

    def __init__(self):
        self._f1 = []
        self._f2 = []
        self._pts = []

    def __len__(self):
        return len(self._pts)

    def add(self, point: ParetoPoint) -> bool:
        """Insert ``point``; return True if it entered the archive."""
        c1, c2 = point.f
        pos = bisect.bisect_right(self._f1, c1)
        # member with the largest f1 <= c1 has the smallest f2 among those
        if pos > 0 and self._f2[pos - 1] <= c2:
            return False
        # members with f1 >= c1 and f2 >= c2 are dominated by the newcomer
        lo = bisect.bisect_left(self._f1, c1)
        hi = lo
        while hi < len(self._pts) and self._f2[hi] >= c2:
            hi += 1
        del self._f1[lo:hi], self._f2[lo:hi], self._pts[lo:hi]
        self._f1.insert(lo, c1)
        self._f2.insert(lo, c2)
        self._pts.insert(lo, point)
        return True

    def front(self) -> ParetoFront:
        return ParetoFront(list(self._pts))

    @property
    def points(self) -> list:
        return list(self._pts)


def hypervolume(F, ref) -> float:
    """Area dominated by the points ``F`` and bounded by ``ref``."""
    F = np.asarray(F, dtype=float).reshape(-1, 2)
    F = F[(F[:, 0] < ref[0]) & (F[:, 1] < ref[1])]
    if F.size == 0:
        return 0.0
    front = pareto_filter(F).F
    area = 0.0
    prev_f2 = ref[1]
    for f1, f2 in front:
        area += (ref[0] - f1) * (prev_f2 - f2)
        prev_f2 = f2
    return float(area)

