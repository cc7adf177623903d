"""Bi-objective problem wrappers with a shared evaluation counter."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .._validation import check_bounds, check_vector
from ..alignment import AlignmentDesign, build_horizontal, build_segments, vertical_count
from ..constraints import FEASIBILITY_TOL, ConstraintConfig, evaluate_constraints, penalty
from ..costing import CostParameters, evaluate_costs
from ..exceptions import RoadAlignError

__all__ = [
    "EvaluationCounter",
    "Evaluation",
    "BiObjectiveProblem",
    "RoadAlignmentProblem",
    "shifted_quadratics",
]


class EvaluationCounter:
    """Thread-safe monotone counter of objective evaluations."""

    def __init__(self):
        self._n = 0
        self._lock = threading.Lock()

    def increment(self) -> int:
        with self._lock:
            self._n += 1
            return self._n

    @property
    def value(self) -> int:
        return self._n


@dataclass(frozen=True)
class Evaluation:
    x: np.ndarray
    f: tuple
    penalty: float
    feasible: bool
    index: int


class BiObjectiveProblem:
    """Minimise two objectives over a box.

    ``func(x)`` must return ``(f, penalty, feasible)`` where ``penalty`` is the
    summed squared constraint violation (0 when feasible).
    """

    def __init__(self, func, lower, upper, counter=None):
        self.func = func
        self.lower, self.upper = check_bounds(lower, upper)
        self.counter = counter if counter is not None else EvaluationCounter()

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def n_evaluations(self) -> int:
        return self.counter.value

    def in_bounds(self, x) -> bool:
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def evaluate(self, x) -> Evaluation:
        x = check_vector(x, self.dim).copy()
        x.setflags(write=False)
        f, pen, feasible = self.func(x)
        idx = self.counter.increment()
        return Evaluation(x, (float(f[0]), float(f[1])), float(pen), bool(feasible), idx)

    def evaluate_many(self, xs) -> list:
        # committed in submission order
        return [self.evaluate(x) for x in xs]


def shifted_quadratics(dim=3, shift=2.0, lower=-5.0, upper=5.0) -> BiObjectiveProblem:
    """Toy problem ``((x0 - shift)^2 + |x_rest|^2, x0^2 + |x_rest|^2)``.

    The Pareto set is ``x0`` in ``[0, shift]`` with the other coordinates zero.
    """

    def func(x):
        rest = float(np.dot(x[1:], x[1:]))
        return ((x[0] - shift) ** 2 + rest, x[0] ** 2 + rest), 0.0, True

    return BiObjectiveProblem(func, np.full(dim, lower, dtype=float), np.full(dim, upper, dtype=float))


class RoadAlignmentProblem(BiObjectiveProblem):
    """Earthwork cost vs utility cost of a 3-D alignment.

    Decision vector is ``[X, Y, R, Z]``. Bounds: IP boxes for X and Y,
    ``[r_min, r_max]`` for radii and the terrain's sampled elevation range
    widened by ``z_bar`` for elevations. Designs whose geometry cannot be built
    or that leave the terrain get infinite objectives and penalty.
    """

    def __init__(self, terrain, constraints: ConstraintConfig, params: CostParameters, start, end, m, r_max=500.0,
                 counter=None):
        self.terrain = terrain
        self.constraints = constraints
        self.params = params
        self.start = np.asarray(start, dtype=float)
        self.end = np.asarray(end, dtype=float)
        n = constraints.n_ips
        if np.ndim(m) == 0:
            m = (int(m),) * (n + 1)
        self.m = tuple(int(v) for v in m)
        if len(self.m) != n + 1:
            raise ValueError(f"m needs N+1={n + 1} entries for {n} boxes, got {len(self.m)}")
        if r_max < constraints.r_min:
            raise ValueError("r_max must be at least r_min")
        M = vertical_count(self.m)
        zg_lo, zg_hi = _terrain_range(terrain)
        b = constraints.boxes
        lower = np.concatenate([b[:, 0], b[:, 2], np.full(n, constraints.r_min), np.full(M, zg_lo - constraints.z_bar)])
        upper = np.concatenate([b[:, 1], b[:, 3], np.full(n, float(r_max)), np.full(M, zg_hi + constraints.z_bar)])
        super().__init__(self._evaluate, lower, upper, counter)

    def design(self, x) -> AlignmentDesign:
        return AlignmentDesign.from_vector(x, self.start, self.end, self.m)

    def assess(self, x):
        """Design, cost breakdown (or None) and constraint report for ``x``."""
        design = self.design(x)
        try:
            geom = build_horizontal(design)
        except RoadAlignError:
            return design, None, evaluate_constraints(design, self.terrain, self.constraints)
        report = evaluate_constraints(design, self.terrain, self.constraints, geom)
        try:
            costs = evaluate_costs(design, self.terrain, self.params, geom, build_segments(design, geom))
        except RoadAlignError:
            costs = None
        return design, costs, report

    def _evaluate(self, x):
        _, costs, report = self.assess(x)
        pen = penalty(report)
        if costs is None:
            return (math.inf, math.inf), math.inf, False
        return costs.objectives, pen, report.worst <= FEASIBILITY_TOL


def _terrain_range(terrain):
    """Min/max ground elevation over all cell corners."""
    cs = terrain.cell_size
    xs = terrain.origin_x + cs * np.arange(terrain.n_cols)[None, :]
    ys = terrain.origin_y + cs * np.arange(terrain.n_rows)[:, None]
    vals = []
    for dx in (0.0, cs):
        for dy in (0.0, cs):
            vals.append(terrain.A * (xs + dx) + terrain.B * (ys + dy) + terrain.C)
    allv = np.stack(vals)
    return float(allv.min()), float(allv.max())
