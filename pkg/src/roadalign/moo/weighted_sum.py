"""Weighted-sum scalarisation solved by penalised coordinate search."""

from __future__ import annotations

import math

import numpy as np

from .._validation import check_budget, check_fraction, check_positive_int
from ..exceptions import SeedingError
from .base import BaseSolver, as_point
from .pareto import pareto_filter
from .problem import Evaluation
from .scalarize import NadirUtopia, normalization_factors, weighted_sum_scalarize

__all__ = ["coordinate_search", "WeightedSum"]


def coordinate_search(problem, x0, scalar, budget, initial_step=0.1, min_step=1e-9, penalty_weight=1e4):
    """Minimise ``scalar(f) + penalty_weight * penalty`` from a feasible start.

    ``x0`` is a point or an already computed :class:`Evaluation` (which is
    then not re-evaluated).

    Opportunistic polling along signed coordinate directions; an iteration
    ends at the first improving point or after a full unsuccessful poll, which
    halves the step. Returns ``(best_feasible, evaluations_used)`` where the
    first item is the feasible evaluation with the lowest scalar value seen.
    """
    n0 = problem.n_evaluations
    start = x0 if isinstance(x0, Evaluation) else problem.evaluate(x0)
    if not start.feasible:
        raise SeedingError("weighted-sum runs need a feasible seed")

    def merit(ev):
        if not math.isfinite(ev.f[0]) or not math.isfinite(ev.f[1]):
            return math.inf
        return scalar(ev.f) + penalty_weight * ev.penalty

    span = problem.upper - problem.lower
    dirs = [(i, s) for i in range(problem.dim) for s in (1.0, -1.0)]
    best, best_merit = start, merit(start)
    best_feasible, best_feasible_val = start, scalar(start.f)
    alpha = initial_step
    first = 0
    while problem.n_evaluations - n0 < budget and alpha >= min_step:
        success = False
        for q in range(len(dirs)):
            d = (first + q) % len(dirs)
            i, sign = dirs[d]
            y = best.x.copy()
            y[i] = min(max(y[i] + sign * alpha * span[i], problem.lower[i]), problem.upper[i])
            if y[i] == best.x[i]:
                continue
            ev = problem.evaluate(y)
            if ev.feasible:
                val = scalar(ev.f)
                if val < best_feasible_val:
                    best_feasible, best_feasible_val = ev, val
            m = merit(ev)
            if m < best_merit:
                best, best_merit = ev, m
                first = d
                success = True
                break
        if not success:
            alpha *= 0.5
    return best_feasible, problem.n_evaluations - n0


class WeightedSum(BaseSolver):
    """Pareto points from repeated weighted-sum minimisations.

    The two single-objective anchors (``v_e = 1`` and ``v_e = 0``) run first;
    their results give the Nadir/Utopia normalisation used by the remaining
    weights ``v_e = i / (n_weights - 1)``. Every run starts from the same
    feasible seed (evaluated once) and gets ``per_run_budget`` evaluations.
    """

    def __init__(self, n_weights=51, per_run_budget=1000, initial_step=0.1, min_step=1e-9, penalty_weight=1e4):
        self.n_weights = n_weights
        self.per_run_budget = per_run_budget
        self.initial_step = initial_step
        self.min_step = min_step
        self.penalty_weight = penalty_weight

    def weights(self) -> np.ndarray:
        n = check_positive_int(self.n_weights, "n_weights")
        if n == 1:
            return np.array([1.0])
        return np.linspace(1.0, 0.0, n)

    def fit(self, problem, x0=None):
        per_run = check_budget(self.per_run_budget)
        alpha0 = check_fraction(self.initial_step, "initial_step", 0.0, 1.0)
        seed = self._seeds(problem, x0)[0]
        n0 = problem.n_evaluations
        weights = self.weights()

        start = problem.evaluate(seed)
        if not start.feasible:
            raise SeedingError("weighted-sum runs need a feasible seed")

        used = {}

        def run(scalar, v):
            best, used[v] = coordinate_search(
                problem, start, scalar, per_run, alpha0, self.min_step, self.penalty_weight
            )
            return best

        # anchors: scale each objective by its seed magnitude so the penalty
        # weight means the same thing as in the normalised runs
        f_seed = start.f
        scale = tuple(1.0 / abs(v) if v != 0 and math.isfinite(v) else 1.0 for v in f_seed)
        results = {}
        results[1.0] = run(lambda f: weighted_sum_scalarize(f, 1.0, scale), 1.0)
        if len(weights) > 1:
            results[0.0] = run(lambda f: weighted_sum_scalarize(f, 0.0, scale), 0.0)
            ref = NadirUtopia.from_points([results[1.0].f, results[0.0].f])
        else:
            ref = NadirUtopia.from_points([results[1.0].f])
        factors = normalization_factors(ref)
        for v in weights:
            if v in results:
                continue
            results[float(v)] = run(lambda f, _v=float(v): weighted_sum_scalarize(f, _v, factors), float(v))

        self.weights_ = weights
        self.results_ = [results[float(v)] for v in weights]
        self.run_evaluations_ = [used[float(v)] for v in weights]
        self.nadir_utopia_ = ref
        self.normalization_ = factors
        self.front_ = pareto_filter([as_point(ev) for ev in self.results_])
        self.n_evaluations_ = problem.n_evaluations - n0
        self.n_iterations_ = len(weights)
        return self
