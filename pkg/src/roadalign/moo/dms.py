"""Direct multisearch: coordinate polling around members of a non-dominated list."""

from __future__ import annotations

import numpy as np

from .._validation import check_budget, check_fraction
from ..exceptions import SeedingError
from .base import BaseSolver, as_point
from .pareto import ParetoArchive


class DirectMultiSearch(BaseSolver):
    """Derivative-free bi-objective search over a list of non-dominated points.

    Each iteration picks the next list member round-robin and polls it along
    the ``2n`` signed coordinate directions, with step ``alpha * (upper -
    lower)``. Feasible poll points that are non-dominated join the list and
    inherit the centre's step. A poll that adds nothing halves the centre's
    step. The budget is checked between iterations, so a run may overshoot it
    by at most one poll.

    Parameters
    ----------
    budget : int
        Evaluations after which no new iteration starts.
    initial_step : float
        Starting step as a fraction of each variable's range.
    min_step : float
        Points whose step fell below this are no longer polled.
    """

    def __init__(self, budget=51000, initial_step=0.1, min_step=1e-7):
        self.budget = budget
        self.initial_step = initial_step
        self.min_step = min_step

    def fit(self, problem, x0=None):
        budget = check_budget(self.budget)
        alpha0 = check_fraction(self.initial_step, "initial_step", 0.0, 1.0)
        n0 = problem.n_evaluations
        seeds = self._seeds(problem, x0)

        archive = ParetoArchive()
        step = {}
        for ev in problem.evaluate_many(seeds):
            if ev.feasible and archive.add(as_point(ev)):
                step[ev.index] = alpha0
        if len(archive) == 0:
            raise SeedingError("no feasible point in the initial list")

        span = problem.upper - problem.lower
        dim = problem.dim
        cursor = 0
        n_iter = 0
        while problem.n_evaluations - n0 < budget:
            centers = [p for p in archive.points if step[p.index] >= self.min_step]
            if not centers:
                break
            center = centers[cursor % len(centers)]
            cursor += 1
            alpha = step[center.index]
            polls = []
            for i in range(dim):
                for sign in (1.0, -1.0):
                    y = center.x.copy()
                    y[i] = min(max(y[i] + sign * alpha * span[i], problem.lower[i]), problem.upper[i])
                    if y[i] != center.x[i]:
                        polls.append(y)
            success = False
            for ev in problem.evaluate_many(polls):
                if ev.feasible and archive.add(as_point(ev)):
                    step[ev.index] = alpha
                    success = True
            if not success:
                step[center.index] = 0.5 * alpha
            n_iter += 1

        self.front_ = archive.front()
        self.n_evaluations_ = problem.n_evaluations - n0
        self.n_iterations_ = n_iter
        self.steps_ = np.array([step[p.index] for p in self.front_])
        return self
