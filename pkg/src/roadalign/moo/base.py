"""Shared estimator plumbing for the multi-objective solvers."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from ..exceptions import SeedingError
from .pareto import ParetoPoint


class BaseSolver(BaseEstimator):
    """sklearn-style solver: configure in ``__init__``, run with ``fit``.

    After ``fit(problem, x0)`` the estimator exposes ``front_`` (a
    :class:`~roadalign.moo.pareto.ParetoFront`), ``n_evaluations_`` and
    ``n_iterations_``.
    """

    def _check_fitted(self):
        if not hasattr(self, "front_"):
            raise NotFittedError(f"{type(self).__name__} has not been fitted")

    def predict(self, problem=None):
        """Objective values of the fitted front, shape (n, 2)."""
        self._check_fitted()
        return self.front_.F

    @staticmethod
    def _seeds(problem, x0):
        if x0 is None:
            raise SeedingError("an initial point is required")
        seeds = np.atleast_2d(np.asarray(x0, dtype=float))
        if seeds.shape[0] == 0 or seeds.size == 0:
            raise SeedingError("initial list is empty")
        if seeds.shape[1] != problem.dim:
            raise SeedingError(f"initial points must have {problem.dim} entries, got {seeds.shape[1]}")
        return seeds


def as_point(ev) -> ParetoPoint:
    return ParetoPoint(ev.f, ev.x, ev.index)
