"""Generational Pareto-based genetic algorithm with constraint domination."""

from __future__ import annotations

import numpy as np

from .._validation import check_budget, check_fraction, check_positive_int, check_rng
from ..exceptions import SolverError
from .base import BaseSolver, as_point
from .pareto import ParetoArchive

__all__ = ["EvolutionaryPareto", "constrained_ranks", "crowding_distance"]


def _nondominated_ranks(F):
    """Front number (0 = best) of each row of ``F`` by repeated peeling."""
    n = F.shape[0]
    ranks = np.full(n, -1, dtype=int)
    if n == 0:
        return ranks
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dom = le & lt  # dom[i, j]: i dominates j
    n_dominators = dom.sum(axis=0)
    current = np.flatnonzero(n_dominators == 0)
    r = 0
    while current.size:
        ranks[current] = r
        n_dominators = n_dominators - dom[current].sum(axis=0)
        n_dominators[ranks >= 0] = -1
        current = np.flatnonzero(n_dominators == 0)
        r += 1
    return ranks


def constrained_ranks(F, penalty, feasible):
    """Ranks under constraint domination.

    Feasible points are sorted into non-dominated fronts; every infeasible
    point comes after all of them, ordered by penalty (ties share a rank).
    """
    F = np.asarray(F, dtype=float)
    penalty = np.asarray(penalty, dtype=float)
    feasible = np.asarray(feasible, dtype=bool)
    ranks = np.empty(F.shape[0], dtype=int)
    idx = np.flatnonzero(feasible)
    fr = _nondominated_ranks(F[idx])
    ranks[idx] = fr
    base = fr.max() + 1 if fr.size else 0
    bad = np.flatnonzero(~feasible)
    if bad.size:
        _, inv = np.unique(penalty[bad], return_inverse=True)
        ranks[bad] = base + inv
    return ranks


def crowding_distance(F):
    n = F.shape[0]
    d = np.zeros(n)
    if n <= 2:
        d[:] = np.inf
        return d
    for k in range(F.shape[1]):
        order = np.argsort(F[:, k], kind="stable")
        vals = F[order, k]
        d[order[0]] = d[order[-1]] = np.inf
        span = vals[-1] - vals[0]
        if not np.isfinite(span) or span <= 0:
            continue
        d[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return d


def _rank_and_crowd(F, penalty, feasible):
    ranks = constrained_ranks(F, penalty, feasible)
    crowd = np.zeros(F.shape[0])
    for r in np.unique(ranks):
        members = np.flatnonzero(ranks == r)
        if feasible[members[0]]:
            crowd[members] = crowding_distance(F[members])
    return ranks, crowd


class EvolutionaryPareto(BaseSolver):
    """Pareto-dominance genetic algorithm.

    Binary tournaments on (rank, crowding) pick parents; simulated binary
    crossover with rate ``crossover_rate`` and Gaussian mutation of each gene
    with probability ``mutation_rate`` (default ``1 / dim``) produce one
    offspring generation, clipped to the bounds. Parents and offspring are
    merged and truncated back to ``population_size`` by rank then crowding.
    Feasible points ever evaluated are kept in a non-dominated archive, which
    is what ``front_`` returns.

    ``front_history_`` holds the archive's objective values after every
    generation (the initial population counts as generation 0).
    """

    def __init__(
        self,
        population_size=120,
        budget=51000,
        crossover_rate=0.9,
        mutation_rate=None,
        eta_c=15.0,
        mutation_scale=0.05,
        init_scale=0.02,
        random_state=0,
    ):
        self.population_size = population_size
        self.budget = budget
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.eta_c = eta_c
        self.mutation_scale = mutation_scale
        self.init_scale = init_scale
        self.random_state = random_state

    def _initial_population(self, problem, x0, rng, size):
        span = problem.upper - problem.lower
        if x0 is None:
            return problem.lower + rng.random((size, problem.dim)) * span
        seeds = self._seeds(problem, x0)
        pop = np.empty((size, problem.dim))
        k = min(len(seeds), size)
        pop[:k] = seeds[:k]
        for i in range(k, size):
            base = seeds[i % len(seeds)]
            pop[i] = base + rng.normal(0.0, self.init_scale, problem.dim) * span
        return np.clip(pop, problem.lower, problem.upper)

    def _sbx(self, p1, p2, rng, lower, upper):
        eta = self.eta_c
        u = rng.random(p1.size)
        beta = np.where(u <= 0.5, (2.0 * u) ** (1.0 / (eta + 1.0)), (0.5 / (1.0 - u)) ** (1.0 / (eta + 1.0)))
        swap = rng.random(p1.size) < 0.5
        c1 = 0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2)
        c2 = 0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2)
        c1[swap], c2[swap] = c2[swap].copy(), c1[swap].copy()
        return np.clip(c1, lower, upper), np.clip(c2, lower, upper)

    def _mutate(self, x, rng, lower, upper, rate):
        mask = rng.random(x.size) < rate
        x = x + mask * rng.normal(0.0, self.mutation_scale, x.size) * (upper - lower)
        return np.clip(x, lower, upper)

    def fit(self, problem, x0=None):
        size = check_positive_int(self.population_size, "population_size")
        if size < 4:
            raise SolverError(f"population_size must be at least 4, got {size}")
        budget = check_budget(self.budget)
        pc = check_fraction(self.crossover_rate, "crossover_rate")
        pm = 1.0 / problem.dim if self.mutation_rate is None else check_fraction(self.mutation_rate, "mutation_rate")
        rng = check_rng(self.random_state)
        lo, hi = problem.lower, problem.upper
        n0 = problem.n_evaluations

        archive = ParetoArchive()
        evals = problem.evaluate_many(self._initial_population(problem, x0, rng, size))
        for ev in evals:
            if ev.feasible:
                archive.add(as_point(ev))
        history = [archive.front().F]
        gen = 0

        while problem.n_evaluations - n0 < budget:
            F = np.array([ev.f for ev in evals])
            pen = np.array([ev.penalty for ev in evals])
            feas = np.array([ev.feasible for ev in evals])
            ranks, crowd = _rank_and_crowd(F, pen, feas)

            def tournament():
                a, b = rng.integers(0, len(evals), 2)
                if ranks[a] != ranks[b]:
                    return a if ranks[a] < ranks[b] else b
                return a if crowd[a] >= crowd[b] else b

            children = []
            while len(children) < size:
                p1 = evals[tournament()].x
                p2 = evals[tournament()].x
                if rng.random() < pc:
                    c1, c2 = self._sbx(p1, p2, rng, lo, hi)
                else:
                    c1, c2 = p1.copy(), p2.copy()
                children.append(self._mutate(c1, rng, lo, hi, pm))
                if len(children) < size:
                    children.append(self._mutate(c2, rng, lo, hi, pm))
            offspring = problem.evaluate_many(children)
            for ev in offspring:
                if ev.feasible:
                    archive.add(as_point(ev))

            merged = evals + offspring
            F = np.array([ev.f for ev in merged])
            pen = np.array([ev.penalty for ev in merged])
            feas = np.array([ev.feasible for ev in merged])
            ranks, crowd = _rank_and_crowd(F, pen, feas)
            order = np.lexsort((-crowd, ranks))
            evals = [merged[i] for i in order[:size]]
            gen += 1
            history.append(archive.front().F)

        self.front_ = archive.front()
        self.front_history_ = history
        self.population_ = np.array([ev.x for ev in evals])
        self.n_evaluations_ = problem.n_evaluations - n0
        self.n_iterations_ = gen
        return self
