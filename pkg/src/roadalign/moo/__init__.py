"""Bi-objective problem definition, Pareto tools and solvers."""

from .dms import DirectMultiSearch
from .evolutionary import EvolutionaryPareto
from .pareto import ParetoArchive, ParetoFront, ParetoPoint, dominates, hypervolume, pareto_filter
from .problem import BiObjectiveProblem, Evaluation, EvaluationCounter, RoadAlignmentProblem, shifted_quadratics
from .scalarize import NadirUtopia, normalization_factors, weighted_sum_scalarize
from .seed import grade_limited_profile, seed_alignment
from .weighted_sum import WeightedSum, coordinate_search

SOLVERS = {"ws": WeightedSum, "dms": DirectMultiSearch, "ea": EvolutionaryPareto}

__all__ = [
    "BiObjectiveProblem",
    "DirectMultiSearch",
    "Evaluation",
    "EvaluationCounter",
    "EvolutionaryPareto",
    "NadirUtopia",
    "ParetoArchive",
    "ParetoFront",
    "ParetoPoint",
    "RoadAlignmentProblem",
    "SOLVERS",
    "WeightedSum",
    "coordinate_search",
    "dominates",
    "grade_limited_profile",
    "hypervolume",
    "normalization_factors",
    "pareto_filter",
    "seed_alignment",
    "shifted_quadratics",
    "weighted_sum_scalarize",
]
