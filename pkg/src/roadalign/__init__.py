"""Bi-objective 3-D road alignment design: geometry, surrogate costs and Pareto solvers."""

from .alignment import AlignmentDesign, HorizontalGeometry, build_horizontal, build_segments, geometry_report
from .constraints import ConstraintConfig, ConstraintReport, evaluate_constraints
from .costing import CostBreakdown, CostParameters, evaluate_costs
from .exceptions import (
    ConfigError,
    DegenerateGeometryError,
    MalformedTerrainError,
    OutOfBoundsError,
    RoadAlignError,
    SeedingError,
    SolverError,
    TerrainDataError,
    TerrainError,
)
from .model import SurrogateCostModel
from .terrain import TerrainGrid, load_terrain

__version__ = "0.1.0"

__all__ = [
    "AlignmentDesign",
    "ConfigError",
    "ConstraintConfig",
    "ConstraintReport",
    "CostBreakdown",
    "CostParameters",
    "DegenerateGeometryError",
    "HorizontalGeometry",
    "MalformedTerrainError",
    "OutOfBoundsError",
    "RoadAlignError",
    "SeedingError",
    "SolverError",
    "SurrogateCostModel",
    "TerrainDataError",
    "TerrainError",
    "TerrainGrid",
    "build_horizontal",
    "build_segments",
    "evaluate_constraints",
    "evaluate_costs",
    "geometry_report",
    "load_terrain",
]
