"""Exception hierarchy shared by all roadalign modules."""


class RoadAlignError(Exception):
    """Base class for every error raised by this package."""


class TerrainError(RoadAlignError):
    """Terrain data could not be loaded or queried."""


class MalformedTerrainError(TerrainError):
    """Raster or grid file has inconsistent dimensions."""


class TerrainDataError(TerrainError):
    """Raster contains missing or non-finite samples."""


class OutOfBoundsError(TerrainError):
    """A query point lies outside the terrain footprint."""


class DegenerateGeometryError(RoadAlignError):
    """Intersection points produce an undefined curve (coincident points, U-turns)."""


class SeedingError(RoadAlignError):
    """No feasible starting design could be produced."""


class ConfigError(RoadAlignError):
    """Run configuration is missing a field or holds an invalid value."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class SolverError(RoadAlignError):
    """Solver was misconfigured or failed during a run."""
