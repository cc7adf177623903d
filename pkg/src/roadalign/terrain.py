"""Piecewise-planar ground model over a uniform rectangular grid.

Each grid cell ``(u, v)`` carries a plane ``z = A[v, u] * x + B[v, u] * y + C[v, u]``
fitted to the four lattice samples at its corners. Cells are half-open,
``[x_u, x_{u+1}) x [y_v, y_{v+1})``, except that the outer upper edges of the
footprint belong to the last row/column so the footprint is closed.

Raster arrays are indexed ``raster[iy, ix]`` with ``iy`` growing northwards
(increasing y). The ASCII grid file stores rows north-first, like the usual
ESRI layout, and the loader flips them.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import MalformedTerrainError, OutOfBoundsError, TerrainDataError

__all__ = [
    "TerrainGrid",
    "fit_cell_planes",
    "load_terrain",
    "read_ascii_grid",
    "write_ascii_grid",
    "synthetic_raster",
    "TERRAIN_KINDS",
]

# relative slack for points that land a hair outside the footprint after
# floating-point interpolation
_EDGE_SLACK = 1e-9


@dataclass(frozen=True)
class TerrainGrid:
    """Immutable grid of planar patches.

    Attributes
    ----------
    origin_x, origin_y : float
        Lower-left corner of the footprint (meters).
    cell_size : float
        Edge length of every square cell (meters).
    A, B, C : ndarray of shape (n_rows, n_cols)
        Plane coefficients per cell; ``A`` and ``B`` are slopes, ``C`` meters.
    """

    origin_x: float
    origin_y: float
    cell_size: float
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (self.cell_size > 0 and math.isfinite(self.cell_size)):
            raise MalformedTerrainError(f"cell_size must be positive, got {self.cell_size}")
        arrays = []
        for name in ("A", "B", "C"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
                raise MalformedTerrainError(f"coefficient array {name} must be 2-D and non-empty")
            if not np.all(np.isfinite(arr)):
                raise TerrainDataError(f"coefficient array {name} has non-finite entries")
            arr.setflags(write=False)
            arrays.append(arr)
        if not (arrays[0].shape == arrays[1].shape == arrays[2].shape):
            raise MalformedTerrainError("coefficient arrays A, B, C differ in shape")
        for name, arr in zip(("A", "B", "C"), arrays):
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "origin_x", float(self.origin_x))
        object.__setattr__(self, "origin_y", float(self.origin_y))
        object.__setattr__(self, "cell_size", float(self.cell_size))

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    @property
    def n_cols(self) -> int:
        return self.A.shape[1]

    @property
    def x_max(self) -> float:
        return self.origin_x + self.n_cols * self.cell_size

    @property
    def y_max(self) -> float:
        return self.origin_y + self.n_rows * self.cell_size

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """``(x_min, y_min, x_max, y_max)`` of the footprint."""
        return self.origin_x, self.origin_y, self.x_max, self.y_max

    def x_line(self, u: int) -> float:
        """x coordinate of vertical grid line ``u`` (0 .. n_cols)."""
        return self.origin_x + u * self.cell_size

    def y_line(self, v: int) -> float:
        return self.origin_y + v * self.cell_size

    def contains(self, x: float, y: float) -> bool:
        slack = _EDGE_SLACK * self.cell_size
        return (
            self.origin_x - slack <= x <= self.x_max + slack
            and self.origin_y - slack <= y <= self.y_max + slack
        )

    def _index(self, coord, origin, n):
        t = (coord - origin) / self.cell_size
        i = math.floor(t)
        if i < 0:
            if t >= -_EDGE_SLACK:
                return 0
            return None
        if i >= n:
            if t <= n + _EDGE_SLACK:
                return n - 1
            return None
        return i

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """Return the ``(u, v)`` column/row index of the cell containing ``(x, y)``."""
        u = self._index(x, self.origin_x, self.n_cols)
        v = self._index(y, self.origin_y, self.n_rows)
        if u is None or v is None:
            raise OutOfBoundsError(f"point ({x}, {y}) lies outside terrain footprint {self.bounds}")
        return u, v

    @cached_property
    def _planes(self):
        return [list(zip(a, b, c)) for a, b, c in zip(self.A.tolist(), self.B.tolist(), self.C.tolist())]

    def plane(self, u: int, v: int) -> tuple[float, float, float]:
        """``(A, B, C)`` of cell ``(u, v)`` as Python floats."""
        return self._planes[v][u]

    def ground_elevation(self, x: float, y: float) -> float:
        u, v = self.cell_of(x, y)
        return float(self.A[v, u] * x + self.B[v, u] * y + self.C[v, u])

    def elevations(self, x, y) -> np.ndarray:
        """Vectorised :meth:`ground_elevation` over coordinate arrays."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        tx = (x - self.origin_x) / self.cell_size
        ty = (y - self.origin_y) / self.cell_size
        if np.any(tx < -_EDGE_SLACK) or np.any(tx > self.n_cols + _EDGE_SLACK) or \
                np.any(ty < -_EDGE_SLACK) or np.any(ty > self.n_rows + _EDGE_SLACK):
            raise OutOfBoundsError("query points outside terrain footprint")
        u = np.clip(np.floor(tx).astype(int), 0, self.n_cols - 1)
        v = np.clip(np.floor(ty).astype(int), 0, self.n_rows - 1)
        return self.A[v, u] * x + self.B[v, u] * y + self.C[v, u]

    def translated(self, dx: float, dy: float) -> "TerrainGrid":
        """Same ground shape shifted by ``(dx, dy)`` in plan."""
        return TerrainGrid(
            self.origin_x + dx,
            self.origin_y + dy,
            self.cell_size,
            self.A,
            self.B,
            self.C - self.A * dx - self.B * dy,
        )

    @classmethod
    def from_raster(cls, raster, cell_size, origin_x=0.0, origin_y=0.0) -> "TerrainGrid":
        return load_terrain(raster, cell_size, origin_x, origin_y)


def fit_cell_planes(raster, cell_size, origin_x=0.0, origin_y=0.0):
    """Least-squares plane through the four corner samples of every cell.

    With local coordinates ``(p, q)`` in {0, 1}^2 the normal equations have the
    closed-form solution used below; the result is then shifted to global
    coordinates.
    """
    z = np.asarray(raster, dtype=float)
    z00 = z[:-1, :-1]
    z10 = z[:-1, 1:]
    z01 = z[1:, :-1]
    z11 = z[1:, 1:]
    a_local = 0.5 * ((z10 - z00) + (z11 - z01))
    b_local = 0.5 * ((z01 - z00) + (z11 - z10))
    c_local = 0.25 * (z00 + z10 + z01 + z11) - 0.5 * a_local - 0.5 * b_local

    n_rows, n_cols = a_local.shape
    x0 = origin_x + cell_size * np.arange(n_cols)[None, :]
    y0 = origin_y + cell_size * np.arange(n_rows)[:, None]
    A = a_local / cell_size
    B = b_local / cell_size
    C = c_local - A * x0 - B * y0
    return A, B, C


def load_terrain(raster, cell_size, origin_x=0.0, origin_y=0.0) -> TerrainGrid:
    """Build a :class:`TerrainGrid` from lattice samples ``raster[iy, ix]``."""
    try:
        z = np.array(raster, dtype=float)
    except (ValueError, TypeError) as exc:
        raise MalformedTerrainError(f"raster is not rectangular: {exc}") from None
    if z.ndim != 2:
        raise MalformedTerrainError(f"raster must be 2-D, got shape {z.shape}")
    if z.shape[0] < 2 or z.shape[1] < 2:
        raise MalformedTerrainError(f"raster needs at least 2x2 samples, got {z.shape}")
    if not np.all(np.isfinite(z)):
        raise TerrainDataError("raster contains missing or non-finite samples")
    if not (cell_size > 0):
        raise MalformedTerrainError(f"cell_size must be positive, got {cell_size}")
    A, B, C = fit_cell_planes(z, cell_size, origin_x, origin_y)
    return TerrainGrid(origin_x, origin_y, cell_size, A, B, C)


_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


def read_ascii_grid(path) -> tuple[np.ndarray, float, float, float]:
    """Read an ASCII lattice file.

    Returns ``(raster, cell_size, x_ll, y_ll)`` with ``raster[iy, ix]`` ordered
    south-to-north. ``ncols``/``nrows`` count samples, not cells.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(path)
    with open(path) as fh:
        text = fh.read()
    lines = text.splitlines()
    header = {}
    body_start = 0
    for i, line in enumerate(lines):
        parts = line.split()
        if not parts:
            continue
        key = parts[0].lower()
        if key in _HEADER_KEYS:
            if len(parts) != 2:
                raise MalformedTerrainError(f"bad header line {i + 1}: {line!r}")
            header[key] = parts[1]
            body_start = i + 1
        else:
            break
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise MalformedTerrainError(f"grid header missing {', '.join(missing)}")
    try:
        ncols = int(header["ncols"])
        nrows = int(header["nrows"])
        x_ll = float(header["xllcorner"])
        y_ll = float(header["yllcorner"])
        cell_size = float(header["cellsize"])
    except ValueError as exc:
        raise MalformedTerrainError(f"unparseable grid header: {exc}") from None
    tokens = " ".join(lines[body_start:]).split()
    if len(tokens) != ncols * nrows:
        raise MalformedTerrainError(
            f"header declares {ncols}x{nrows}={ncols * nrows} values, file holds {len(tokens)}"
        )
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError as exc:
        raise TerrainDataError(f"non-numeric elevation sample: {exc}") from None
    raster = values.reshape(nrows, ncols)[::-1, :]
    return raster, cell_size, x_ll, y_ll


def load_ascii_terrain(path) -> TerrainGrid:
    raster, cell_size, x_ll, y_ll = read_ascii_grid(path)
    return load_terrain(raster, cell_size, x_ll, y_ll)


def write_ascii_grid(path, raster, cell_size, x_ll=0.0, y_ll=0.0):
    """Write ``raster[iy, ix]`` (south-to-north rows) as an ASCII lattice file."""
    z = np.asarray(raster, dtype=float)
    nrows, ncols = z.shape
    out = [
        f"ncols {ncols}",
        f"nrows {nrows}",
        f"xllcorner {x_ll!r}",
        f"yllcorner {y_ll!r}",
        f"cellsize {float(cell_size)!r}",
    ]
    for row in z[::-1, :]:
        out.append(" ".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")


TERRAIN_KINDS = ("plane", "ridge", "valley", "sinusoidal")


def synthetic_raster(
    kind,
    width,
    height,
    cell_size,
    *,
    base=100.0,
    slope_x=0.0,
    slope_y=0.0,
    amplitude=10.0,
    wavelength=200.0,
    n_waves=4,
    seed=0,
):
    """Sample a synthetic ground surface on a lattice covering ``width x height``.

    ``plane`` is ``base + slope_x * x + slope_y * y``. ``ridge`` and ``valley``
    add a Gaussian crest/trough running north-south through the middle, with
    ``amplitude`` as its height and ``wavelength`` as its width. ``sinusoidal``
    superposes ``n_waves`` plane waves with random directions and phases drawn
    from ``seed``.
    """
    if kind not in TERRAIN_KINDS:
        raise ValueError(f"unknown terrain kind {kind!r}; choose from {TERRAIN_KINDS}")
    nx = int(round(width / cell_size))
    ny = int(round(height / cell_size))
    if nx < 1 or ny < 1 or not math.isclose(nx * cell_size, width) or not math.isclose(ny * cell_size, height):
        raise ValueError("width and height must be positive multiples of cell_size")
    x = cell_size * np.arange(nx + 1)
    y = cell_size * np.arange(ny + 1)
    X, Y = np.meshgrid(x, y)
    z = base + slope_x * X + slope_y * Y
    if kind == "ridge" or kind == "valley":
        sign = 1.0 if kind == "ridge" else -1.0
        z = z + sign * amplitude * np.exp(-0.5 * ((X - 0.5 * width) / (0.5 * wavelength)) ** 2)
    elif kind == "sinusoidal":
        rng = np.random.default_rng(seed)
        directions = rng.uniform(0.0, 2.0 * math.pi, n_waves)
        phases = rng.uniform(0.0, 2.0 * math.pi, n_waves)
        scales = rng.uniform(0.5, 1.5, n_waves)
        for ang, ph, sc in zip(directions, phases, scales):
            k = 2.0 * math.pi / (wavelength * sc)
            z = z + (amplitude / n_waves) * np.sin(k * (math.cos(ang) * X + math.sin(ang) * Y) + ph)
    return z
