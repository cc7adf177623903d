"""Feasibility checks with signed violations (``<= 0`` means satisfied)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .alignment import AlignmentDesign, HorizontalGeometry, build_horizontal, station_coordinates
from .exceptions import DegenerateGeometryError, OutOfBoundsError

__all__ = [
    "FEASIBILITY_TOL",
    "ConstraintConfig",
    "ConstraintReport",
    "check_overlap",
    "check_radius",
    "check_grade",
    "check_elevation_corridor",
    "check_boxes",
    "aggregate",
    "penalty",
    "evaluate_constraints",
]

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class ConstraintConfig:
    """Box bounds per IP plus the design standards.

    ``boxes`` is an (N, 4) array of ``(x_l, x_u, y_l, y_u)`` rows.
    """

    boxes: np.ndarray
    r_min: float = 20.0
    G_max: float = 0.15
    z_bar: float = 20.0

    def __post_init__(self):
        boxes = np.array(self.boxes, dtype=float)
        if boxes.ndim != 2 or boxes.shape[1] != 4:
            raise ValueError("boxes must be an (N, 4) array of (x_l, x_u, y_l, y_u)")
        if np.any(boxes[:, 0] > boxes[:, 1]) or np.any(boxes[:, 2] > boxes[:, 3]):
            raise ValueError("every box needs x_l <= x_u and y_l <= y_u")
        if not self.r_min > 0:
            raise ValueError(f"r_min must be positive, got {self.r_min}")
        if not self.G_max > 0:
            raise ValueError(f"G_max must be positive, got {self.G_max}")
        if not self.z_bar >= 0:
            raise ValueError(f"z_bar must be non-negative, got {self.z_bar}")
        boxes.setflags(write=False)
        object.__setattr__(self, "boxes", boxes)

    @property
    def n_ips(self) -> int:
        return self.boxes.shape[0]


@dataclass(frozen=True)
class ConstraintReport:
    """Violations grouped by constraint family."""

    violations: dict = field(default_factory=dict)
    tol: float = FEASIBILITY_TOL

    @property
    def worst(self) -> float:
        vals = [float(np.max(v)) for v in self.violations.values() if np.size(v)]
        return max(vals) if vals else -math.inf

    @property
    def feasible(self) -> bool:
        return self.worst <= self.tol

    def violated(self) -> dict:
        """Families with at least one violation above tolerance."""
        return {k: v for k, v in self.violations.items() if np.size(v) and np.max(v) > self.tol}

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "worst": self.worst,
            "violations": {k: np.asarray(v, dtype=float).tolist() for k, v in self.violations.items()},
        }

    def summary(self) -> str:
        lines = [f"feasible: {self.feasible}", f"worst violation: {self.worst:.6g}"]
        for name, v in self.violations.items():
            v = np.asarray(v, dtype=float)
            bad = np.flatnonzero(v > self.tol)
            worst = float(v.max()) if v.size else float("nan")
            lines.append(f"{name}: n={v.size} max={worst:.6g} violated={bad.tolist()}")
        return "\n".join(lines) + "\n"


def check_overlap(geom: HorizontalGeometry) -> np.ndarray:
    """One value per tangent chord: ``L_prev + L_next - chord``.

    The start and end act as zero-length curves, so the first and last chord
    are covered too. Positive means the two curves overlap.
    """
    pts = geom.ips
    L = np.concatenate([[0.0], geom.L, [0.0]])
    out = np.empty(geom.n_ips + 1)
    for k in range(geom.n_ips + 1):
        chord = math.hypot(*(pts[k + 1] - pts[k]))
        # |CT_{k-1} - IP_{k-1}| - |TC_k - IP_{k-1}|, with |TC_k - IP_{k-1}| = chord - L_k
        out[k] = L[k] - (chord - L[k + 1])
    return out


def check_radius(design: AlignmentDesign, r_min: float) -> np.ndarray:
    return r_min - design.R


def _profile(design: AlignmentDesign, geom: HorizontalGeometry):
    """Station-pair differences along the whole vertical profile.

    Returns (|dz|, horizontal distance) for every consecutive pair, tangent
    pieces first per chord then the arc joining it to the next chord.
    """
    z_st = design.station_elevations()
    dz = []
    dist = []
    n = design.n_ips
    for t in range(n + 1):
        zt = z_st[t]
        d = geom.chord_length(t) / design.m[t]
        dz.extend(np.abs(np.diff(zt)))
        dist.extend([d] * design.m[t])
        if t < n:
            dz.append(abs(z_st[t + 1][0] - zt[-1]))
            dist.append(0.0 if geom.collinear[t] else design.R[t] * geom.beta[t])
    return np.array(dz), np.array(dist)


def check_grade(design: AlignmentDesign, geom: HorizontalGeometry, G_max: float) -> np.ndarray:
    """``|dz| - d * G_max`` per station pair; arcs use their horizontal length."""
    dz, dist = _profile(design, geom)
    return dz - dist * G_max


def station_points(design: AlignmentDesign, geom: HorizontalGeometry):
    """Plan coordinates and elevations of all variable stations, in Z order."""
    xy = np.empty((design.n_vertical, 2))
    z = np.empty(design.n_vertical)
    z_st = design.station_elevations()
    for t in range(design.n_ips + 1):
        for j in range(design.m[t] + 1):
            idx = design.variable_index(t, j)
            if idx is None:
                continue
            xy[idx] = station_coordinates(geom, t, j)
            z[idx] = z_st[t][j]
    return xy, z


def check_elevation_corridor(design: AlignmentDesign, geom: HorizontalGeometry, terrain, z_bar: float) -> np.ndarray:
    """``|z - z_g| - z_bar`` at every variable station."""
    xy, z = station_points(design, geom)
    zg = terrain.elevations(xy[:, 0], xy[:, 1])
    return np.abs(z - zg) - z_bar


def check_boxes(design: AlignmentDesign, config: ConstraintConfig) -> np.ndarray:
    """Signed distance outside the box, per coordinate: ``[x_1..x_N, y_1..y_N]``."""
    b = config.boxes
    if b.shape[0] != design.n_ips:
        raise ValueError(f"config has {b.shape[0]} boxes for {design.n_ips} intersection points")
    vx = np.maximum(b[:, 0] - design.X, design.X - b[:, 1])
    vy = np.maximum(b[:, 2] - design.Y, design.Y - b[:, 3])
    return np.concatenate([vx, vy])


def aggregate(parts: dict, tol: float = FEASIBILITY_TOL) -> ConstraintReport:
    return ConstraintReport({k: np.asarray(v, dtype=float) for k, v in parts.items()}, tol)


def penalty(report: ConstraintReport, weight: float = 1.0) -> float:
    """Exterior quadratic penalty ``weight * sum(max(0, v)^2)``."""
    total = 0.0
    for v in report.violations.values():
        pos = np.maximum(np.asarray(v, dtype=float), 0.0)
        total += float(np.dot(pos, pos))
    return weight * total


def evaluate_constraints(design: AlignmentDesign, terrain, config: ConstraintConfig, geom=None) -> ConstraintReport:
    """Run every check. Unbuildable geometry is reported as its own family."""
    parts = {"box": check_boxes(design, config), "radius": check_radius(design, config.r_min)}
    if geom is None:
        try:
            geom = build_horizontal(design)
        except DegenerateGeometryError:
            parts["geometry"] = np.array([math.inf])
            return aggregate(parts)
    parts["overlap"] = check_overlap(geom)
    parts["grade"] = check_grade(design, geom, config.G_max)
    try:
        parts["corridor"] = check_elevation_corridor(design, geom, terrain, config.z_bar)
    except OutOfBoundsError:
        parts["corridor"] = np.array([math.inf])
    return aggregate(parts)
