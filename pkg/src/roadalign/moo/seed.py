"""Deterministic construction of a feasible starting alignment."""

from __future__ import annotations

import math

import numpy as np

from ..alignment import AlignmentDesign, build_horizontal, station_coordinates, vertical_count
from ..constraints import ConstraintConfig, evaluate_constraints
from ..exceptions import DegenerateGeometryError, OutOfBoundsError, SeedingError

__all__ = ["seed_alignment", "grade_limited_profile"]

# curves may use at most this share of each adjacent chord
_OVERLAP_SHARE = 0.45


def grade_limited_profile(ground, dist, z_start, z_end, G_max):
    """Follow ``ground`` as closely as a grade limit allows.

    ``ground[i]`` is the target at interior node ``i`` and ``dist[i]`` the
    horizontal distance from the previous node (``dist`` has one more entry,
    the final step to the end point). Elevations are first clipped to the band
    reachable from both fixed ends, then a forward pass clips each node to the
    grade cone of its predecessor; the band is Lipschitz, so the cone always
    intersects it.
    """
    ground = np.asarray(ground, dtype=float)
    dist = np.asarray(dist, dtype=float)
    D = np.cumsum(dist)
    total = D[-1]
    D = D[:-1]
    if abs(z_end - z_start) > G_max * total + 1e-9:
        raise SeedingError(f"grade: end points differ by {abs(z_end - z_start):.3f} m over {total:.3f} m")
    lo = np.maximum(z_start - G_max * D, z_end - G_max * (total - D))
    hi = np.minimum(z_start + G_max * D, z_end + G_max * (total - D))
    z = np.clip(ground, lo, hi)
    prev = z_start
    for i in range(z.size):
        step = G_max * dist[i]
        z[i] = min(max(z[i], prev - step, lo[i]), prev + step, hi[i])
        prev = z[i]
    return z


def _ip_positions(start, end, config):
    n = config.n_ips
    frac = np.arange(1, n + 1) / (n + 1)
    pts = start[None, :2] + frac[:, None] * (end[:2] - start[:2])[None, :]
    b = config.boxes
    outside = (pts[:, 0] < b[:, 0]) | (pts[:, 0] > b[:, 1]) | (pts[:, 1] < b[:, 2]) | (pts[:, 1] > b[:, 3])
    centers = np.column_stack([0.5 * (b[:, 0] + b[:, 1]), 0.5 * (b[:, 2] + b[:, 3])])
    pts[outside] = centers[outside]
    return pts


def _radii(pts_all, spacing, config, fraction):
    n = pts_all.shape[0] - 2
    R = np.empty(n)
    for k in range(n):
        prev, ip, nxt = pts_all[k], pts_all[k + 1], pts_all[k + 2]
        a = prev - ip
        b = nxt - ip
        na, nb = math.hypot(*a), math.hypot(*b)
        if na == 0 or nb == 0:
            raise SeedingError(f"geometry: intersection point {k + 1} coincides with a neighbour")
        c = min(1.0, max(-1.0, float(np.dot(a, b) / (na * nb))))
        theta = math.acos(c)
        r = fraction * spacing
        if theta < math.pi - 1e-8:
            # largest radius whose tangent length fits in its share of both chords
            r_fit = _OVERLAP_SHARE * min(na, nb) * math.tan(0.5 * theta)
            r = min(r, r_fit)
        R[k] = max(config.r_min, r)
    return R


def seed_alignment(terrain, config: ConstraintConfig, start, end, m=5, radius_fraction=0.25) -> AlignmentDesign:
    """Feasible design built from the straight start-end line.

    IPs sit evenly on the line (moved to their box centre when the box
    excludes the line), radii are ``max(r_min, radius_fraction * spacing)``
    capped so curves cannot overlap, and elevations follow the ground subject
    to the grade limit. Raises :class:`SeedingError` naming the violated
    constraint families if the result is still infeasible.
    """
    start = np.asarray(start, dtype=float)
    end = np.asarray(end, dtype=float)
    n = config.n_ips
    if np.ndim(m) == 0:
        m = (int(m),) * (n + 1)
    m = tuple(int(v) for v in m)
    try:
        if start.size == 2:
            start = np.append(start, terrain.ground_elevation(*start))
        if end.size == 2:
            end = np.append(end, terrain.ground_elevation(*end))
    except OutOfBoundsError as exc:
        raise SeedingError(f"terrain: start/end outside footprint ({exc})") from None

    ips = _ip_positions(start, end, config)
    pts_all = np.vstack([start[:2], ips, end[:2]])
    spacing = math.hypot(*(end[:2] - start[:2])) / (n + 1)
    R = _radii(pts_all, spacing, config, radius_fraction)

    flat = AlignmentDesign(start, end, ips[:, 0], ips[:, 1], R, np.zeros(vertical_count(m)), m)
    try:
        geom = build_horizontal(flat)
    except DegenerateGeometryError as exc:
        raise SeedingError(f"geometry: {exc}") from None

    # walk every station in profile order, fixed ends excluded
    xy = []
    dist = []
    step_from_prev = 0.0
    for t in range(n + 1):
        d = geom.chord_length(t) / m[t]
        for j in range(m[t] + 1):
            if j > 0:
                step_from_prev += d
            if flat.variable_index(t, j) is None:
                continue
            xy.append(station_coordinates(geom, t, j))
            dist.append(step_from_prev)
            step_from_prev = 0.0
        if t < n:
            step_from_prev += 0.0 if geom.collinear[t] else R[t] * geom.beta[t]
    dist.append(step_from_prev)
    xy = np.array(xy)
    try:
        ground = terrain.elevations(xy[:, 0], xy[:, 1])
    except OutOfBoundsError as exc:
        raise SeedingError(f"terrain: seed stations leave the footprint ({exc})") from None
    Z = grade_limited_profile(ground, dist, start[2], end[2], config.G_max)

    design = AlignmentDesign(start, end, ips[:, 0], ips[:, 1], R, Z, m)
    report = evaluate_constraints(design, terrain, config, geom)
    if not report.feasible:
        names = ", ".join(sorted(report.violated()))
        raise SeedingError(f"seed alignment violates: {names} (worst {report.worst:.4g})")
    return design
