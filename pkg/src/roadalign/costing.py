"""Surrogate earthwork and utility costs.

Every centreline segment is cut at the parameters where its plan projection
crosses a grid line or where road and ground elevations meet. Between two
consecutive parameters the ground is a single plane and the road is either
entirely in cut or entirely in fill, so the trapezoidal cross-section area
``W h + kappa h^2 / 2`` can be integrated in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .alignment import ArcSegment, TangentSegment, build_horizontal, build_segments
from .exceptions import OutOfBoundsError

__all__ = [
    "CostParameters",
    "SegmentCrossings",
    "SegmentCost",
    "CostBreakdown",
    "tangent_crossings",
    "tangent_cut_fill",
    "tangent_length",
    "arc_crossings",
    "arc_cut_fill",
    "arc_length",
    "segment_cut_fill",
    "evaluate_costs",
    "earthwork_cost",
]

_DEDUP_TOL = 1e-12
_ROOT_TOL = 1e-12
_ARC_SCAN = 32


@dataclass(frozen=True)
class CostParameters:
    """Unit prices and cross-section shape.

    ``kappa`` is the sum of the cotangents of the two side-slope angles. When
    ``C_b`` is given, borrow (fill surplus) is priced at ``C_b`` and waste (cut
    surplus) at ``C_w``; otherwise ``C_w`` prices the absolute imbalance.
    """

    C_c: float = 4.0
    C_f: float = 2.0
    C_w: float = 8.0
    C_u: float = 1.2
    W: float = 5.0
    kappa: float = 1.0
    C_b: Optional[float] = None
    gamma_shrink: float = 1.0

    def __post_init__(self):
        for name in ("C_c", "C_f", "C_w", "C_u"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise ValueError(f"{name} must be a finite non-negative cost, got {v}")
        if self.C_b is not None and not (self.C_b >= 0 and math.isfinite(self.C_b)):
            raise ValueError(f"C_b must be a finite non-negative cost, got {self.C_b}")
        if not (self.W > 0):
            raise ValueError(f"road width W must be positive, got {self.W}")
        if not (self.kappa >= 0):
            raise ValueError(f"kappa must be non-negative, got {self.kappa}")
        if not (self.gamma_shrink > 0):
            raise ValueError(f"gamma_shrink must be positive, got {self.gamma_shrink}")

    @classmethod
    def from_side_slopes(cls, theta1: float, theta2: float, **kwargs) -> "CostParameters":
        """Build from the two side-slope angles (radians)."""
        return cls(kappa=1.0 / math.tan(theta1) + 1.0 / math.tan(theta2), **kwargs)


@dataclass(frozen=True)
class SegmentCrossings:
    """Sorted break parameters of one segment.

    ``causes[i]`` says why ``s[i]`` is a break ("start", "end", "x", "y",
    "transition"); interval ``i`` spans ``s[i] .. s[i+1]``, lies in grid cell
    ``cells[i]`` and has cut/fill ``state[i]`` (+1 cut, -1 fill, 0 on grade).
    """

    s: np.ndarray
    causes: tuple
    cells: tuple
    state: np.ndarray

    @property
    def n_intervals(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class SegmentCost:
    kind: str
    index: tuple
    V_c: float
    V_f: float
    length: float


@dataclass(frozen=True)
class CostBreakdown:
    V_c: float
    V_f: float
    L: float
    Cost_e: float
    Cost_u: float
    segments: tuple = field(default=(), repr=False)

    @property
    def objectives(self) -> tuple[float, float]:
        return self.Cost_e, self.Cost_u

    def as_row(self) -> dict:
        return {"V_c": self.V_c, "V_f": self.V_f, "L": self.L, "Cost_e": self.Cost_e, "Cost_u": self.Cost_u}


def _merge_breaks(values, causes):
    order = sorted(range(len(values)), key=values.__getitem__)
    s_out = []
    c_out = []
    for i in order:
        v = values[i]
        if s_out and v - s_out[-1] <= _DEDUP_TOL:
            # keep endpoints exact; corner hits collapse to one break
            if causes[i] in ("start", "end"):
                s_out[-1] = v
                c_out[-1] = causes[i]
            continue
        s_out.append(v)
        c_out.append(causes[i])
    return s_out, c_out


def _line_params(a0, a1, s_lo, s_hi, origin, cell, n_lines):
    """Parameters in (s_lo, s_hi) where ``a0 + a1 s`` hits a grid line."""
    if a1 == 0.0:
        return []
    v_lo = a0 + a1 * s_lo
    v_hi = a0 + a1 * s_hi
    lo, hi = min(v_lo, v_hi), max(v_lo, v_hi)
    i_lo = max(1, math.floor((lo - origin) / cell) + 1)
    i_hi = min(n_lines - 1, math.ceil((hi - origin) / cell) - 1)
    out = []
    for i in range(i_lo, i_hi + 1):
        s = (origin + i * cell - a0) / a1
        if s_lo < s < s_hi:
            out.append(s)
    return out


def _check_inside(terrain, x, y):
    if not terrain.contains(x, y):
        raise OutOfBoundsError(f"segment point ({x:.6g}, {y:.6g}) leaves terrain footprint {terrain.bounds}")


def tangent_crossings(seg: TangentSegment, terrain) -> SegmentCrossings:
    s_lo, s_hi = seg.s_range
    px, py = float(seg.p0[0]), float(seg.p0[1])
    dx, dy = float(seg.p1[0] - seg.p0[0]), float(seg.p1[1] - seg.p0[1])
    for s in (s_lo, s_hi):
        _check_inside(terrain, px + s * dx, py + s * dy)
    vals = [s_lo, s_hi]
    causes = ["start", "end"]
    for s in _line_params(px, dx, s_lo, s_hi, terrain.origin_x, terrain.cell_size, terrain.n_cols + 1):
        vals.append(s)
        causes.append("x")
    for s in _line_params(py, dy, s_lo, s_hi, terrain.origin_y, terrain.cell_size, terrain.n_rows + 1):
        vals.append(s)
        causes.append("y")
    s_grid, c_grid = _merge_breaks(vals, causes)

    m, j = seg.m, seg.j
    dz = seg.z1 - seg.z0
    s_out = [s_grid[0]]
    c_out = [c_grid[0]]
    cells = []
    state = []
    for i in range(len(s_grid) - 1):
        a, b = s_grid[i], s_grid[i + 1]
        mid = 0.5 * (a + b)
        u, v = terrain.cell_of(px + mid * dx, py + mid * dy)
        A, B, C = terrain.plane(u, v)
        omega = A * px + B * py + C - seg.z1 + j * dz
        theta = A * dx + B * dy - m * dz
        pieces = [a]
        if theta != 0.0:
            root = -omega / theta
            if a + _DEDUP_TOL < root < b - _DEDUP_TOL:
                pieces.append(root)
        pieces.append(b)
        for p in range(len(pieces) - 1):
            lo, hi = pieces[p], pieces[p + 1]
            h_mid = omega + theta * 0.5 * (lo + hi)
            cells.append((u, v))
            state.append(1 if h_mid > 0 else (-1 if h_mid < 0 else 0))
            s_out.append(hi)
            c_out.append("transition" if p < len(pieces) - 2 else c_grid[i + 1])
    return SegmentCrossings(np.array(s_out), tuple(c_out), tuple(cells), np.array(state, dtype=int))


def _trapezoid_volume(h0, slope, ds, W, kappa):
    """Integral of ``W h + kappa h^2 / 2`` for ``h = h0 + slope * t``, t in [0, ds]."""
    return (
        (W * h0 + 0.5 * kappa * h0 * h0) * ds
        + 0.5 * (W * slope + kappa * h0 * slope) * ds * ds
        + kappa * slope * slope * ds * ds * ds / 6.0
    )


def tangent_cut_fill(seg: TangentSegment, terrain, params: CostParameters, crossings=None):
    """Return ``(V_c, V_f)`` of one tangent piece."""
    if crossings is None:
        crossings = tangent_crossings(seg, terrain)
    m, j = seg.m, seg.j
    dz = seg.z1 - seg.z0
    px, py = float(seg.p0[0]), float(seg.p0[1])
    dx, dy = float(seg.p1[0] - seg.p0[0]), float(seg.p1[1] - seg.p0[1])
    # |r_t'(s)|: the piece covers 1/m of the parameter range
    jac = m * seg.length
    W, kappa = params.W, params.kappa
    vc = 0.0
    vf = 0.0
    s = crossings.s
    for i, (u, v) in enumerate(crossings.cells):
        st = crossings.state[i]
        if st == 0:
            continue
        A, B, C = terrain.plane(u, v)
        omega = A * px + B * py + C - seg.z1 + j * dz
        theta = A * dx + B * dy - m * dz
        a = s[i]
        ds = s[i + 1] - a
        # shift the origin to the interval start: Omega -> h(a)
        h0 = omega + theta * a
        if st > 0:
            vc += _trapezoid_volume(h0, theta, ds, W, kappa) * jac
        else:
            vf += _trapezoid_volume(-h0, -theta, ds, W, kappa) * jac
    return max(vc, 0.0), max(vf, 0.0)


def tangent_length(seg: TangentSegment) -> float:
    return seg.length


def arc_length(seg: ArcSegment) -> float:
    return seg.length


def _angle_params(theta_tc, sweep, base_angles):
    """Map candidate angles (mod 2 pi) to parameters strictly inside (0, 1)."""
    lo = min(theta_tc, theta_tc + sweep)
    hi = max(theta_tc, theta_tc + sweep)
    out = []
    two_pi = 2.0 * math.pi
    for ang in base_angles:
        n0 = math.ceil((lo - ang) / two_pi)
        n1 = math.floor((hi - ang) / two_pi)
        for n in range(n0, n1 + 1):
            s = (ang + n * two_pi - theta_tc) / sweep
            if 0.0 < s < 1.0:
                out.append(s)
    return out


def _arc_extent(seg: ArcSegment):
    """Bounding box of the arc in plan."""
    xs = [seg.tc[0], seg.ct[0]]
    ys = [seg.tc[1], seg.ct[1]]
    for s in _angle_params(seg.theta_tc, seg.sweep, (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)):
        x, y = seg.plan(s)
        xs.append(float(x))
        ys.append(float(y))
    return min(xs), max(xs), min(ys), max(ys)


def _arc_h(seg, plane, s):
    A, B, C = plane
    ang = seg.theta_tc + seg.sweep * s
    x = seg.center[0] + seg.r * np.cos(ang)
    y = seg.center[1] + seg.r * np.sin(ang)
    return A * x + B * y + C - (seg.z0 + (seg.z1 - seg.z0) * s)


def _bisect(f, a, b, fa):
    while b - a > _ROOT_TOL:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
    return 0.5 * (a + b)


def arc_crossings(seg: ArcSegment, terrain) -> SegmentCrossings:
    if seg.degenerate:
        _check_inside(terrain, seg.tc[0], seg.tc[1])
        u, v = terrain.cell_of(seg.tc[0], seg.tc[1])
        return SegmentCrossings(np.array([0.0, 1.0]), ("start", "end"), ((u, v),), np.zeros(1, dtype=int))
    x_min, x_max, y_min, y_max = _arc_extent(seg)
    _check_inside(terrain, x_min, y_min)
    _check_inside(terrain, x_max, y_max)
    xc, yc, r = float(seg.center[0]), float(seg.center[1]), seg.r
    cs = terrain.cell_size

    angles = []
    causes_x = []
    u_lo = max(1, math.floor((x_min - terrain.origin_x) / cs))
    u_hi = min(terrain.n_cols - 1, math.ceil((x_max - terrain.origin_x) / cs))
    for u in range(u_lo, u_hi + 1):
        c = (terrain.x_line(u) - xc) / r
        if -1.0 < c < 1.0:
            a = math.acos(c)
            angles.extend((a, -a))
    xs = _angle_params(seg.theta_tc, seg.sweep, angles)
    angles = []
    v_lo = max(1, math.floor((y_min - terrain.origin_y) / cs))
    v_hi = min(terrain.n_rows - 1, math.ceil((y_max - terrain.origin_y) / cs))
    for v in range(v_lo, v_hi + 1):
        c = (terrain.y_line(v) - yc) / r
        if -1.0 < c < 1.0:
            a = math.asin(c)
            angles.extend((a, math.pi - a))
    ys = _angle_params(seg.theta_tc, seg.sweep, angles)
    s_grid, c_grid = _merge_breaks([0.0, 1.0] + xs + ys, ["start", "end"] + ["x"] * len(xs) + ["y"] * len(ys))

    s_out = [s_grid[0]]
    c_out = [c_grid[0]]
    cells = []
    state = []
    grid = np.linspace(0.0, 1.0, _ARC_SCAN + 1)
    for i in range(len(s_grid) - 1):
        a, b = s_grid[i], s_grid[i + 1]
        mid = 0.5 * (a + b)
        x, y = seg.plan(mid)
        u, v = terrain.cell_of(float(x), float(y))
        plane = terrain.plane(u, v)
        ss = a + (b - a) * grid
        hs = _arc_h(seg, plane, ss)
        roots = []
        for q in range(_ARC_SCAN):
            h0, h1 = hs[q], hs[q + 1]
            if h0 == 0.0 and 0 < q and hs[q - 1] * h1 < 0:
                roots.append(float(ss[q]))
            elif h0 * h1 < 0:
                f = lambda t, _p=plane: float(_arc_h(seg, _p, t))
                roots.append(_bisect(f, float(ss[q]), float(ss[q + 1]), float(h0)))
        pieces = [a] + [t for t in roots if a + _DEDUP_TOL < t < b - _DEDUP_TOL] + [b]
        for p in range(len(pieces) - 1):
            lo, hi = pieces[p], pieces[p + 1]
            h_mid = float(_arc_h(seg, plane, 0.5 * (lo + hi)))
            cells.append((u, v))
            state.append(1 if h_mid > 0 else (-1 if h_mid < 0 else 0))
            s_out.append(hi)
            c_out.append("transition" if p < len(pieces) - 2 else c_grid[i + 1])
    return SegmentCrossings(np.array(s_out), tuple(c_out), tuple(cells), np.array(state, dtype=int))


# Trigonometric moments on [0, 1]: integrals of cos(d t), sin(d t),
# t cos(d t), t sin(d t). Taylor series below |d| < 0.25 avoid cancellation.
_SERIES_CUTOFF = 0.25
_N_TERMS = 10
_FACT = [math.factorial(i) for i in range(2 * _N_TERMS + 4)]


def _moments(d):
    if abs(d) < _SERIES_CUTOFF:
        c0 = s0 = c1 = s1 = 0.0
        d2 = d * d
        p = 1.0
        for n in range(_N_TERMS):
            sign = -1.0 if n % 2 else 1.0
            c0 += sign * p / _FACT[2 * n + 1]
            s0 += sign * p * d / _FACT[2 * n + 2]
            c1 += sign * p / (_FACT[2 * n] * (2 * n + 2))
            s1 += sign * p * d / (_FACT[2 * n + 1] * (2 * n + 3))
            p *= d2
        return c0, s0, c1, s1
    sd, cd = math.sin(d), math.cos(d)
    return sd / d, (1.0 - cd) / d, sd / d + (cd - 1.0) / (d * d), sd / (d * d) - cd / d


def _arc_interval_integrals(seg: ArcSegment, plane, a, b):
    """Return (int h ds, int h^2 ds) over [a, b] for one planar cell."""
    A, B, C = plane
    r = seg.r
    dz = seg.z1 - seg.z0
    hs = b - a
    th_a = seg.theta_tc + seg.sweep * a
    delta = seg.sweep * hs
    ca, sa = math.cos(th_a), math.sin(th_a)
    # h(t) = a0 + a1 t + p cos(delta t) + q sin(delta t),  t in [0, 1]
    a0 = A * seg.center[0] + B * seg.center[1] + C - seg.z0 - dz * a
    a1 = -dz * hs
    p = r * (A * ca + B * sa)
    q = r * (B * ca - A * sa)
    c0, s0, c1, s1 = _moments(delta)
    c0_2, s0_2, _, _ = _moments(2.0 * delta)
    cos2 = 0.5 * (1.0 + c0_2)
    sin2 = 0.5 * (1.0 - c0_2)
    sincos = 0.5 * s0_2
    i1 = a0 + 0.5 * a1 + p * c0 + q * s0
    i2 = (
        a0 * a0 + a0 * a1 + a1 * a1 / 3.0
        + 2.0 * (a0 * (p * c0 + q * s0) + a1 * (p * c1 + q * s1))
        + p * p * cos2 + 2.0 * p * q * sincos + q * q * sin2
    )
    return i1 * hs, i2 * hs


def arc_cut_fill(seg: ArcSegment, terrain, params: CostParameters, crossings=None):
    """Return ``(V_c, V_f)`` of one circular curve."""
    if seg.degenerate:
        return 0.0, 0.0
    if crossings is None:
        crossings = arc_crossings(seg, terrain)
    jac = math.hypot(seg.r * seg.sweep, seg.z1 - seg.z0)
    W, kappa = params.W, params.kappa
    vc = 0.0
    vf = 0.0
    s = crossings.s
    for i, cell in enumerate(crossings.cells):
        st = crossings.state[i]
        if st == 0:
            continue
        i1, i2 = _arc_interval_integrals(seg, terrain.plane(*cell), s[i], s[i + 1])
        if st > 0:
            vc += (W * i1 + 0.5 * kappa * i2) * jac
        else:
            vf += (-W * i1 + 0.5 * kappa * i2) * jac
    return max(vc, 0.0), max(vf, 0.0)


def segment_cut_fill(seg, terrain, params):
    if seg.kind == "tangent":
        return tangent_cut_fill(seg, terrain, params)
    return arc_cut_fill(seg, terrain, params)


def earthwork_cost(V_c, V_f, params: CostParameters) -> float:
    """Cut, fill and imbalance cost; ``V_c`` must already include shrinkage."""
    base = params.C_c * V_c + params.C_f * V_f
    if params.C_b is None:
        return base + params.C_w * abs(V_f - V_c)
    return base + params.C_b * max(0.0, V_f - V_c) + params.C_w * max(0.0, V_c - V_f)


def evaluate_costs(design, terrain, params: CostParameters, geom=None, segments=None) -> CostBreakdown:
    """Total volumes, length and the two objective values of a design."""
    if geom is None:
        geom = build_horizontal(design)
    if segments is None:
        segments = build_segments(design, geom)
    vc = vf = length = 0.0
    parts = []
    for seg in segments:
        c, f = segment_cut_fill(seg, terrain, params)
        ln = seg.length
        vc += c
        vf += f
        length += ln
        idx = (seg.k, seg.j) if seg.kind == "tangent" else (seg.k,)
        parts.append(SegmentCost(seg.kind, idx, c, f, ln))
    vc *= params.gamma_shrink
    cost_e = earthwork_cost(vc, vf, params)
    return CostBreakdown(vc, vf, length, cost_e, params.C_u * length, tuple(parts))
