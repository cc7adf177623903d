"""Decision variables and the horizontal/vertical geometry derived from them.

The horizontal alignment is the polyline ``START, IP_1, ..., IP_N, END`` with a
circular curve of radius ``r_k`` fitted at every intersection point. Tangent
chord ``t`` (``t = 0 .. N``) runs from ``CT_t`` to ``TC_{t+1}``, with
``CT_0 = START`` and ``TC_{N+1} = END``. Each chord is split into ``m_t`` equal
pieces whose ``m_t + 1`` stations carry design elevations; start and end
elevations are fixed, so the vertical variable count is
``m_0 + m_N + sum_{t=1}^{N-1} (m_t + 1)``. Elevation varies linearly over each
arc between the last station of the incoming chord and the first station of
the outgoing one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .exceptions import DegenerateGeometryError

__all__ = [
    "THETA_MIN",
    "AlignmentDesign",
    "HorizontalGeometry",
    "TangentSegment",
    "ArcSegment",
    "vertical_count",
    "deflection_angle",
    "tangent_length",
    "transition_points",
    "curve_center",
    "build_horizontal",
    "station_coordinates",
    "build_segments",
    "centerline_point",
    "geometry_report",
]

# sharper turns than this are rejected as near U-turns
THETA_MIN = 1e-3
# closer to pi than this counts as collinear: no curve is built
COLLINEAR_TOL = 1e-8


def vertical_count(m: Sequence[int]) -> int:
    """Number of elevation variables for subdivision counts ``m`` (length N+1)."""
    m = list(m)
    if len(m) < 2:
        raise ValueError("need at least two tangents (N >= 1)")
    return m[0] + m[-1] + sum(mk + 1 for mk in m[1:-1])


@dataclass(frozen=True)
class AlignmentDesign:
    """A full design: IP coordinates, radii and station elevations.

    ``start`` and ``end`` are fixed 3-D points. ``m`` holds the subdivision
    count of each of the ``N + 1`` tangent chords.
    """

    start: np.ndarray
    end: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    R: np.ndarray
    Z: np.ndarray
    m: tuple = field(default=None)

    def __post_init__(self):
        start = np.array(self.start, dtype=float).reshape(3)
        end = np.array(self.end, dtype=float).reshape(3)
        X = np.array(self.X, dtype=float).ravel()
        Y = np.array(self.Y, dtype=float).ravel()
        R = np.array(self.R, dtype=float).ravel()
        Z = np.array(self.Z, dtype=float).ravel()
        n = X.size
        if n < 1:
            raise ValueError("a design needs at least one intersection point")
        if Y.size != n or R.size != n:
            raise ValueError(f"X, Y, R must have equal length, got {X.size}, {Y.size}, {R.size}")
        m = self.m
        if m is None:
            m = (5,) * (n + 1)
        elif np.ndim(m) == 0:
            m = (int(m),) * (n + 1)
        m = tuple(int(v) for v in m)
        if len(m) != n + 1:
            raise ValueError(f"m must have N+1={n + 1} entries, got {len(m)}")
        if any(v < 1 for v in m):
            raise ValueError("every subdivision count m_k must be >= 1")
        if np.any(R <= 0):
            raise ValueError("all curve radii must be positive")
        if Z.size != vertical_count(m):
            raise ValueError(f"Z must have M={vertical_count(m)} entries, got {Z.size}")
        for arr in (start, end, X, Y, R, Z):
            arr.setflags(write=False)
        for name, val in zip(("start", "end", "X", "Y", "R", "Z", "m"), (start, end, X, Y, R, Z, m)):
            object.__setattr__(self, name, val)

    @property
    def n_ips(self) -> int:
        return self.X.size

    @property
    def n_vertical(self) -> int:
        return self.Z.size

    @property
    def n_variables(self) -> int:
        return 3 * self.n_ips + self.n_vertical

    def to_vector(self) -> np.ndarray:
        """Flat decision vector ``[X, Y, R, Z]``."""
        return np.concatenate([self.X, self.Y, self.R, self.Z])

    @classmethod
    def from_vector(cls, vector, start, end, m) -> "AlignmentDesign":
        vector = np.asarray(vector, dtype=float).ravel()
        m = tuple(int(v) for v in m)
        n = len(m) - 1
        M = vertical_count(m)
        if vector.size != 3 * n + M:
            raise ValueError(f"decision vector must have 3N+M={3 * n + M} entries, got {vector.size}")
        return cls(start, end, vector[:n], vector[n:2 * n], vector[2 * n:3 * n], vector[3 * n:], m)

    def with_vector(self, vector) -> "AlignmentDesign":
        return AlignmentDesign.from_vector(vector, self.start, self.end, self.m)

    def ips(self) -> np.ndarray:
        """Plan points ``START, IP_1 .. IP_N, END`` as an (N+2, 2) array."""
        return np.vstack([self.start[:2], np.column_stack([self.X, self.Y]), self.end[:2]])

    def station_elevations(self) -> list:
        """Elevations of stations ``j = 0 .. m_t`` on every tangent chord."""
        out = []
        pos = 0
        n = self.n_ips
        for t, mt in enumerate(self.m):
            if t == 0:
                z = np.concatenate([[self.start[2]], self.Z[pos:pos + mt]])
                pos += mt
            elif t == n:
                z = np.concatenate([self.Z[pos:pos + mt], [self.end[2]]])
                pos += mt
            else:
                z = self.Z[pos:pos + mt + 1].copy()
                pos += mt + 1
            out.append(z)
        return out

    def variable_index(self, t: int, j: int):
        """Position in ``Z`` of station ``j`` on chord ``t``; None for fixed endpoints."""
        n = self.n_ips
        if not 0 <= t <= n or not 0 <= j <= self.m[t]:
            raise IndexError(f"station ({t}, {j}) out of range")
        if t == 0:
            return None if j == 0 else j - 1
        pos = self.m[0]
        for k in range(1, t):
            pos += self.m[k] + 1
        if t == n:
            return None if j == self.m[t] else pos + j
        return pos + j

    def to_record(self) -> dict:
        return {
            "start": self.start.tolist(),
            "end": self.end.tolist(),
            "m": list(self.m),
            "X": self.X.tolist(),
            "Y": self.Y.tolist(),
            "R": self.R.tolist(),
            "Z": self.Z.tolist(),
        }

    @classmethod
    def from_record(cls, record: dict) -> "AlignmentDesign":
        return cls(record["start"], record["end"], record["X"], record["Y"], record["R"], record["Z"], record["m"])


def _as_point(p):
    return np.asarray(p, dtype=float)[:2]


def deflection_angle(ip_prev, ip, ip_next) -> float:
    """Angle at ``ip`` between the directions to its two neighbours."""
    a = _as_point(ip_prev) - _as_point(ip)
    b = _as_point(ip_next) - _as_point(ip)
    na = math.hypot(a[0], a[1])
    nb = math.hypot(b[0], b[1])
    if na == 0.0 or nb == 0.0:
        raise DegenerateGeometryError(f"intersection point {tuple(_as_point(ip))} coincides with a neighbour")
    # same angle as acos of the clamped cosine, but stays accurate near pi
    # where acos loses half the digits and misses collinear triples
    return math.atan2(abs(a[0] * b[1] - a[1] * b[0]), a[0] * b[0] + a[1] * b[1])


def tangent_length(theta: float, r: float) -> float:
    """Distance from an IP to its TC/CT points, ``r (1 + cos theta) / sin theta``."""
    if theta <= THETA_MIN:
        raise DegenerateGeometryError(f"deflection angle {theta:.3g} rad is a near U-turn")
    if theta >= math.pi - COLLINEAR_TOL:
        return 0.0
    # (1 + cos t) / sin t == cot(t / 2), without the cancellation near pi
    return r / math.tan(0.5 * theta)


def _unit_vectors(ip_prev, ip, ip_next):
    p = _as_point(ip)
    a = _as_point(ip_prev) - p
    b = _as_point(ip_next) - p
    na = math.hypot(a[0], a[1])
    nb = math.hypot(b[0], b[1])
    if na == 0.0 or nb == 0.0:
        raise DegenerateGeometryError(f"intersection point {tuple(p)} coincides with a neighbour")
    return p, a / na, b / nb


def transition_points(ip_prev, ip, ip_next, r):
    """Return ``(TC, CT)``: the points where the curve meets the two chords."""
    p, ua, ub = _unit_vectors(ip_prev, ip, ip_next)
    L = tangent_length(deflection_angle(ip_prev, ip, ip_next), r)
    return p + L * ua, p + L * ub


def curve_center(ip_prev, ip, ip_next, r):
    """Centre of the curve, ``r csc(theta/2)`` from the IP along the bisector."""
    theta = deflection_angle(ip_prev, ip, ip_next)
    if theta >= math.pi - COLLINEAR_TOL:
        raise DegenerateGeometryError("collinear intersection points have no curve centre")
    p, ua, ub = _unit_vectors(ip_prev, ip, ip_next)
    # bisector IP -> M; taken from the unit vectors, not M - IP, which
    # cancels to zero for nearly straight IPs far from the origin
    d = ua + ub
    nd = math.hypot(d[0], d[1])
    if nd == 0.0:
        raise DegenerateGeometryError("collinear intersection points have no curve centre")
    return p + (r / math.sin(0.5 * theta)) * d / nd


@dataclass(frozen=True)
class HorizontalGeometry:
    """Per-IP curve geometry plus the N+1 tangent chords.

    ``sweep[k] = theta_ct[k] - theta_tc[k]`` is signed: positive for a
    counter-clockwise (left) turn. Collinear IPs get ``sweep = 0`` and a NaN
    centre.
    """

    ips: np.ndarray
    theta: np.ndarray
    beta: np.ndarray
    L: np.ndarray
    tc: np.ndarray
    ct: np.ndarray
    center: np.ndarray
    theta_tc: np.ndarray
    theta_ct: np.ndarray
    radius: np.ndarray
    collinear: np.ndarray
    chord_start: np.ndarray
    chord_end: np.ndarray
    m: tuple

    @property
    def n_ips(self) -> int:
        return self.theta.size

    @property
    def sweep(self) -> np.ndarray:
        return self.theta_ct - self.theta_tc

    def chord_length(self, t: int) -> float:
        d = self.chord_end[t] - self.chord_start[t]
        return math.hypot(d[0], d[1])


def build_horizontal(design: AlignmentDesign) -> HorizontalGeometry:
    pts = design.ips()
    n = design.n_ips
    theta = np.empty(n)
    L = np.empty(n)
    tc = np.empty((n, 2))
    ct = np.empty((n, 2))
    center = np.full((n, 2), np.nan)
    theta_tc = np.zeros(n)
    theta_ct = np.zeros(n)
    collinear = np.zeros(n, dtype=bool)
    for k in range(n):
        prev, ip, nxt = pts[k], pts[k + 1], pts[k + 2]
        r = design.R[k]
        th = deflection_angle(prev, ip, nxt)
        theta[k] = th
        L[k] = tangent_length(th, r)
        _, ua, ub = _unit_vectors(prev, ip, nxt)
        tc[k] = ip + L[k] * ua
        ct[k] = ip + L[k] * ub
        if th >= math.pi - COLLINEAR_TOL:
            collinear[k] = True
            continue
        c = curve_center(prev, ip, nxt, r)
        center[k] = c
        a0 = math.atan2(tc[k, 1] - c[1], tc[k, 0] - c[0])
        # incoming direction is -ua, outgoing ub; left turn sweeps counter-clockwise
        cross = (-ua[0]) * ub[1] - (-ua[1]) * ub[0]
        turn = 1.0 if cross > 0 else -1.0
        theta_tc[k] = a0
        theta_ct[k] = a0 + turn * (math.pi - th)
    beta = math.pi - theta
    beta[collinear] = 0.0
    chord_start = np.vstack([pts[0], ct])
    chord_end = np.vstack([tc, pts[-1]])
    for arr in (pts, theta, beta, L, tc, ct, center, theta_tc, theta_ct, collinear, chord_start, chord_end):
        arr.setflags(write=False)
    radius = design.R.copy()
    radius.setflags(write=False)
    return HorizontalGeometry(
        pts, theta, beta, L, tc, ct, center, theta_tc, theta_ct, radius, collinear, chord_start, chord_end, design.m
    )


def station_coordinates(geom: HorizontalGeometry, k: int, j: int) -> np.ndarray:
    """Plan position of station ``j`` on tangent chord ``k``."""
    if not 0 <= k <= geom.n_ips:
        raise IndexError(f"tangent index {k} out of range 0..{geom.n_ips}")
    mk = geom.m[k]
    if not 0 <= j <= mk:
        raise IndexError(f"station index {j} out of range 0..{mk}")
    p0 = geom.chord_start[k]
    p1 = geom.chord_end[k]
    return p0 + (j / mk) * (p1 - p0)


@dataclass(frozen=True)
class TangentSegment:
    """Straight piece ``j`` (1-based) of chord ``k``, parametrised by ``s`` in
    ``[(j-1)/m, j/m]`` along the whole chord."""

    k: int
    j: int
    m: int
    p0: np.ndarray  # chord start (CT_{k})
    p1: np.ndarray  # chord end (TC_{k+1})
    z0: float  # elevation at station j-1
    z1: float  # elevation at station j

    kind = "tangent"

    @property
    def s_range(self) -> tuple[float, float]:
        return (self.j - 1) / self.m, self.j / self.m

    def plan(self, s):
        s = np.asarray(s, dtype=float)
        return (self.p0[0] + s * (self.p1[0] - self.p0[0]), self.p0[1] + s * (self.p1[1] - self.p0[1]))

    def elevation(self, s):
        return self.z0 + (self.z1 - self.z0) * (self.m * np.asarray(s, dtype=float) + 1 - self.j)

    @property
    def start_point(self) -> np.ndarray:
        s0, _ = self.s_range
        x, y = self.plan(s0)
        return np.array([x, y, self.z0])

    @property
    def end_point(self) -> np.ndarray:
        _, s1 = self.s_range
        x, y = self.plan(s1)
        return np.array([x, y, self.z1])

    @property
    def horizontal_length(self) -> float:
        d = (self.p1 - self.p0) / self.m
        return math.hypot(d[0], d[1])

    @property
    def length(self) -> float:
        # (1/m) sqrt(dx^2 + dy^2 + m^2 dz^2), dx, dy over the whole chord
        dx = self.p1[0] - self.p0[0]
        dy = self.p1[1] - self.p0[1]
        return math.sqrt(dx * dx + dy * dy + (self.m * (self.z1 - self.z0)) ** 2) / self.m


@dataclass(frozen=True)
class ArcSegment:
    """Circular curve ``k`` (0-based IP index) parametrised by ``s`` in [0, 1]."""

    k: int
    center: np.ndarray
    r: float
    theta_tc: float
    theta_ct: float
    z0: float
    z1: float
    tc: np.ndarray
    ct: np.ndarray

    kind = "arc"
    s_range = (0.0, 1.0)

    @property
    def degenerate(self) -> bool:
        return self.theta_ct == self.theta_tc

    @property
    def sweep(self) -> float:
        return self.theta_ct - self.theta_tc

    def angle(self, s):
        return self.theta_tc + self.sweep * np.asarray(s, dtype=float)

    def plan(self, s):
        s = np.asarray(s, dtype=float)
        if self.degenerate:
            return (self.tc[0] + 0.0 * s, self.tc[1] + 0.0 * s)
        a = self.angle(s)
        return (self.center[0] + self.r * np.cos(a), self.center[1] + self.r * np.sin(a))

    def elevation(self, s):
        return self.z0 + (self.z1 - self.z0) * np.asarray(s, dtype=float)

    @property
    def start_point(self) -> np.ndarray:
        return np.array([self.tc[0], self.tc[1], self.z0])

    @property
    def end_point(self) -> np.ndarray:
        return np.array([self.ct[0], self.ct[1], self.z1])

    @property
    def horizontal_length(self) -> float:
        return 0.0 if self.degenerate else self.r * abs(self.sweep)

    @property
    def length(self) -> float:
        return math.hypot(self.horizontal_length, self.z1 - self.z0)


Segment = Union[TangentSegment, ArcSegment]


def build_segments(design: AlignmentDesign, geom: HorizontalGeometry) -> list:
    """All 3-D pieces of the centreline in travel order.

    Collinear IPs still produce a zero-sweep :class:`ArcSegment` so the
    elevations on either side stay connected.
    """
    z_st = design.station_elevations()
    segs = []
    n = design.n_ips
    for t in range(n + 1):
        p0 = geom.chord_start[t]
        p1 = geom.chord_end[t]
        mt = design.m[t]
        zt = z_st[t]
        for j in range(1, mt + 1):
            segs.append(TangentSegment(t, j, mt, p0, p1, float(zt[j - 1]), float(zt[j])))
        if t < n:
            k = t
            segs.append(
                ArcSegment(
                    k,
                    geom.center[k],
                    float(design.R[k]),
                    float(geom.theta_tc[k]),
                    float(geom.theta_ct[k]),
                    float(zt[mt]),
                    float(z_st[t + 1][0]),
                    geom.tc[k],
                    geom.ct[k],
                )
            )
    return segs


def centerline_point(segment: Segment, s: float) -> np.ndarray:
    """3-D point of ``segment`` at parameter ``s`` (must lie in its domain)."""
    lo, hi = segment.s_range
    tol = 1e-12
    if not (lo - tol <= s <= hi + tol):
        raise ValueError(f"parameter {s} outside segment domain [{lo}, {hi}]")
    x, y = segment.plan(s)
    return np.array([float(x), float(y), float(segment.elevation(s))])


def geometry_report(design: AlignmentDesign, geom: HorizontalGeometry = None) -> str:
    """Human-readable per-segment listing: type, endpoints, length."""
    if geom is None:
        geom = build_horizontal(design)
    segs = build_segments(design, geom)
    lines = ["# type  index  x0 y0 z0  x1 y1 z1  length"]
    total = 0.0
    for seg in segs:
        a = seg.start_point
        b = seg.end_point
        if seg.kind == "tangent":
            tag = f"tangent {seg.k}.{seg.j}"
        else:
            tag = f"arc     {seg.k + 1}"
        lines.append(
            f"{tag:<12} {a[0]:.3f} {a[1]:.3f} {a[2]:.3f}  {b[0]:.3f} {b[1]:.3f} {b[2]:.3f}  {seg.length:.3f}"
        )
        total += seg.length
    lines.append(f"# total length {total:.3f}")
    for k in range(geom.n_ips):
        lines.append(
            f"# IP {k + 1}: ({design.X[k]:.3f}, {design.Y[k]:.3f}) r={design.R[k]:.3f} "
            f"theta={geom.theta[k]:.6f} L={geom.L[k]:.3f}"
        )
    return "\n".join(lines) + "\n"
