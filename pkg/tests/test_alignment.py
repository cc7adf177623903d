import itertools
import math

import numpy as np
import pytest

from roadalign.alignment import (
    AlignmentDesign,
    ArcSegment,
    TangentSegment,
    build_horizontal,
    build_segments,
    centerline_point,
    curve_center,
    deflection_angle,
    geometry_report,
    station_coordinates,
    tangent_length,
    transition_points,
    vertical_count,
)
from roadalign.exceptions import DegenerateGeometryError


def random_triples(rng, n):
    """IP triples whose deflection angle is well inside (0, pi)."""
    out = []
    while len(out) < n:
        p = rng.uniform(-100, 100, (3, 2))
        th = deflection_angle(*p)
        if 0.05 < th < math.pi - 0.05:
            out.append((p, rng.uniform(1.0, 50.0)))
    return out


def test_deflection_trivial():
    assert deflection_angle((0, 0), (1, 0), (2, 0)) == pytest.approx(math.pi)
    assert deflection_angle((0, 0), (1, 0), (1, 1)) == pytest.approx(math.pi / 2)


def test_deflection_matches_atan2_oracle():
    rng = np.random.default_rng(0)
    for _ in range(500):
        a, b, c = rng.normal(size=(3, 2))
        u, v = a - b, c - b
        ang = abs(math.atan2(v[1], v[0]) - math.atan2(u[1], u[0]))
        ang = min(ang, 2 * math.pi - ang)
        assert deflection_angle(a, b, c) == pytest.approx(ang, abs=1e-12)


def test_deflection_exactly_collinear_interpolated_points():
    a, c = np.array([100.0, 10.0]), np.array([400.0, 990.0])
    for f in np.linspace(0.1, 0.9, 9):
        assert deflection_angle(a, a + f * (c - a), c) >= math.pi - 1e-12


def test_deflection_coincident_points():
    with pytest.raises(DegenerateGeometryError):
        deflection_angle((0, 0), (0, 0), (1, 1))


def test_tangent_length_values():
    assert tangent_length(math.pi / 2, 1.0) == pytest.approx(1.0)
    assert tangent_length(math.pi, 5.0) == 0.0
    th = 2 * math.pi / 3
    assert tangent_length(th, 20.0) == pytest.approx(20 * math.tan((math.pi - th) / 2), rel=1e-12)
    with pytest.raises(DegenerateGeometryError):
        tangent_length(1e-4, 1.0)


def test_tan_identity_random():
    rng = np.random.default_rng(1)
    th = rng.uniform(0.01, math.pi - 0.01, 10_000)
    r = rng.uniform(1, 100, 10_000)
    lhs = r * (1 + np.cos(th)) / np.sin(th)
    got = np.array([tangent_length(t, q) for t, q in zip(th, r)])
    np.testing.assert_allclose(got, lhs, rtol=1e-10)
    np.testing.assert_allclose(got, r * np.tan((math.pi - th) / 2), rtol=1e-10)


def test_right_angle_example():
    tc, ct = transition_points((0, 0), (10, 0), (10, 10), 2.0)
    np.testing.assert_allclose(tc, (8, 0), atol=1e-12)
    np.testing.assert_allclose(ct, (10, 2), atol=1e-12)
    np.testing.assert_allclose(curve_center((0, 0), (10, 0), (10, 10), 2.0), (8, 2), atol=1e-12)
    np.testing.assert_allclose(curve_center((0, 0), (10, 0), (10, 10), 20.0), (-10, 20), atol=1e-12)


def test_collinear_transition_points_collapse():
    tc, ct = transition_points((0, 0), (5, 0), (10, 0), 30.0)
    np.testing.assert_allclose(tc, (5, 0))
    np.testing.assert_allclose(ct, (5, 0))
    with pytest.raises(DegenerateGeometryError):
        curve_center((0, 0), (5, 0), (10, 0), 30.0)


def test_random_identities_distance_tangency_midpoint():
    rng = np.random.default_rng(2)
    for (a, b, c), r in random_triples(rng, 2000):
        tc, ct = transition_points(a, b, c, r)
        C = curve_center(a, b, c, r)
        L = tangent_length(deflection_angle(a, b, c), r)
        assert np.linalg.norm(C - tc) == pytest.approx(r, rel=1e-9)
        assert np.linalg.norm(C - ct) == pytest.approx(r, rel=1e-9)
        assert abs(np.dot(tc - C, b - tc)) <= 1e-9 * r * r
        assert abs(np.dot(ct - C, c - ct)) <= 1e-9 * r * r
        assert np.linalg.norm(tc - b) == pytest.approx(L, abs=1e-12 * max(1, L))
        assert np.linalg.norm(ct - b) == pytest.approx(L, abs=1e-12 * max(1, L))
        # midpoint of TC-CT lies on IP -> C
        mid = 0.5 * (tc + ct)
        d = C - b
        cross = (mid - b)[0] * d[1] - (mid - b)[1] * d[0]
        assert abs(cross) / np.linalg.norm(d) < 1e-9 * max(1.0, np.linalg.norm(d))


def test_reflection_symmetry():
    rng = np.random.default_rng(3)
    flip = np.array([1.0, -1.0])
    for (a, b, c), r in random_triples(rng, 200):
        tc, ct = transition_points(a, b, c, r)
        tcm, ctm = transition_points(a * flip, b * flip, c * flip, r)
        np.testing.assert_allclose(tcm, tc * flip, atol=1e-9)
        np.testing.assert_allclose(ctm, ct * flip, atol=1e-9)
        np.testing.assert_allclose(
            curve_center(a * flip, b * flip, c * flip, r), curve_center(a, b, c, r) * flip, atol=1e-9
        )


def test_vertical_count_exhaustive():
    for n in range(1, 5):
        for m in itertools.product(range(1, 5), repeat=n + 1):
            # count stations directly: every chord has m+1 stations, minus
            # shared nothing, minus the two fixed endpoints
            expected = sum(mk + 1 for mk in m) - 2
            assert vertical_count(m) == expected
            d = AlignmentDesign((0, 0, 0), (1, 1, 0), np.zeros(n), np.zeros(n), np.ones(n),
                                np.zeros(expected), m)
            assert d.n_variables == 3 * n + expected


def right_angle_design(r=2.0, m=(5, 5), z=None):
    M = vertical_count(m)
    Z = np.linspace(0.1, 1.0, M) if z is None else z
    return AlignmentDesign((0, 0, 0), (10, 10, 1.5), [10], [0], [r], Z, m)


def test_vector_round_trip_and_record():
    d = right_angle_design()
    v = d.to_vector()
    assert v.size == 3 + 10
    d2 = AlignmentDesign.from_vector(v, d.start, d.end, d.m)
    np.testing.assert_array_equal(d2.to_vector(), v)
    d3 = AlignmentDesign.from_record(d.to_record())
    np.testing.assert_array_equal(d3.to_vector(), v)
    with pytest.raises(ValueError):
        AlignmentDesign.from_vector(v[:-1], d.start, d.end, d.m)


@pytest.mark.parametrize("kwargs", [dict(R=[0.0]), dict(R=[-1.0]), dict(m=(0, 5))])
def test_design_validation(kwargs):
    base = dict(start=(0, 0, 0), end=(10, 10, 0), X=[10], Y=[0], R=[2.0], Z=np.zeros(10), m=(5, 5))
    base.update(kwargs)
    with pytest.raises(ValueError):
        AlignmentDesign(**base)


def test_station_coordinates():
    d = AlignmentDesign((0, 0, 0), (12, 10, 0), [12], [0], [2.0], np.zeros(10), (5, 5))
    g = build_horizontal(d)
    np.testing.assert_allclose(station_coordinates(g, 0, 0), (0, 0))
    np.testing.assert_allclose(station_coordinates(g, 0, 5), g.tc[0])
    np.testing.assert_allclose(station_coordinates(g, 1, 0), g.ct[0])
    # chord (0,0)->(10,0): m=5, j=1 -> (2, 0)
    assert g.tc[0][0] == pytest.approx(10.0)
    np.testing.assert_allclose(station_coordinates(g, 0, 1), (2, 0), atol=1e-12)
    steps = np.diff([station_coordinates(g, 1, j) for j in range(6)], axis=0)
    np.testing.assert_allclose(np.linalg.norm(steps, axis=1), np.linalg.norm(steps[0]), rtol=1e-12)


def test_right_angle_arc_sweep():
    g = build_horizontal(right_angle_design())
    assert abs(g.sweep[0]) == pytest.approx(math.pi / 2)
    assert g.beta[0] == pytest.approx(math.pi / 2)


def random_design(rng, n=4, m=None):
    m = tuple(rng.integers(1, 5, n + 1)) if m is None else m
    t = np.linspace(0, 1, n + 2)[1:-1]
    X = 1000 * t + rng.uniform(-60, 60, n)
    Y = rng.uniform(-150, 150, n)
    R = rng.uniform(5, 30, n)
    Z = rng.uniform(90, 110, vertical_count(m))
    return AlignmentDesign((0, 0, 100), (1000, 0, 100), X, Y, R, Z, m)


def test_continuity_walk():
    rng = np.random.default_rng(4)
    for _ in range(200):
        d = random_design(rng)
        segs = build_segments(d, build_horizontal(d))
        assert len(segs) == sum(d.m) + d.n_ips
        np.testing.assert_allclose(segs[0].start_point, d.start, atol=1e-9)
        np.testing.assert_allclose(segs[-1].end_point, d.end, atol=1e-9)
        for a, b in zip(segs[:-1], segs[1:]):
            assert np.linalg.norm(a.end_point - b.start_point) < 1e-9
            # endpoints agree with parametrised evaluation
            lo, hi = a.s_range
            np.testing.assert_allclose(centerline_point(a, hi), a.end_point, atol=1e-9)
            np.testing.assert_allclose(centerline_point(a, lo), a.start_point, atol=1e-9)


def test_collinear_ip_zero_arc():
    d = AlignmentDesign((0, 0, 0), (20, 0, 0), [10], [0], [5.0], np.zeros(8), (4, 4))
    g = build_horizontal(d)
    assert g.collinear[0] and g.L[0] == 0.0
    arc = build_segments(d, g)[4]
    assert arc.kind == "arc" and arc.horizontal_length == 0.0 and arc.length == 0.0


def test_sharp_turn_rejected():
    d = AlignmentDesign((0, 0, 0), (0, 1e-5, 0), [10], [0], [5.0], np.zeros(8), (4, 4))
    with pytest.raises(DegenerateGeometryError):
        build_horizontal(d)


def test_tangent_parametrisation():
    seg = TangentSegment(0, 2, 5, np.array([0.0, 0.0]), np.array([10.0, 0.0]), 1.0, 3.0)
    np.testing.assert_allclose(centerline_point(seg, 0.2), (2, 0, 1))
    np.testing.assert_allclose(centerline_point(seg, 0.4), (4, 0, 3))
    np.testing.assert_allclose(centerline_point(seg, 0.3), (3, 0, 2))
    with pytest.raises(ValueError):
        centerline_point(seg, 0.5)
    seg = TangentSegment(0, 1, 1, np.array([0.0, 0.0]), np.array([3.0, 4.0]), 0.0, 0.0)
    assert seg.length == pytest.approx(5.0)


def test_tangent_length_matches_station_distance():
    rng = np.random.default_rng(5)
    for _ in range(200):
        d = random_design(rng)
        for seg in build_segments(d, build_horizontal(d)):
            if seg.kind == "tangent":
                assert seg.length == pytest.approx(np.linalg.norm(seg.end_point - seg.start_point), rel=1e-12)


def test_arc_midpoint():
    arc = ArcSegment(0, np.zeros(2), 1.0, 0.0, math.pi / 2, 0.0, 0.0, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    p = centerline_point(arc, 0.5)
    np.testing.assert_allclose(p[:2], (math.cos(math.pi / 4), math.sin(math.pi / 4)))
    arc = ArcSegment(0, np.zeros(2), 10.0, 0.0, math.pi / 2, 0.0, 0.0, np.array([10.0, 0.0]), np.array([0.0, 10.0]))
    assert arc.length == pytest.approx(5 * math.pi)


def test_elevation_matches_linear_interpolation():
    rng = np.random.default_rng(6)
    d = random_design(rng, m=(3, 3, 3, 3, 3))
    segs = build_segments(d, build_horizontal(d))
    for seg in segs:
        lo, hi = seg.s_range
        for s in rng.uniform(lo, hi, 5):
            w = (s - lo) / (hi - lo)
            assert centerline_point(seg, s)[2] == pytest.approx((1 - w) * seg.z0 + w * seg.z1, abs=1e-12)


def test_geometry_report_lists_every_segment():
    d = right_angle_design()
    text = geometry_report(d)
    assert text.count("\ntangent") + text.startswith("tangent") == 10
    assert "arc" in text and "total length" in text
