import math

import numpy as np
import pytest

from roadalign.exceptions import MalformedTerrainError, OutOfBoundsError, TerrainDataError
from roadalign.terrain import (
    TerrainGrid,
    fit_cell_planes,
    load_ascii_terrain,
    load_terrain,
    read_ascii_grid,
    synthetic_raster,
    write_ascii_grid,
)


def test_plane_raster_gives_constant_coefficients():
    x = 10.0 * np.arange(6)
    y = 10.0 * np.arange(4)
    X, Y = np.meshgrid(x, y)
    t = load_terrain(50.0 + 0.1 * X - 0.05 * Y, 10.0)
    assert t.A.shape == (3, 5)
    np.testing.assert_allclose(t.A, 0.1, atol=1e-14)
    np.testing.assert_allclose(t.B, -0.05, atol=1e-14)
    np.testing.assert_allclose(t.C, 50.0, atol=1e-12)


def test_single_cell_fit_matches_lstsq():
    # oracle: numpy least squares on the four corners
    rng = np.random.default_rng(3)
    z = rng.normal(size=(2, 2)) * 5 + 10
    cs, ox, oy = 7.0, 3.0, -2.0
    corners = np.array([[ox, oy], [ox + cs, oy], [ox, oy + cs], [ox + cs, oy + cs]])
    vals = np.array([z[0, 0], z[0, 1], z[1, 0], z[1, 1]])
    M = np.column_stack([corners, np.ones(4)])
    coef = np.linalg.lstsq(M, vals, rcond=None)[0]
    A, B, C = fit_cell_planes(z, cs, ox, oy)
    np.testing.assert_allclose([A[0, 0], B[0, 0], C[0, 0]], coef, rtol=1e-12, atol=1e-12)


def test_fit_residual_sums_to_zero_per_cell():
    rng = np.random.default_rng(4)
    z = rng.normal(size=(5, 6))
    t = load_terrain(z, 2.0)
    for v in range(t.n_rows):
        for u in range(t.n_cols):
            A, B, C = t.plane(u, v)
            res = 0.0
            for dv in (0, 1):
                for du in (0, 1):
                    x, y = 2.0 * (u + du), 2.0 * (v + dv)
                    res += A * x + B * y + C - z[v + dv, u + du]
            assert abs(res) < 1e-12


def test_cell_lookup_half_open_and_closed_outer_edge():
    t = load_terrain(np.zeros((3, 4)), 10.0)
    assert t.cell_of(0.0, 0.0) == (0, 0)
    assert t.cell_of(10.0, 0.0) == (1, 0)
    assert t.cell_of(9.999, 19.999) == (0, 1)
    assert t.cell_of(30.0, 20.0) == (2, 1)
    with pytest.raises(OutOfBoundsError):
        t.cell_of(30.1, 5.0)
    with pytest.raises(OutOfBoundsError):
        t.ground_elevation(-1.0, 5.0)


def test_elevations_vectorised_matches_scalar():
    rng = np.random.default_rng(5)
    t = load_terrain(rng.normal(size=(6, 7)), 5.0, 1.0, 2.0)
    xs = rng.uniform(1.0, t.x_max, 200)
    ys = rng.uniform(2.0, t.y_max, 200)
    vec = t.elevations(xs, ys)
    ref = [t.ground_elevation(x, y) for x, y in zip(xs, ys)]
    np.testing.assert_allclose(vec, ref, rtol=0, atol=1e-12)


def test_translation_preserves_shape():
    rng = np.random.default_rng(6)
    t = load_terrain(rng.normal(size=(4, 4)), 3.0)
    s = t.translated(100.0, -50.0)
    for x, y in rng.uniform(0, 9, (20, 2)):
        assert math.isclose(t.ground_elevation(x, y), s.ground_elevation(x + 100, y - 50), abs_tol=1e-9)


@pytest.mark.parametrize(
    "raster, err",
    [
        (np.zeros((1, 5)), MalformedTerrainError),
        (np.zeros(5), MalformedTerrainError),
        (np.array([[0.0, 1.0], [np.nan, 2.0]]), TerrainDataError),
    ],
)
def test_bad_rasters_rejected(raster, err):
    with pytest.raises(err):
        load_terrain(raster, 1.0)


def test_ragged_raster_rejected():
    with pytest.raises(MalformedTerrainError):
        load_terrain([[1.0, 2.0], [3.0]], 1.0)


def test_nonpositive_cell_size_rejected():
    with pytest.raises(MalformedTerrainError):
        load_terrain(np.zeros((2, 2)), 0.0)


def test_coefficients_are_read_only():
    t = load_terrain(np.zeros((3, 3)), 1.0)
    with pytest.raises(ValueError):
        t.A[0, 0] = 1.0


def test_ascii_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    z = rng.normal(size=(4, 5)) * 3
    p = tmp_path / "g.asc"
    write_ascii_grid(p, z, 2.5, 10.0, 20.0)
    raster, cs, xll, yll = read_ascii_grid(p)
    np.testing.assert_array_equal(raster, z)
    assert (cs, xll, yll) == (2.5, 10.0, 20.0)
    t = load_ascii_terrain(p)
    assert t.bounds == (10.0, 20.0, 20.0, 27.5)


def test_ascii_rows_are_north_first(tmp_path):
    p = tmp_path / "g.asc"
    p.write_text("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n9 9\n1 1\n")
    raster, *_ = read_ascii_grid(p)
    assert raster[0, 0] == 1.0 and raster[1, 0] == 9.0


def test_ascii_count_mismatch(tmp_path):
    p = tmp_path / "g.asc"
    p.write_text("ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n4 5\n")
    with pytest.raises(MalformedTerrainError):
        read_ascii_grid(p)


def test_ascii_missing_header(tmp_path):
    p = tmp_path / "g.asc"
    p.write_text("ncols 2\nnrows 2\n1 2\n3 4\n")
    with pytest.raises(MalformedTerrainError):
        read_ascii_grid(p)


def test_synthetic_case_study_dimensions():
    z = synthetic_raster("sinusoidal", 500, 1000, 10, amplitude=30, wavelength=300, seed=1)
    t = load_terrain(z, 10)
    assert (t.n_cols, t.n_rows) == (50, 100)


def test_synthetic_is_deterministic():
    a = synthetic_raster("sinusoidal", 100, 100, 10, seed=3)
    b = synthetic_raster("sinusoidal", 100, 100, 10, seed=3)
    c = synthetic_raster("sinusoidal", 100, 100, 10, seed=4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_synthetic_ridge_and_valley_are_mirror_images():
    r = synthetic_raster("ridge", 100, 50, 10, amplitude=5)
    v = synthetic_raster("valley", 100, 50, 10, amplitude=5)
    np.testing.assert_allclose(r - 100, -(v - 100))
    assert r[:, 5].max() == pytest.approx(105.0)


def test_unknown_kind():
    with pytest.raises(ValueError):
        synthetic_raster("crater", 10, 10, 1)


def test_grid_direct_construction_checks_shapes():
    with pytest.raises(MalformedTerrainError):
        TerrainGrid(0, 0, 1, np.zeros((2, 2)), np.zeros((2, 3)), np.zeros((2, 2)))
