import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_front
from roadalign.moo import (
    NadirUtopia,
    ParetoArchive,
    ParetoPoint,
    dominates,
    hypervolume,
    normalization_factors,
    pareto_filter,
    weighted_sum_scalarize,
)


def test_dominates_examples():
    assert dominates((1, 1), (2, 2))
    assert not dominates((1, 2), (2, 1))
    assert not dominates((1, 1), (1, 1))
    assert dominates((1, 1), (1, 2))


def test_filter_small_examples():
    assert sorted(map(tuple, pareto_filter([(1, 2), (2, 1), (2, 2)]).F.tolist())) == [(1, 2), (2, 1)]
    front = pareto_filter([(3, 3)] * 5)
    assert len(front) == 1 and front[0].index == 0


def test_filter_sorted_and_strictly_decreasing():
    rng = np.random.default_rng(0)
    F = pareto_filter(rng.random((300, 2))).F
    assert np.all(np.diff(F[:, 0]) > 0)
    assert np.all(np.diff(F[:, 1]) < 0)


def test_filter_matches_brute_force_1000():
    rng = np.random.default_rng(1)
    # coarse rounding forces ties and duplicates
    F = np.round(rng.random((1000, 2)) * 50) / 50
    got = sorted(pareto_filter(F).indices)
    assert got == brute_force_front(F)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=1, max_size=40))
def test_filter_brute_force_property(pairs):
    assert sorted(pareto_filter(pairs).indices) == brute_force_front(pairs)


def test_filter_idempotent_and_permutation_invariant():
    rng = np.random.default_rng(2)
    F = rng.random((500, 2))
    front = pareto_filter(F)
    again = pareto_filter(list(front))
    assert again.indices == front.indices
    for _ in range(5):
        perm = rng.permutation(len(F))
        pts = [ParetoPoint(tuple(F[i]), None, int(i)) for i in perm]
        assert pareto_filter(pts).indices == front.indices


def test_duplicates_keep_earliest_index():
    pts = [ParetoPoint((1.0, 1.0), None, 7), ParetoPoint((1.0, 1.0), None, 3), ParetoPoint((2.0, 0.5), None, 1)]
    front = pareto_filter(pts)
    assert front.indices == [3, 1]


def test_archive_matches_batch_filter():
    rng = np.random.default_rng(3)
    F = np.round(rng.random((2000, 2)) * 100) / 100
    arc = ParetoArchive()
    for i, f in enumerate(F):
        arc.add(ParetoPoint(tuple(f), None, i))
    assert arc.front().indices == pareto_filter(F).indices


def test_archive_add_return_value():
    arc = ParetoArchive()
    assert arc.add(ParetoPoint((2.0, 2.0), None, 0))
    assert not arc.add(ParetoPoint((3.0, 3.0), None, 1))
    assert not arc.add(ParetoPoint((2.0, 2.0), None, 2))
    assert arc.add(ParetoPoint((1.0, 1.0), None, 3))
    assert len(arc) == 1


def test_hypervolume_against_grid_count():
    rng = np.random.default_rng(4)
    F = rng.integers(0, 20, (30, 2))
    ref = (20, 20)
    # oracle: count unit cells dominated by some point
    count = 0
    for a, b in itertools.product(range(20), range(20)):
        if np.any((F[:, 0] <= a) & (F[:, 1] <= b)):
            count += 1
    assert hypervolume(F, ref) == pytest.approx(count)


def test_hypervolume_ignores_points_beyond_ref():
    assert hypervolume([(5, 5)], (4, 10)) == 0.0
    assert hypervolume([(1, 1)], (3, 4)) == pytest.approx(6.0)


def test_normalization_example():
    ref = NadirUtopia((10.0, 20.0), (5.0, 10.0))
    assert normalization_factors(ref) == pytest.approx((0.2, 0.1))
    with pytest.raises(ValueError):
        NadirUtopia((1.0, 1.0), (2.0, 0.0))


def test_scalarize_properties():
    f = (0.2, 0.1)
    assert weighted_sum_scalarize((3.0, 100.0), 1.0, f) == pytest.approx(0.6)
    assert weighted_sum_scalarize((3.0, 7.0), 1.0, f) == weighted_sum_scalarize((3.0, 9.0), 1.0, f)
    assert weighted_sum_scalarize((10, 20), 0.5, f) > weighted_sum_scalarize((5, 10), 0.5, f)
    with pytest.raises(ValueError):
        weighted_sum_scalarize((1, 1), 1.5, f)


def test_scalarize_argmin_scale_invariant():
    rng = np.random.default_rng(5)
    F = rng.random((200, 2)) * [1000, 10]
    for c in (0.01, 7.0, 1e4):
        for v in (0.0, 0.3, 0.7, 1.0):
            a = normalization_factors(NadirUtopia.from_points(F))
            b = normalization_factors(NadirUtopia.from_points(c * F))
            ia = np.argmin([weighted_sum_scalarize(f, v, a) for f in F])
            ib = np.argmin([weighted_sum_scalarize(f, v, b) for f in c * F])
            assert ia == ib
