import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from oracles import CASE_END, CASE_START, case_study
from roadalign.alignment import build_horizontal, station_coordinates
from roadalign.constraints import ConstraintConfig, check_grade, evaluate_constraints
from roadalign.costing import CostParameters, evaluate_costs
from roadalign.exceptions import SeedingError, SolverError
from roadalign.model import SurrogateCostModel
from roadalign.moo import (
    BiObjectiveProblem,
    DirectMultiSearch,
    EvolutionaryPareto,
    RoadAlignmentProblem,
    WeightedSum,
    coordinate_search,
    dominates,
    grade_limited_profile,
    hypervolume,
    seed_alignment,
    shifted_quadratics,
)
from roadalign.moo.evolutionary import constrained_ranks, crowding_distance
from roadalign.terrain import load_terrain


def toy(dim=3):
    x0 = np.ones(dim)
    x0[0] = 5.0
    return shifted_quadratics(dim=dim), x0


def mutually_nondominated(F):
    return not any(dominates(F[i], F[j]) for i in range(len(F)) for j in range(len(F)) if i != j)


def test_problem_counts_every_evaluation():
    p, x0 = toy()
    p.evaluate(x0)
    p.evaluate_many([x0, x0, x0])
    assert p.n_evaluations == 4
    with pytest.raises(ValueError):
        p.evaluate(np.ones(2))


def test_ws_anchor_only():
    p, x0 = toy(1)
    ws = WeightedSum(n_weights=1, per_run_budget=500).fit(p, x0)
    assert len(ws.front_) == 1
    assert ws.front_.X[0, 0] == pytest.approx(2.0, abs=1e-6)


def test_ws_toy_tracks_analytic_front():
    p, x0 = toy(3)
    ws = WeightedSum(n_weights=51, per_run_budget=1000).fit(p, x0)
    assert len(ws.results_) == 51
    for v, ev in zip(ws.weights_, ws.results_):
        # normalised convex case: argmin at t = 2 v_e
        assert ev.x[0] == pytest.approx(2.0 * v, abs=1e-6)
        np.testing.assert_allclose(ev.x[1:], 0.0, atol=1e-6)
    assert len(ws.front_) == 51
    assert mutually_nondominated(ws.front_.F)
    assert ws.nadir_utopia_.nadir == pytest.approx((4.0, 4.0))


def test_ws_infeasible_seed():
    p = BiObjectiveProblem(lambda x: ((0.0, 0.0), 1.0, False), [-1.0], [1.0])
    with pytest.raises(SeedingError):
        WeightedSum(n_weights=3, per_run_budget=10).fit(p, [0.0])


def test_coordinate_search_respects_budget():
    p, x0 = toy(3)
    best, used = coordinate_search(p, x0, lambda f: f[0], budget=40)
    # at most one poll (2n) past the budget
    assert 40 <= used <= 40 + 6
    assert best.f[0] < p.func(x0)[0][0]


def test_dms_toy_spans_pareto_interval():
    p, x0 = toy(1)
    d = DirectMultiSearch(budget=3000).fit(p, x0)
    X = d.front_.X[:, 0]
    assert X.min() <= 0.01 and X.max() >= 1.99
    assert len(d.front_) >= 20
    assert mutually_nondominated(d.front_.F)
    # gaps inside [0, 2] bounded by twice the largest remaining step times the span
    inner = np.sort(X[(X >= 0) & (X <= 2)])
    assert np.diff(inner).max() <= 2 * d.steps_.max() * 10 + 1e-12


def test_dms_small_budget_returns_seeds():
    p, _ = toy(2)
    seeds = np.array([[1.0, 0.0], [0.5, 0.0], [3.0, 3.0]])
    d = DirectMultiSearch(budget=3).fit(p, seeds)
    assert d.n_iterations_ == 0
    assert sorted(d.front_.indices) == [1, 2]


def test_dms_empty_list():
    p, _ = toy(2)
    with pytest.raises(SeedingError):
        DirectMultiSearch(budget=10).fit(p, np.empty((0, 2)))
    infeasible = BiObjectiveProblem(lambda x: ((0.0, 0.0), 1.0, False), [-1.0], [1.0])
    with pytest.raises(SeedingError):
        DirectMultiSearch(budget=10).fit(infeasible, [0.0])


def test_ea_hypervolume_non_decreasing():
    p, x0 = toy(3)
    ea = EvolutionaryPareto(population_size=40, budget=4000, random_state=3).fit(p, x0)
    ref = (p.func(x0)[0][0], p.func(x0)[0][1])
    hv = [hypervolume(F, ref) for F in ea.front_history_]
    assert len(hv) == ea.n_iterations_ + 1
    assert all(b >= a for a, b in zip(hv, hv[1:]))
    assert hv[-1] > hv[0]


def test_ea_one_generation_is_filtered_population():
    p, x0 = toy(3)
    ea = EvolutionaryPareto(population_size=20, budget=20, random_state=0).fit(p, x0)
    assert ea.n_iterations_ == 0 and ea.n_evaluations_ == 20
    F = np.array([p.func(x)[0] for x in ea.population_])
    np.testing.assert_array_equal(np.sort(ea.front_.F, axis=0), np.sort(ea.front_history_[0], axis=0))
    assert len(ea.front_) <= 20 and mutually_nondominated(ea.front_.F)
    assert F.shape == (20, 2)


def test_ea_population_validation():
    p, x0 = toy(3)
    with pytest.raises(SolverError):
        EvolutionaryPareto(population_size=3).fit(p, x0)
    with pytest.raises(SolverError):
        EvolutionaryPareto(budget=-1).fit(p, x0)


def test_constraint_domination_ranks():
    F = np.array([[1.0, 1.0], [2.0, 2.0], [0.0, 0.0], [0.0, 0.0]])
    pen = np.array([0.0, 0.0, 5.0, 1.0])
    feas = np.array([True, True, False, False])
    r = constrained_ranks(F, pen, feas)
    assert list(r) == [0, 1, 3, 2]


def test_crowding_extremes_infinite():
    d = crowding_distance(np.array([[0.0, 3.0], [1.0, 2.0], [2.0, 1.0], [3.0, 0.0]]))
    assert math.isinf(d[0]) and math.isinf(d[3])
    assert d[1] == pytest.approx(4 / 3)


@pytest.mark.parametrize(
    "make",
    [
        lambda: WeightedSum(n_weights=5, per_run_budget=60),
        lambda: DirectMultiSearch(budget=300),
        lambda: EvolutionaryPareto(population_size=12, budget=300, random_state=9),
    ],
)
def test_bit_reproducible(make):
    runs = []
    for _ in range(2):
        p, x0 = toy(3)
        runs.append(make().fit(p, x0))
    a, b = runs
    assert a.front_.F.tobytes() == b.front_.F.tobytes()
    assert a.front_.indices == b.front_.indices
    assert a.n_evaluations_ == b.n_evaluations_


@pytest.mark.parametrize("budget", [0, 1, 7, 50, 333])
def test_budget_accounting(budget):
    p, x0 = toy(3)
    d = DirectMultiSearch(budget=budget).fit(p, x0)
    assert max(budget, 1) <= d.n_evaluations_ <= max(budget, 1) + 2 * p.dim
    p, x0 = toy(3)
    e = EvolutionaryPareto(population_size=10, budget=budget).fit(p, x0)
    assert max(budget, 10) <= e.n_evaluations_ < max(budget, 10) + 10


def test_sklearn_estimator_contract():
    est = DirectMultiSearch(budget=10, initial_step=0.2)
    assert est.get_params() == {"budget": 10, "initial_step": 0.2, "min_step": 1e-7}
    c = clone(est).set_params(budget=5)
    assert c.budget == 5 and est.budget == 10
    with pytest.raises(NotFittedError):
        est.predict()
    p, x0 = toy(3)
    F = est.fit(p, x0).predict()
    assert F.shape[1] == 2
    assert "population_size" in EvolutionaryPareto().get_params()


# -- road problem ----------------------------------------------------------------


@pytest.fixture(scope="module")
def road():
    terrain, cfg = case_study()
    seed = seed_alignment(terrain, cfg, CASE_START, CASE_END, m=5)
    return terrain, cfg, seed


def test_road_problem_bounds_and_seed(road):
    terrain, cfg, seed = road
    p = RoadAlignmentProblem(terrain, cfg, CostParameters(), seed.start, seed.end, 5)
    assert p.dim == 3 * 6 + (5 + 5 + 5 * 6) == seed.n_variables
    ev = p.evaluate(seed.to_vector())
    assert ev.feasible and ev.penalty < 1e-20 and p.n_evaluations == 1
    assert np.all(np.isfinite(ev.f))
    assert p.in_bounds(seed.to_vector())


def test_road_problem_unbuildable_is_infinite(road):
    terrain, cfg, seed = road
    p = RoadAlignmentProblem(terrain, cfg, CostParameters(), seed.start, seed.end, 5)
    x = seed.to_vector().copy()
    x[1], x[7] = x[0], x[6]  # two IPs coincide
    ev = p.evaluate(x)
    assert not ev.feasible and math.isinf(ev.f[0])


def test_seed_flat_terrain_straight_at_ground():
    t = load_terrain(np.full((21, 31), 50.0), 10.0)
    cfg = ConstraintConfig(np.array([[95, 105, 95, 105], [195, 205, 95, 105]]), r_min=20)
    d = seed_alignment(t, cfg, (10, 100), (290, 100), m=4)
    np.testing.assert_allclose(d.Y, 100.0)
    np.testing.assert_allclose(d.Z, 50.0)
    assert evaluate_constraints(d, t, cfg).feasible


def test_seed_steep_terrain_clipped_to_grade():
    x = 10.0 * np.arange(31)
    raster = np.tile(np.where(x < 150, 0.0, 60.0), (21, 1))
    t = load_terrain(raster, 10.0)
    cfg = ConstraintConfig(np.array([[95, 105, 95, 105], [195, 205, 95, 105]]), r_min=20, G_max=0.15, z_bar=60)
    d = seed_alignment(t, cfg, (10, 100, 0.0), (290, 100, 30.0), m=4)
    g = check_grade(d, build_horizontal(d), cfg.G_max)
    assert g.max() <= 1e-9
    assert np.any(np.abs(g) < 1e-9)
    assert evaluate_constraints(d, t, cfg).feasible


def test_seed_dog_leg_uses_box_centres():
    t = load_terrain(np.full((41, 41), 10.0), 10.0)
    boxes = np.array([[90, 110, 240, 260], [290, 310, 140, 160]])
    cfg = ConstraintConfig(boxes, r_min=20)
    d = seed_alignment(t, cfg, (20, 20), (380, 380), m=3)
    np.testing.assert_allclose(np.column_stack([d.X, d.Y]), [[100, 250], [300, 150]])
    assert evaluate_constraints(d, t, cfg).feasible


def test_seed_failure_names_constraint():
    t = load_terrain(np.full((21, 21), 10.0), 10.0)
    cfg = ConstraintConfig(np.array([[95, 105, 95, 105]]), G_max=0.01)
    with pytest.raises(SeedingError, match="grade"):
        seed_alignment(t, cfg, (10, 10, 0.0), (190, 190, 50.0), m=3)


def test_grade_limited_profile_two_sided():
    z = grade_limited_profile([100.0, 100.0, 0.0], [10, 10, 10, 10], 0.0, 0.0, 0.5)
    np.testing.assert_allclose(z, [5.0, 10.0, 5.0])


def test_surrogate_model_transform(road):
    terrain, cfg, seed = road
    model = SurrogateCostModel(terrain, CostParameters(), seed.start, seed.end, 5).fit()
    X = np.vstack([seed.to_vector(), seed.to_vector() + 0.5])
    out = model.transform(X)
    ref = evaluate_costs(seed, terrain, CostParameters()).objectives
    np.testing.assert_allclose(out[0], ref, rtol=1e-12)
    assert out.shape == (2, 2)
    bad = seed.to_vector().copy()
    bad[1], bad[7] = bad[0], bad[6]
    assert np.all(np.isinf(model.transform(bad[None, :])))
    with pytest.raises(ValueError):
        SurrogateCostModel().fit()
    with pytest.raises(NotFittedError):
        SurrogateCostModel(terrain, None, seed.start, seed.end).transform(X)
