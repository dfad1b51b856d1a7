import random
from fractions import Fraction

import pytest

from ticlab.control import alpha_hat
from ticlab.dynamics import cost_J, to_path
from ticlab.errors import DomainError, ShapeError
from ticlab.precommit import (
    DETERMINISTIC_STARTS,
    QuadraticObjective,
    alpha_hat_path,
    analytic_candidate,
    analytic_candidate_boundary,
    inconsistency_witness,
    maximize_F,
    objective_F,
    random_feasible_path,
    tail_bound,
)
from ticlab.schedule import DyadicSchedule
from ticlab.verification import random_piecewise_control

F = Fraction


class TestObjective:
    def test_weights(self):
        obj = QuadraticObjective.build(4)
        assert obj.weights[0] == F(-1, 2)
        assert obj.weights[-1] == F(3)
        assert obj.weights[1::2] == (F(-5, 2),) * 4  # splits
        assert obj.weights[2:-1:2] == (F(5, 2),) * 3  # interior starts

    def test_zero_path(self):
        path = analytic_candidate(6)
        zero = [F(0)] * len(path.times)
        assert objective_F(zero, 6) == 0

    def test_switching_path_value(self):
        # the truncated objective of the switching path misses exactly the
        # anchor mass beyond the truncation: 1/32 - 2**-(2N+5)
        sched = DyadicSchedule(depth=8)
        path = to_path(alpha_hat(sched), sched)
        assert objective_F(path, 8) == F(1, 32) - F(1, 2**21)

    def test_analytic_candidate_value_law(self):
        for depth in (2, 4, 8, 12):
            value = objective_F(analytic_candidate(depth), depth)
            assert value == F(5, 96) - F(1, 192) * F(1, 4) ** (depth - 1)

    def test_analytic_candidate_approaches_5_96(self):
        vals = [objective_F(analytic_candidate(d), d) for d in (4, 8, 12, 16)]
        assert all(v < F(5, 96) for v in vals)
        assert F(5, 96) - vals[-1] < F(1, 10**8)

    def test_boundary_candidate_value_law(self):
        for depth in (4, 8):
            value = objective_F(analytic_candidate_boundary(depth), depth)
            assert value == F(5, 96) + F(133, 96) * F(1, 4) ** depth
            assert value > F(5, 96)

    def test_telescoping_matches_direct(self):
        rng = random.Random(5)
        for _ in range(30):
            depth = rng.randint(2, 9)
            path = random_feasible_path(rng, depth)
            obj = QuadraticObjective.build(depth)
            assert obj.value(path.values) == obj.value_direct(path.values)

    def test_missing_values_rejected(self):
        with pytest.raises(ShapeError):
            objective_F(analytic_candidate(3), 5)


class TestTailBound:
    def test_values(self):
        assert tail_bound(0) == 3
        assert tail_bound(4) == F(3, 256)

    def test_empirical(self):
        rng = random.Random(9)
        for depth in (4, 8):
            for _ in range(20):
                path = random_feasible_path(rng, depth + 4)
                gap = abs(objective_F(path, depth + 4) - objective_F(path, depth))
                assert gap <= tail_bound(depth)

    def test_negative_depth(self):
        with pytest.raises(DomainError):
            tail_bound(-1)


class TestMaximize:
    def test_reaches_5_96_at_depth_8(self):
        res = maximize_F(8, restarts=8, iterations=200, seed=42)
        assert res.best_value >= F(5, 96) - F(1, 10**9)
        assert res.best_value >= F(5, 96)  # exact, via the boundary start

    def test_switching_benchmark_always_holds(self):
        for depth in (4, 8):
            res = maximize_F(depth, restarts=0, iterations=50, seed=1)
            assert res.best_value >= F(1, 32)

    def test_zero_start_no_iterations(self):
        res = maximize_F(2, restarts=0, iterations=0, seed=1, starts=("zero",))
        assert res.best_value == 0

    def test_deterministic_given_seed(self):
        a = maximize_F(6, restarts=6, iterations=100, seed=11)
        b = maximize_F(6, restarts=6, iterations=100, seed=11)
        assert a.best_value == b.best_value
        assert a.best_path.values == b.best_path.values

    def test_final_value_at_least_every_start(self):
        res = maximize_F(6, restarts=4, iterations=120, seed=3)
        assert all(res.best_value >= v for v in res.start_values.values())

    def test_monotone_improvement_over_iterations(self):
        prev = None
        for iters in (0, 1, 2, 5, 20):
            res = maximize_F(5, restarts=0, iterations=iters, seed=2,
                             starts=("analytic",))
            if prev is not None:
                assert res.best_value >= prev
            prev = res.best_value

    def test_monotone_in_depth_with_tolerance(self):
        prev, prev_depth = None, None
        for depth in (4, 6, 8, 10):
            res = maximize_F(depth, restarts=0, iterations=120, seed=42,
                             starts=DETERMINISTIC_STARTS)
            if prev is not None:
                assert res.best_value >= prev - tail_bound(prev_depth)
            prev, prev_depth = res.best_value, depth

    def test_result_fields(self):
        res = maximize_F(4, restarts=2, iterations=50, seed=6)
        assert res.truncation_bound == tail_bound(4)
        assert res.value_interval[0] == res.best_value - tail_bound(4)
        assert res.value_interval[1] is None
        assert res.best_path.times[-1] == DyadicSchedule(depth=4).breakpoints[-1]

    def test_feasibility_of_best_path(self):
        res = maximize_F(7, restarts=5, iterations=150, seed=13)
        path = res.best_path  # LipschitzPath validates on construction
        assert abs(path.values[-1]) <= 1 - path.times[-1]

    def test_depth_validation(self):
        with pytest.raises(DomainError):
            maximize_F(1)

    def test_start_selection(self):
        from ticlab.errors import ConfigurationError

        res = maximize_F(4, restarts=2, iterations=40, seed=5, starts=("zero", "random"))
        assert set(res.start_values) == {"zero", "random:0", "random:1"}
        with pytest.raises(ConfigurationError):
            maximize_F(4, starts=("nope",))
        with pytest.raises(ConfigurationError):
            maximize_F(4, restarts=0, starts=("random",))

    def test_objective_consistent_with_cost(self):
        # minus the cost of the reconstructed control, within the tail bound
        from ticlab.dynamics import path_to_control

        res = maximize_F(8, restarts=4, iterations=150, seed=42)
        alpha = path_to_control(res.best_path)
        assert abs(res.best_value + cost_J(0, alpha)) <= tail_bound(8)


class TestPathOnlyDependence:
    def test_same_breakpoints_same_objective(self):
        rng = random.Random(21)
        sched = DyadicSchedule(depth=8)
        from ticlab.dynamics import path_to_control

        for _ in range(6):
            alpha = random_piecewise_control(rng, max_segments=10)
            path = to_path(alpha, sched)
            beta = path_to_control(path)
            assert objective_F(path, 8) == objective_F(to_path(beta, sched), 8)


class TestWitness:
    def test_complete_chain_at_depth_8(self):
        w = inconsistency_witness(8, restarts=4, iterations=150, seed=42)
        assert w.complete
        assert w.equilibrium_value == 0
        assert w.dominating_value == -F(1, 32)
        assert w.best_value >= F(5, 96)
        assert w.precommit_value_bound <= -F(5, 96) < -F(1, 32) < 0
        assert w.spike_witness is not None
        assert w.spike_witness["t"] > 0
        assert w.spike_witness["rate"] < 0
        assert abs(w.alpha_hat_rate_at_zero + 1) < F(1, 1000)

    def test_depth_validation(self):
        with pytest.raises(DomainError):
            inconsistency_witness(3)

    def test_json_round_trip(self):
        w = inconsistency_witness(6, restarts=2, iterations=80, seed=5)
        doc = w.to_json_dict()
        assert doc["complete"] is True
        assert doc["equilibrium_value"] == "0"
        assert doc["dominating_value"] == "-1/32"


def test_alpha_hat_path_matches_transform():
    sched = DyadicSchedule(depth=6)
    assert alpha_hat_path(6).values == to_path(alpha_hat(sched), sched).values
