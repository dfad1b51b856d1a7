import io
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ticlab.control import alpha_hat, concat, constant, linear_combination, zero_control
from ticlab.dynamics import (
    LipschitzPath,
    build_trajectory,
    cost_J,
    kernel_moment_tail,
    path_to_control,
    self_energy,
    to_path,
    write_trajectory_csv,
    y1,
    y2,
    y2_numeric,
)
from ticlab.errors import AdmissibilityError, DomainError
from ticlab.schedule import DyadicSchedule, s_point, t_point
from ticlab.verification import random_piecewise_control

SCHED = DyadicSchedule()
HAT = alpha_hat(SCHED)


class TestY1:
    def test_zero(self):
        assert y1(zero_control(), Fraction(1, 3)) == 0

    def test_switching_at_zero(self):
        assert y1(HAT, 0) == Fraction(1, 2)

    def test_switching_at_s1(self):
        assert y1(HAT, Fraction(11, 16)) == Fraction(1, 16)

    def test_inside_tail_region(self):
        # generation floor: value at a split point is 2**-(n+3)
        assert y1(HAT, s_point(30)) == Fraction(1, 2**33)

    def test_domain(self):
        with pytest.raises(DomainError):
            y1(HAT, Fraction(3, 2))


class TestY2:
    def test_zero(self):
        assert y2(zero_control(), Fraction(2, 7)) == 0

    def test_switching_anchors(self):
        assert y2(HAT, 0) == -Fraction(1, 32)
        assert y2(HAT, Fraction(1, 2)) == -Fraction(1, 128)

    def test_switching_inside_generation(self):
        # frozen from the generation-1 anchor plus exact quadrature over [3/8, 1/2]
        assert y2(HAT, Fraction(3, 8)) == -Fraction(19, 128)

    def test_constant_to_horizon(self):
        # geometric moment sum: integral of c(s)*(1-s) over [0,1) is 31/32
        assert y2(constant(1), 0) == Fraction(31, 32)
        assert y2(constant(1), Fraction(255, 256)) == kernel_moment_tail(8, 1)

    def test_cost_alias(self):
        spliced = concat(constant(1), zero_control(), Fraction(1, 4))
        assert cost_J(0, spliced) == Fraction(1, 32)
        assert cost_J(Fraction(1, 2), HAT) == y2(HAT, Fraction(1, 2))


def test_moment_tail_closed_forms():
    # hand-derived geometric sums for the kernel moments
    assert kernel_moment_tail(0, 0) == Fraction(9, 4)
    assert kernel_moment_tail(0, 1) == Fraction(31, 32)
    assert kernel_moment_tail(1, 1) == Fraction(31, 128)
    assert kernel_moment_tail(0, 2) == Fraction(251, 512) * Fraction(8, 7)


def test_terminal_conditions():
    for control in (HAT, constant(1), zero_control()):
        assert y1(control, 1) == 0
        assert y2(control, 1) == 0


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=60, deadline=None)
def test_self_interaction_identity(seed):
    alpha = random_piecewise_control(random.Random(seed))
    total = y1(alpha, 0)
    assert self_energy(alpha, 0) == total * total / 2


def test_self_interaction_identity_with_tail():
    total = y1(HAT, 0)
    assert self_energy(HAT, 0) == total * total / 2


def test_linearity():
    rng = random.Random(5)
    alpha = random_piecewise_control(rng, max_segments=6)
    beta = random_piecewise_control(rng, max_segments=6)
    combo = linear_combination(Fraction(3, 2), alpha, Fraction(-2), beta)
    for t in (0, Fraction(1, 3), Fraction(31, 32)):
        assert y1(combo, t) == Fraction(3, 2) * y1(alpha, t) - 2 * y1(beta, t)


class TestPath:
    def test_zero(self):
        path = to_path(zero_control(), SCHED)
        assert set(path.values) == {0}

    def test_constant_one(self):
        path = to_path(constant(1), SCHED)
        for u, x in zip(path.times, path.values):
            assert x == 1 - u

    def test_switching(self):
        path = to_path(HAT, SCHED)
        assert path.at(t_point(1)) == Fraction(1, 4)
        assert path.at(t_point(2)) == Fraction(1, 8)

    def test_bound_enforced(self):
        with pytest.raises(AdmissibilityError):
            to_path(constant(2, bound=3), SCHED)

    def test_round_trip(self):
        rng = random.Random(17)
        from ticlab.precommit import random_feasible_path

        for _ in range(8):
            path = random_feasible_path(rng, 9)
            alpha = path_to_control(path)
            for u, x in zip(path.times, path.values):
                assert y1(alpha, u) == x

    def test_lipschitz_validation(self):
        with pytest.raises(AdmissibilityError):
            LipschitzPath(times=(Fraction(0), Fraction(1, 4)),
                          values=(Fraction(0), Fraction(1, 2)))
        with pytest.raises(AdmissibilityError):
            LipschitzPath(times=(Fraction(0), Fraction(3, 4)),
                          values=(Fraction(0), Fraction(1, 2)))


class TestTrajectory:
    def test_matches_direct_evaluation(self):
        rng = random.Random(23)
        alpha = random_piecewise_control(rng, max_segments=8)
        traj = build_trajectory(alpha)
        for j in range(0, 64, 5):
            t = Fraction(j, 64)
            if traj.pieces and t < traj.pieces[-1][1]:
                assert traj.y1_at(t) == y1(alpha, t)
                assert traj.y2_at(t) == y2(alpha, t)

    def test_switching_tail_anchors(self):
        traj = build_trajectory(alpha_hat(DyadicSchedule(depth=6)))
        assert traj.truncation_depth == 6
        assert traj.tail_y1 == Fraction(1, 2**7)
        assert traj.tail_y2 == -Fraction(1, 2**17)
        assert traj.y2_at(0) == -Fraction(1, 32)

    def test_degrees_by_control_class(self):
        # piecewise-constant controls give quadratic cost pieces; affine
        # segments push the degree to four
        const_traj = build_trajectory(HAT)
        assert max(len(p[3]) for p in const_traj.pieces) <= 3
        rng = random.Random(47)
        affine = random_piecewise_control(rng, max_segments=5)
        while all(seg.c1 == 0 for seg in affine.segments):
            affine = random_piecewise_control(rng, max_segments=5)
        affine_traj = build_trajectory(affine)
        assert max(len(p[3]) for p in affine_traj.pieces) == 5

    def test_csv_export(self):
        out = io.StringIO()
        write_trajectory_csv(HAT, [0, Fraction(3, 8), Fraction(1, 2)], out, precision=6)
        lines = out.getvalue().strip().splitlines()
        assert lines[0] == "t,y1,y2,t_decimal,y1_decimal,y2_decimal"
        assert lines[1].startswith("0,1/2,-1/32,")
        assert "-19/128" in lines[2]


class TestNumericOracle:
    def test_matches_exact_on_random_controls(self):
        rng = random.Random(31)
        for _ in range(12):
            alpha = random_piecewise_control(rng)
            t = Fraction(rng.randint(0, 255), 256)
            assert abs(float(y2(alpha, t)) - y2_numeric(alpha, t)) < 1e-9

    def test_matches_exact_on_switching_control(self):
        for t in (0, Fraction(3, 8), Fraction(7, 8)):
            assert abs(float(y2(HAT, t)) - y2_numeric(HAT, t)) < 1e-9

    def test_matches_exact_with_nonzero_horizon_tail(self):
        c = constant(Fraction(1, 2))
        assert abs(float(y2(c, Fraction(1, 3))) - y2_numeric(c, Fraction(1, 3))) < 1e-9
