import random
from fractions import Fraction

import pytest

from ticlab.control import alpha_hat, constant, zero_control
from ticlab.equilibrium import (
    SpikeProbe,
    first_order_coeff,
    necessary_condition_check,
    perturbed_cost,
    spike_probe,
    spike_rate,
    verify_equilibrium,
)
from ticlab.errors import ConfigurationError, DomainError
from ticlab.schedule import DyadicSchedule, dyadic_grid, kernel_value, next_breakpoint
from ticlab.verification import random_piecewise_control

SCHED = DyadicSchedule()
HAT = alpha_hat(SCHED)
ZERO = zero_control()
ONE_P = constant(1)
MINUS = constant(-1)


class TestPerturbedCost:
    def test_quarter_spike(self):
        assert perturbed_cost(0, Fraction(1, 4), ONE_P, ZERO) == Fraction(1, 32)

    def test_identical_controls(self):
        assert perturbed_cost(0, Fraction(1, 8), HAT, HAT) == cost_of(HAT, 0)

    def test_negative_spike(self):
        assert perturbed_cost(0, Fraction(1, 8), MINUS, ZERO) == Fraction(1, 128)

    def test_ordering_enforced(self):
        with pytest.raises(DomainError):
            perturbed_cost(Fraction(1, 2), Fraction(3, 4), ONE_P, ZERO)


def cost_of(control, t):
    from ticlab.dynamics import cost_J

    return cost_J(t, control)


class TestSpikeRate:
    def test_zero_candidate_nonnegative(self):
        rate = spike_rate(0, ONE_P, ZERO, levels=20)
        # exact closed form: (c/2) * delta at the smallest delta
        assert rate == Fraction(1, 2**21)
        assert rate >= 0

    def test_against_switching_candidate(self):
        rate = spike_rate(0, MINUS, HAT, levels=20)
        assert rate == -1 + Fraction(1, 2**19)
        assert abs(rate + 1) <= Fraction(1, 2**8)

    def test_identical_is_zero(self):
        assert spike_rate(Fraction(1, 3), HAT, HAT, levels=12) == 0

    def test_probe_structure(self):
        probe = spike_probe(Fraction(1, 4), MINUS, ZERO, levels=12)
        assert len(probe.rates) == 7
        assert probe.delta_sequence[0] == Fraction(1, 2**6)
        assert all(probe.t + d <= 1 for d in probe.delta_sequence)

    def test_delta_capped_at_breakpoint(self):
        t = Fraction(93, 256)
        cap = next_breakpoint(t) - t
        probe = spike_probe(t, ONE_P, ZERO, levels=4)
        assert max(probe.delta_sequence) <= cap

    def test_levels_validation(self):
        with pytest.raises(ConfigurationError):
            spike_probe(0, ONE_P, ZERO, levels=2)
        with pytest.raises(DomainError):
            spike_probe(1, ONE_P, ZERO)


class TestFirstOrderCoeff:
    def test_zero_candidate_kills_coefficient(self):
        assert first_order_coeff(Fraction(1, 3), ONE_P, ZERO) == 0

    def test_against_switching(self):
        assert first_order_coeff(0, MINUS, HAT) == -1

    def test_vanishes_where_signs_agree(self):
        assert first_order_coeff(Fraction(3, 8), MINUS, HAT) == 0

    def test_matches_finite_difference(self):
        rng = random.Random(7)
        for cand in (HAT, constant(Fraction(1, 2)), ZERO):
            for _ in range(4):
                t = Fraction(rng.randint(0, 63), 64)
                pert = constant(rng.choice([-1, 1]))
                coeff = first_order_coeff(t, pert, cand)
                probe = spike_probe(t, pert, cand, levels=18)
                errs = [abs(r - coeff) for r in probe.rates]
                fitted = [e / d for e, d in zip(errs, probe.delta_sequence)]
                c_fit = 2 * max(fitted[: len(fitted) // 2 + 1]) + 1
                for e, d in zip(errs[-3:], probe.delta_sequence[-3:]):
                    assert e <= c_fit * d


class TestVerifyEquilibrium:
    def test_zero_passes_exactly(self):
        report = verify_equilibrium(ZERO, dyadic_grid(6), tol=0)
        assert report.passed
        assert report.witnesses == []
        assert report.provenance["min_rate"] >= 0

    def test_switching_candidate_fails_at_zero(self):
        report = verify_equilibrium(HAT, dyadic_grid(4), tol=0)
        assert not report.passed
        at_zero = [w for w in report.witnesses if w["t"] == 0]
        assert at_zero and abs(at_zero[0]["rate"] + 1) < Fraction(1, 1000)
        assert at_zero[0]["perturbation_id"] == "const:-1"

    def test_constant_half_fails(self):
        report = verify_equilibrium(constant(Fraction(1, 2)), dyadic_grid(4), tol=0)
        assert not report.passed

    def test_empty_grid_rejected(self):
        with pytest.raises(ConfigurationError):
            verify_equilibrium(ZERO, [])

    def test_grid_domain_enforced(self):
        with pytest.raises(DomainError):
            verify_equilibrium(ZERO, [Fraction(1)])

    def test_custom_perturbations(self):
        report = verify_equilibrium(
            ZERO, dyadic_grid(3), perturbations=[("half", constant(Fraction(1, 2)))], tol=0
        )
        assert report.passed
        assert report.settings["perturbations"] == ["half"]

    def test_report_serializes(self):
        report = verify_equilibrium(HAT, dyadic_grid(3), tol=0)
        doc = report.to_json_dict()
        assert doc["verdict"] == "FAIL"
        assert doc["witnesses"][0]["rate"].count("/") <= 1


class TestNecessaryConditions:
    def test_zero_clean(self):
        rep = necessary_condition_check(ZERO, dyadic_grid(5))
        assert rep.clean
        assert rep.identity_residual == 0

    def test_switching_violates_on_a_phases(self):
        rep = necessary_condition_check(HAT, dyadic_grid(5))
        assert rep.identity_residual == 0
        # every A-phase grid point violates: Y1 > 0 there but the control is +1
        from ticlab.schedule import locate

        a_points = [t for t in dyadic_grid(5) if locate(t).phase == "A"]
        violating = {v["t"] for v in rep.sign_violations}
        assert set(a_points) <= violating

    def test_constant_one_violates_everywhere(self):
        rep = necessary_condition_check(ONE_P, dyadic_grid(4))
        assert len(rep.sign_violations) == len(dyadic_grid(4))

    def test_identity_residual_zero_on_random_controls(self):
        rng = random.Random(13)
        for _ in range(25):
            alpha = random_piecewise_control(rng, max_segments=10)
            rep = necessary_condition_check(alpha, dyadic_grid(3))
            assert rep.identity_residual == 0


def test_spike_probe_validation():
    with pytest.raises(DomainError):
        SpikeProbe(t=Fraction(1, 2), perturbation=ONE_P,
                   delta_sequence=(Fraction(3, 4),), rates=(Fraction(0),))
    with pytest.raises(ConfigurationError):
        SpikeProbe(t=Fraction(0), perturbation=ONE_P,
                   delta_sequence=(Fraction(1, 4),), rates=())


def test_shared_evaluator_matches_generic_splice():
    # the probe fast path reuses the sweep algebra; it must agree with the
    # from-scratch splice on arbitrary inputs, including breakpoint crossings
    from ticlab.equilibrium import _SpliceCostEvaluator

    rng = random.Random(41)
    for cand in (HAT, ZERO, constant(Fraction(1, 2))):
        evaluator = _SpliceCostEvaluator(cand)
        for _ in range(15):
            t = Fraction(rng.randint(0, 255), 256)
            delta = Fraction(1, 2 ** rng.randint(1, 12))
            if t + delta > 1:
                continue
            pert = random_piecewise_control(rng, max_segments=4)
            assert evaluator.cost(t, delta, pert) == perturbed_cost(t, delta, pert, cand)


def test_closed_form_rate_within_one_kernel_piece():
    # while the spike interval stays inside one kernel piece the perturbed
    # cost of the zero candidate is exactly c/2 * (a*delta)^2
    rng = random.Random(3)
    for _ in range(30):
        t = Fraction(rng.randint(0, 255), 256)
        cap = next_breakpoint(t) - t
        delta = min(cap, Fraction(1, 2 ** rng.randint(2, 10)))
        a = Fraction(rng.randint(-4, 4), 4)
        got = perturbed_cost(t, delta, constant(a), ZERO)
        assert got == kernel_value(t) / 2 * (a * delta) ** 2
        assert got >= 0


def test_closed_form_holds_for_arbitrary_perturbations():
    # same closed form with the squared integral of a general perturbation
    from ticlab.dynamics import y1

    rng = random.Random(37)
    for _ in range(30):
        alpha = random_piecewise_control(rng, max_segments=8)
        t = Fraction(rng.randint(0, 255), 256)
        cap = next_breakpoint(t) - t
        delta = min(cap, Fraction(1, 2 ** rng.randint(2, 10)))
        mass = y1(alpha, t) - y1(alpha, t + delta)
        got = perturbed_cost(t, delta, alpha, ZERO)
        assert got == kernel_value(t) / 2 * mass**2
        assert got >= 0


def test_first_order_slope_on_randomized_candidates():
    # candidate controls drawn at random; the probe's fine half is below the
    # candidate's own segment spacing, so the rates converge linearly
    rng = random.Random(53)
    for _ in range(8):
        cand = random_piecewise_control(rng, max_segments=8)
        t = Fraction(rng.randint(0, 63), 64)
        pert = constant(rng.choice([-1, 1]))
        coeff = first_order_coeff(t, pert, cand)
        probe = spike_probe(t, pert, cand, levels=18)
        errs = [abs(r - coeff) for r in probe.rates]
        fitted = [e / d for e, d in zip(errs, probe.delta_sequence)]
        c_fit = 2 * max(fitted[: len(fitted) // 2 + 1]) + 1
        for e, d in zip(errs[-3:], probe.delta_sequence[-3:]):
            assert e <= c_fit * d
