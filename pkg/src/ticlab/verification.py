"""Named property checks backing the verify command and the test suite.

Each check returns a CheckResult; exact checks assert rational identities
with zero tolerance, float checks compare the exact engine against the
floating oracles and honor the configured tolerance.  Randomized inputs
are driven by a seeded generator, so a run is a deterministic function of
its settings.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import control as ctl
from . import dynamics as dyn
from . import equilibrium as eq
from . import naive as nv
from . import pareto as pt
from . import precommit as pc
from .rational import as_fraction
from .schedule import DyadicSchedule, dyadic_grid, kernel_value, locate, s_point, t_point

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_piecewise_control(rng: random.Random, max_segments: int = 20,
                             grid_depth: int = 8, bound=ONE,
                             allow_linear: bool = True) -> ctl.PiecewiseControl:
    """Random exact control: dyadic segment starts, dyadic endpoint values.

    Affine pieces interpolate two dyadic endpoint values, so the bound holds
    on the whole piece whenever it holds at the endpoints.
    """
    denom = 2**grid_depth
    n_segments = rng.randint(1, max_segments)
    starts = sorted(rng.sample(range(1, denom), min(n_segments - 1, denom - 1)))
    cuts = [ZERO] + [Fraction(j, denom) for j in starts] + [ONE]
    b = as_fraction(bound)
    scale = 2 * denom

    def val():
        return Fraction(rng.randint(-scale, scale), scale) * b

    segments = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v0 = val()
        if allow_linear and rng.random() < 0.5:
            v1 = val()
            c1 = (v1 - v0) / (hi - lo)
            segments.append(ctl.Segment(lo, v0 - c1 * lo, c1))
        else:
            segments.append(ctl.Segment(lo, v0, ZERO))
    return ctl.PiecewiseControl(segments=tuple(segments), bound=b)


def _result(name, passed, detail=""):
    return CheckResult(name=name, passed=bool(passed), detail=detail)


# --- schedule ---------------------------------------------------------------


def check_schedule_gap_law(settings) -> CheckResult:
    for n in range(64):
        if s_point(n) - t_point(n) != 3 * (t_point(n + 1) - s_point(n)):
            return _result("schedule-gap-law", False, "failed at generation %d" % n)
    return _result("schedule-gap-law", True, "A:B length ratio exactly 3 over 64 generations")


def check_schedule_kernel_agreement(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    for _ in range(500):
        t = Fraction(rng.randint(0, 2**16 - 1), 2**16)
        loc = locate(t)
        want = Fraction(1) if loc.phase == "A" else Fraction(6)
        if kernel_value(t) != want:
            return _result("schedule-kernel-agreement", False, "mismatch at %s" % t)
        # linear scan oracle for the generation index
        n = 0
        while t_point(n + 1) <= t:
            n += 1
        if n != loc.generation:
            return _result("schedule-kernel-agreement", False, "generation at %s" % t)
    return _result("schedule-kernel-agreement", True, "locate matches scan on 500 samples")


# --- control ----------------------------------------------------------------


def check_concat_identity(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    grid = dyadic_grid(6)
    for _ in range(25):
        alpha = random_piecewise_control(rng, max_segments=6)
        tau = Fraction(rng.randint(0, 64), 64)
        spliced = ctl.concat(alpha, alpha, tau)
        for t in grid:
            if ctl.evaluate(spliced, t) != ctl.evaluate(alpha, t):
                return _result("control-concat-identity", False,
                               "self-splice at tau=%s differs at t=%s" % (tau, t))
    return _result("control-concat-identity", True, "self-splice is pointwise identical")


def check_alpha_hat_pattern(settings) -> CheckResult:
    schedule = DyadicSchedule(depth=12)
    hat = ctl.alpha_hat(schedule)
    for n in range(12):
        if ctl.evaluate(hat, t_point(n)) != 1 or ctl.evaluate(hat, s_point(n)) != -1:
            return _result("control-switching-pattern", False, "wrong sign at generation %d" % n)
        plus = s_point(n) - t_point(n)
        minus = t_point(n + 1) - s_point(n)
        if plus != 3 * minus:
            return _result("control-switching-pattern", False, "run ratio at generation %d" % n)
    return _result("control-switching-pattern", True, "+1/-1 run ratio exactly 3 per generation")


# --- dynamics ---------------------------------------------------------------


def check_self_interaction(settings, count: int = 50) -> CheckResult:
    rng = random.Random(settings["seed"])
    if settings["arithmetic"] == "float":
        # route the self integral through the floating oracle; residuals are
        # then machine-noise sized and fail at zero tolerance by design
        worst = 0.0
        tol = float(settings["tol"])
        for _ in range(max(count // 5, 5)):
            alpha = random_piecewise_control(rng, max_segments=8)
            total = float(dyn.y1(alpha, ZERO))
            residual = abs(dyn.y2_numeric(alpha, ZERO, weighted=False) - total * total / 2)
            worst = max(worst, residual)
        if worst > tol:
            return _result("dynamics-self-interaction", False,
                           "float residual %.3g over tol %.3g" % (worst, tol))
        return _result("dynamics-self-interaction", True, "max |residual| %.3g" % worst)
    for _ in range(count):
        alpha = random_piecewise_control(rng)
        total = dyn.y1(alpha, ZERO)
        residual = dyn.self_energy(alpha, ZERO) - total * total / 2
        if residual != 0:
            return _result("dynamics-self-interaction", False, "nonzero residual %s" % residual)
    return _result("dynamics-self-interaction", True, "residual exactly 0 on %d controls" % count)


def check_terminal_conditions(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    controls = [random_piecewise_control(rng) for _ in range(10)]
    controls.append(ctl.alpha_hat(DyadicSchedule(depth=10)))
    for alpha in controls:
        if dyn.y1(alpha, 1) != 0 or dyn.y2(alpha, 1) != 0:
            return _result("dynamics-terminal", False, "nonzero at the horizon")
    return _result("dynamics-terminal", True, "both components vanish at the horizon")


def check_linearity(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    for _ in range(20):
        a = Fraction(rng.randint(-8, 8), 4)
        b = Fraction(rng.randint(-8, 8), 4)
        alpha = random_piecewise_control(rng, max_segments=6)
        beta = random_piecewise_control(rng, max_segments=6)
        combo = ctl.linear_combination(a, alpha, b, beta)
        for t in (ZERO, Fraction(1, 3), Fraction(7, 8)):
            if dyn.y1(combo, t) != a * dyn.y1(alpha, t) + b * dyn.y1(beta, t):
                return _result("dynamics-linearity", False, "broken at t=%s" % t)
    return _result("dynamics-linearity", True, "first component is linear in the control")


def check_oracle_equivalence(settings, count: int = 30) -> CheckResult:
    rng = random.Random(settings["seed"])
    tol = float(settings["tol"]) if settings["arithmetic"] == "float" else 1e-9
    worst = 0.0
    for _ in range(count):
        alpha = random_piecewise_control(rng)
        t = Fraction(rng.randint(0, 255), 256)
        exact = float(dyn.y2(alpha, t))
        approx = dyn.y2_numeric(alpha, t)
        worst = max(worst, abs(exact - approx))
    if worst > tol:
        return _result("dynamics-oracle-equivalence", False,
                       "max |exact - quad| = %.3g > 1e-9" % worst)
    return _result("dynamics-oracle-equivalence", True,
                   "max |exact - quad| = %.3g on %d controls" % (worst, count))


def check_path_round_trip(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    schedule = DyadicSchedule(depth=10)
    for _ in range(10):
        path = pc.random_feasible_path(rng, 10)
        alpha = dyn.path_to_control(path)
        for u, x in zip(path.times, path.values):
            if dyn.y1(alpha, u) != x:
                return _result("dynamics-path-round-trip", False, "value at %s" % u)
    return _result("dynamics-path-round-trip", True, "breakpoint values reproduced exactly")


# --- equilibrium ------------------------------------------------------------


def check_spike_nonnegative_closed_form(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    zero = ctl.zero_control()
    for _ in range(50):
        t = Fraction(rng.randint(0, 255), 256)
        from .schedule import next_breakpoint

        cap = next_breakpoint(t) - t
        delta = min(cap, Fraction(1, 2 ** rng.randint(2, 12)))
        a = Fraction(rng.randint(-4, 4), 4)
        pert = ctl.constant(a)
        got = eq.perturbed_cost(t, delta, pert, zero)
        want = kernel_value(t) / 2 * (a * delta) ** 2
        if got != want:
            return _result("equilibrium-quadratic-form", False,
                           "spike cost at t=%s delta=%s" % (t, delta))
    return _result("equilibrium-quadratic-form", True,
                   "single-piece spike cost matches c/2 * (a*delta)^2 exactly")


def check_first_order_slope(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    schedule = DyadicSchedule(depth=12)
    candidates = [ctl.alpha_hat(schedule), ctl.constant(Fraction(1, 2)),
                  ctl.zero_control()]
    for cand in candidates:
        for _ in range(6):
            t = Fraction(rng.randint(0, 63), 64)
            pert = ctl.constant(Fraction(rng.choice([-1, 1])))
            coeff = eq.first_order_coeff(t, pert, cand)
            probe = eq.spike_probe(t, pert, cand, levels=16)
            errs = [abs(r - coeff) for r in probe.rates]
            deltas = probe.delta_sequence
            # fit the quadratic-remainder constant on the coarse half,
            # then demand it on the fine half
            cs = [e / d for e, d in zip(errs, deltas) if d > 0]
            c_fit = 2 * max(cs[: len(cs) // 2 + 1]) + 1
            for e, d in zip(errs[len(errs) // 2:], deltas[len(deltas) // 2:]):
                if e > c_fit * d:
                    return _result("equilibrium-first-order-slope", False,
                                   "rate drifts from the analytic coefficient at t=%s" % t)
    return _result("equilibrium-first-order-slope", True,
                   "finite-delta rates converge linearly to the analytic coefficient")


def check_identity_residual(settings, count: int = 40) -> CheckResult:
    rng = random.Random(settings["seed"])
    grid = dyadic_grid(4)
    for _ in range(count):
        alpha = random_piecewise_control(rng, max_segments=8)
        rep = eq.necessary_condition_check(alpha, grid)
        if rep.identity_residual != 0:
            return _result("equilibrium-identity-residual", False,
                           "residual %s" % rep.identity_residual)
    return _result("equilibrium-identity-residual", True,
                   "residual exactly 0 on %d random controls" % count)


def check_zero_equilibrium_exact(settings) -> CheckResult:
    rep = eq.verify_equilibrium(ctl.zero_control(), dyadic_grid(6), tol=ZERO)
    if not rep.passed:
        return _result("equilibrium-zero-exact", False, "zero control failed the spike test")
    return _result("equilibrium-zero-exact", True, "zero control passes with zero tolerance")


# --- pareto -----------------------------------------------------------------


def check_anchor_match(settings) -> CheckResult:
    schedule = DyadicSchedule(depth=14)
    hat = ctl.alpha_hat(schedule)
    for n in range(schedule.depth):
        if dyn.y2(hat, t_point(n)) != pt.y2_hat_closed(n):
            return _result("pareto-anchor-match", False, "generation %d" % n)
        if dyn.y1(hat, t_point(n)) != pt.y1_hat_closed(t_point(n)):
            return _result("pareto-anchor-match", False, "first component at %d" % n)
    return _result("pareto-anchor-match", True,
                   "closed forms equal quadrature at all materialized generations")


def check_positivity(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    for _ in range(200):
        t = Fraction(rng.randint(0, 2**14 - 1), 2**14)
        n = locate(t).generation
        if pt.y1_hat_closed(t) < Fraction(1, 2 ** (n + 3)):
            return _result("pareto-positivity", False, "below the generation floor at %s" % t)
    return _result("pareto-positivity", True, "first component above its generation floor")


def check_generation_bounds(settings) -> CheckResult:
    for n in range(12):
        hi = max(pt.y2_hat_closed(n), pt.y2_hat_closed(n + 1))
        if hi >= 0:
            return _result("pareto-generation-bounds", False, "bound sign at %d" % n)
    return _result("pareto-generation-bounds", True,
                   "per-generation cost bounds strictly negative")


# --- precommit --------------------------------------------------------------


def check_weight_telescoping(settings, count: int = 40) -> CheckResult:
    rng = random.Random(settings["seed"])
    for _ in range(count):
        depth = rng.randint(2, 10)
        path = pc.random_feasible_path(rng, depth)
        obj = pc.QuadraticObjective.build(depth)
        if obj.value(path.values) != obj.value_direct(path.values):
            return _result("precommit-weight-telescoping", False, "depth %d" % depth)
    return _result("precommit-weight-telescoping", True,
                   "weighted squares equal the two-term sum on %d paths" % count)


def check_path_only_dependence(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    schedule = DyadicSchedule(depth=8)
    for _ in range(10):
        alpha = random_piecewise_control(rng, max_segments=10)
        path = dyn.to_path(alpha, schedule)
        beta = dyn.path_to_control(path)
        if pc.objective_F(path, 8) != pc.objective_F(dyn.to_path(beta, schedule), 8):
            return _result("precommit-path-only", False, "objective depends on interior shape")
    return _result("precommit-path-only", True,
                   "objective agrees for controls sharing breakpoint values")


def check_sign_consistency(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    schedule = DyadicSchedule(depth=10)
    bound = pc.tail_bound(10)
    for _ in range(10):
        alpha = random_piecewise_control(rng, max_segments=8)
        value = pc.objective_F(dyn.to_path(alpha, schedule), 10)
        if abs(value + dyn.cost_J(ZERO, alpha)) > bound:
            return _result("precommit-sign-consistency", False,
                           "objective and cost disagree beyond the truncation bound")
    return _result("precommit-sign-consistency", True,
                   "objective equals minus the cost within the truncation bound")


def check_tail_bound_empirical(settings, count: int = 30) -> CheckResult:
    rng = random.Random(settings["seed"])
    for depth in (4, 8):
        for _ in range(count):
            path = pc.random_feasible_path(rng, depth + 4)
            gap = abs(pc.objective_F(path, depth + 4) - pc.objective_F(path, depth))
            if gap > pc.tail_bound(depth):
                return _result("precommit-tail-bound", False,
                               "gap %s above bound at depth %d" % (gap, depth))
    return _result("precommit-tail-bound", True,
                   "deeper truncations stay within 3*4**-N on random paths")


def check_monotone_depth(settings) -> CheckResult:
    # identical start sets across depths (only the deterministic starts are)
    prev, prev_depth = None, None
    for depth in (4, 6, 8):
        res = pc.maximize_F(depth, restarts=0, iterations=120, seed=settings["seed"],
                            starts=pc.DETERMINISTIC_STARTS)
        if prev is not None and res.best_value < prev - pc.tail_bound(prev_depth):
            return _result("precommit-monotone-depth", False,
                           "value dropped beyond the tail bound at depth %d" % depth)
        prev, prev_depth = res.best_value, depth
    return _result("precommit-monotone-depth", True,
                   "deterministic-start value non-decreasing within the tail bound")


def check_optimizer_benchmarks(settings) -> CheckResult:
    res = pc.maximize_F(6, restarts=2, iterations=60, seed=settings["seed"])
    if res.best_value < Fraction(5, 96):
        return _result("precommit-optimizer-benchmarks", False,
                       "lost the analytic benchmark at depth 6")
    if res.best_value < Fraction(1, 32):
        return _result("precommit-optimizer-benchmarks", False, "below the switching path")
    return _result("precommit-optimizer-benchmarks", True,
                   "optimizer holds the 5/96 and 1/32 benchmarks")


# --- naive ------------------------------------------------------------------


def check_naive_ratio_law(settings) -> CheckResult:
    rng = random.Random(settings["seed"])
    for horizon in (ONE, Fraction(2)):
        kernel = nv.DeviationKernel(horizon=horizon)
        naive = nv.naive_strategy(kernel)
        dom = nv.dominating_strategy(kernel)
        for _ in range(25):
            t = horizon * Fraction(rng.randint(0, 2**10 - 1), 2**10)
            j_n = nv.cost_naive_J(t, naive, kernel)
            j_d = nv.cost_naive_J(t, dom, kernel)
            if j_n != nv.naive_cost_closed(t, kernel) or j_d != nv.dominating_cost_closed(t, kernel):
                return _result("naive-ratio-law", False, "closed form broken at t=%s" % t)
            if 6 * j_d != 5 * j_n:
                return _result("naive-ratio-law", False, "ratio not 5/6 at t=%s" % t)
    return _result("naive-ratio-law", True, "both closed forms exact; ratio exactly 5/6")


def check_naive_pointwise_zero(settings) -> CheckResult:
    kernel = nv.DeviationKernel()
    for t in (ZERO, Fraction(1, 3), Fraction(7, 8), ONE):
        opt = nv.pointwise_optimal(t, kernel)
        if nv.cost_naive_J(t, opt, kernel) != 0:
            return _result("naive-pointwise-zero", False, "nonzero optimal cost at %s" % t)
    return _result("naive-pointwise-zero", True, "instant optimizers cost exactly 0")


def check_naive_numeric_agreement(settings, count: int = 20) -> CheckResult:
    rng = random.Random(settings["seed"])
    kernel = nv.DeviationKernel()
    tol = float(settings["tol"]) if settings["arithmetic"] == "float" else 1e-9
    worst = 0.0
    for _ in range(count):
        alpha = random_piecewise_control(rng, max_segments=10, bound=Fraction(3))
        alpha = ctl.PiecewiseControl(segments=alpha.segments, bound=None)
        t = Fraction(rng.randint(0, 255), 256)
        worst = max(worst, abs(float(nv.cost_naive_J(t, alpha, kernel))
                               - nv.cost_numeric(t, alpha, kernel)))
    if worst > tol:
        return _result("naive-numeric-agreement", False, "max gap %.3g" % worst)
    return _result("naive-numeric-agreement", True, "max |exact - quad| = %.3g" % worst)


ALL_CHECKS = [
    check_schedule_gap_law,
    check_schedule_kernel_agreement,
    check_concat_identity,
    check_alpha_hat_pattern,
    check_self_interaction,
    check_terminal_conditions,
    check_linearity,
    check_oracle_equivalence,
    check_path_round_trip,
    check_spike_nonnegative_closed_form,
    check_first_order_slope,
    check_identity_residual,
    check_zero_equilibrium_exact,
    check_anchor_match,
    check_positivity,
    check_generation_bounds,
    check_weight_telescoping,
    check_path_only_dependence,
    check_sign_consistency,
    check_tail_bound_empirical,
    check_monotone_depth,
    check_optimizer_benchmarks,
    check_naive_ratio_law,
    check_naive_pointwise_zero,
    check_naive_numeric_agreement,
]


def run_all(arithmetic: str = "exact", tol=ZERO, seed: int = 42) -> list[CheckResult]:
    settings = {"arithmetic": arithmetic, "tol": as_fraction(tol), "seed": seed}
    return [check(settings) for check in ALL_CHECKS]
