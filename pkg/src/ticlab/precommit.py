"""Precommitted-value machinery on the breakpoint polytope.

The cost seen from time zero depends on the control only through the path
X(t) = integral of the control over [t, 1]: each kernel piece contributes
(c/2) * (X_end**2 - X_start**2), so the truncated objective telescopes to
a weighted sum of squared breakpoint values.  Maximizing that indefinite
quadratic over the 1-Lipschitz chain polytope yields certified lower
bounds on the achievable improvement; the optimizer never claims global
optimality.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .control import alpha_hat
from .dynamics import LipschitzPath, cost_J, path_to_control, to_path
from .errors import ConfigurationError, DomainError, ShapeError
from .rational import as_fraction
from .report import jsonable
from .schedule import DyadicSchedule, s_point, t_point

ZERO = Fraction(0)
ONE = Fraction(1)

WEIGHT_FIRST = Fraction(-1, 2)
WEIGHT_SPLIT = Fraction(-5, 2)
WEIGHT_INNER = Fraction(5, 2)
WEIGHT_LAST = Fraction(3)


def _breakpoint_times(depth: int) -> tuple[Fraction, ...]:
    times = []
    for n in range(depth):
        times.append(t_point(n))
        times.append(s_point(n))
    times.append(t_point(depth))
    return tuple(times)


@dataclass(frozen=True)
class QuadraticObjective:
    """Telescoped weights of the truncated objective on breakpoint squares."""

    depth: int
    times: tuple[Fraction, ...]
    weights: tuple[Fraction, ...]

    @classmethod
    def build(cls, depth: int) -> "QuadraticObjective":
        if depth < 1:
            raise DomainError("objective depth must be >= 1")
        times = _breakpoint_times(depth)
        weights = [WEIGHT_FIRST]
        for n in range(depth):
            weights.append(WEIGHT_SPLIT)
            weights.append(WEIGHT_LAST if n == depth - 1 else WEIGHT_INNER)
        return cls(depth=depth, times=times, weights=tuple(weights))

    def value(self, values: Sequence[Fraction]) -> Fraction:
        if len(values) < len(self.weights):
            raise ShapeError("need %d breakpoint values, got %d"
                             % (len(self.weights), len(values)))
        return sum(w * x * x for w, x in zip(self.weights, values))

    def value_direct(self, values: Sequence[Fraction]) -> Fraction:
        """Un-telescoped two-term-per-generation form, for cross-checking."""
        if len(values) < len(self.weights):
            raise ShapeError("missing breakpoint values")
        total = ZERO
        for n in range(self.depth):
            x_t, x_s, x_next = values[2 * n], values[2 * n + 1], values[2 * n + 2]
            total += Fraction(1, 2) * (x_s**2 - x_t**2) + Fraction(6, 2) * (x_next**2 - x_s**2)
        return total


def _path_values(path_or_values, count: int) -> list[Fraction]:
    if isinstance(path_or_values, LipschitzPath):
        values = list(path_or_values.values)
    else:
        values = [as_fraction(v) for v in path_or_values]
    if len(values) < count:
        raise ShapeError("path carries %d breakpoint values, need %d" % (len(values), count))
    return values


def objective_F(path, depth: int) -> Fraction:
    """Exact truncated objective of a path (values at t_0, s_0, ..., t_depth)."""
    obj = QuadraticObjective.build(depth)
    return obj.value(_path_values(path, len(obj.weights)))


def tail_bound(depth: int) -> Fraction:
    """Bound on the objective mass beyond t_depth: 3 * 4**-depth.

    The kernel is at most 6 and the integrand beyond t_depth is at most the
    remaining horizon distance, whose integral is 4**-depth / 2.
    """
    if depth < 0:
        raise DomainError("depth must be >= 0")
    return 3 * Fraction(1, 4**depth)


def analytic_candidate(depth: int) -> LipschitzPath:
    """Zero at generation splits, 2**-(m+2) at generation starts (m >= 1)."""
    times = _breakpoint_times(depth)
    values = [ZERO, ZERO]
    for m in range(1, depth):
        values.append(Fraction(1, 2 ** (m + 2)))
        values.append(ZERO)
    values.append(Fraction(1, 2 ** (depth + 2)))
    return LipschitzPath(times=times, values=tuple(values))


def analytic_candidate_boundary(depth: int) -> LipschitzPath:
    """The analytic candidate with the last two values pushed to the
    truncation boundary: the missing later penalties make the terminal
    vertex X(t_N) = 1 - t_N strictly profitable for the truncated objective."""
    base = analytic_candidate(depth)
    values = list(base.values)
    g = Fraction(1, 2 ** (depth + 2))
    values[-2] = 3 * g
    values[-1] = 4 * g  # equals 1 - t_depth
    return LipschitzPath(times=base.times, values=tuple(values))


def alpha_hat_path(depth: int) -> LipschitzPath:
    """Breakpoint path of the switching control (a feasible benchmark)."""
    schedule = DyadicSchedule(depth=depth)
    return to_path(alpha_hat(schedule), schedule)


def random_feasible_path(rng: random.Random, depth: int, denominator: int = 16) -> LipschitzPath:
    """Random dyadic-valued feasible path: random slopes in [-1, 1], then a
    forward clamp into the horizon-reachable band keeps the terminal box."""
    times = _breakpoint_times(depth)
    values = [Fraction(rng.randint(-denominator, denominator), denominator)]
    values[0] = min(max(values[0], -ONE), ONE)
    for u0, u1 in zip(times, times[1:]):
        step = Fraction(rng.randint(-denominator, denominator), denominator) * (u1 - u0)
        x = values[-1] + step
        x = min(max(x, values[-1] - (u1 - u0)), values[-1] + (u1 - u0))
        reach = ONE - u1
        x = min(max(x, -reach), reach)
        values.append(x)
    return LipschitzPath(times=times, values=tuple(values))


@dataclass(frozen=True)
class OptimizationResult:
    best_path: LipschitzPath
    best_value: Fraction
    truncation_bound: Fraction
    value_interval: tuple[Fraction, Optional[Fraction]]
    start_values: dict = field(default_factory=dict)
    depth: int = 0

    def to_json_dict(self) -> dict:
        return {
            "N": self.depth,
            "best_value": jsonable(self.best_value),
            "truncation_bound": jsonable(self.truncation_bound),
            "value_interval": [
                jsonable(self.value_interval[0]),
                jsonable(self.value_interval[1]),
            ],
            "path": self.best_path.to_json_list(),
            "start_values": jsonable(self.start_values),
        }


def _feasible_interval(values, times, k, terminal_box):
    lo, hi = -ONE, ONE
    if k > 0:
        gap = times[k] - times[k - 1]
        lo = max(lo, values[k - 1] - gap)
        hi = min(hi, values[k - 1] + gap)
    if k + 1 < len(values):
        gap = times[k + 1] - times[k]
        lo = max(lo, values[k + 1] - gap)
        hi = min(hi, values[k + 1] + gap)
    else:
        lo = max(lo, -terminal_box)
        hi = min(hi, terminal_box)
    return lo, hi


def _ascend(values, times, weights, terminal_box, iterations):
    """Projected coordinate ascent; every update is the exact argmax of the
    separable quadratic on the coordinate's feasible interval, so the value
    never decreases.  Ties keep the current value (determinism)."""
    for _ in range(iterations):
        changed = False
        for k, w in enumerate(weights):
            if w == 0:
                continue
            lo, hi = _feasible_interval(values, times, k, terminal_box)
            x = values[k]
            if w > 0:
                cand = hi if abs(hi) >= abs(lo) else lo
                if abs(cand) > abs(x):
                    values[k] = cand
                    changed = True
            else:
                cand = min(max(ZERO, lo), hi)
                if abs(cand) < abs(x):
                    values[k] = cand
                    changed = True
        if not changed:
            break
    return values


DETERMINISTIC_STARTS = ("zero", "analytic", "analytic_boundary", "alpha_hat")


def maximize_F(depth: int, restarts: int = 8, iterations: int = 200, seed: int = 42,
               starts: Optional[Sequence[str]] = None) -> OptimizationResult:
    """Multi-start projected coordinate ascent on the truncated objective.

    Deterministic given the seed.  The reported value is a lower bound on
    the supremum of the truncated objective (and, minus the truncation
    bound, on the supremum of the full one); no optimality certificate.
    """
    if depth < 2:
        raise DomainError("optimization depth must be >= 2")
    if restarts < 0 or iterations < 0:
        raise ConfigurationError("restarts and iterations must be >= 0")
    obj = QuadraticObjective.build(depth)
    times = obj.times
    terminal_box = ONE - times[-1]

    chosen = tuple(starts) if starts is not None else DETERMINISTIC_STARTS
    start_paths: list[tuple[str, LipschitzPath]] = []
    makers = {
        "zero": lambda: LipschitzPath(times=times, values=(ZERO,) * len(times)),
        "analytic": lambda: analytic_candidate(depth),
        "analytic_boundary": lambda: analytic_candidate_boundary(depth),
        "alpha_hat": lambda: alpha_hat_path(depth),
    }
    for name in chosen:
        if name == "random":
            continue
        if name not in makers:
            raise ConfigurationError(
                "unknown start %r (have %s)" % (name, sorted(makers) + ["random"]))
        start_paths.append((name, makers[name]()))
    rng = random.Random(seed)
    if starts is None or "random" in chosen:
        for i in range(restarts):
            start_paths.append(("random:%d" % i, random_feasible_path(rng, depth)))
    if not start_paths:
        raise ConfigurationError("no starts selected")

    best_values = None
    best_value = None
    start_values = {}
    for name, path in start_paths:
        values = _ascend(list(path.values), times, obj.weights, terminal_box, iterations)
        value = obj.value(values)
        start_values[name] = value
        if best_value is None or value > best_value or (
            value == best_value and tuple(values) < tuple(best_values)
        ):
            best_values, best_value = values, value

    path = LipschitzPath(times=times, values=tuple(best_values))
    bound = tail_bound(depth)
    return OptimizationResult(
        best_path=path,
        best_value=best_value,
        truncation_bound=bound,
        value_interval=(best_value - bound, None),
        start_values=start_values,
        depth=depth,
    )


@dataclass
class InconsistencyWitness:
    """The fact chain showing no single control is optimal at every time."""

    depth: int
    equilibrium_value: Fraction
    dominating_value: Fraction
    best_value: Fraction
    precommit_value_bound: Fraction  # upper bound on the time-0 value
    chain: list
    spike_witness: dict | None
    alpha_hat_rate_at_zero: Fraction
    complete: bool

    def to_json_dict(self) -> dict:
        return {
            "N": self.depth,
            "equilibrium_value": jsonable(self.equilibrium_value),
            "dominating_value": jsonable(self.dominating_value),
            "best_value": jsonable(self.best_value),
            "precommit_value_bound": jsonable(self.precommit_value_bound),
            "chain": [{"fact": name, "holds": bool(ok)} for name, ok in self.chain],
            "spike_witness": jsonable(self.spike_witness) if self.spike_witness else None,
            "alpha_hat_rate_at_zero": jsonable(self.alpha_hat_rate_at_zero),
            "complete": self.complete,
        }


def inconsistency_witness(depth: int, restarts: int = 8, iterations: int = 200,
                          seed: int = 42, schedule: Optional[DyadicSchedule] = None,
                          optimum: Optional[OptimizationResult] = None) -> InconsistencyWitness:
    """Assemble the witness chain: the equilibrium value, the dominating
    control's strictly better value, the precommitted bound below both, and
    a spike-test failure of the optimizer's control at a positive time."""
    from .control import constant, zero_control
    from .equilibrium import first_order_coeff, spike_rate

    if depth < 4:
        raise DomainError("witness depth must be >= 4")
    if schedule is None:
        schedule = DyadicSchedule()
    hat = alpha_hat(schedule)
    zero = zero_control()

    equilibrium_value = cost_J(ZERO, zero)
    dominating_value = cost_J(ZERO, hat)
    if optimum is None:
        optimum = maximize_F(depth, restarts=restarts, iterations=iterations, seed=seed)
    best = optimum.best_value
    value_bound = -best

    # spike failure of the optimizer's control at some t > 0
    best_control = path_to_control(optimum.best_path)
    perturbations = [("const:-1", constant(-1)), ("const:1", constant(1))]
    spike = None
    candidates = []
    for lo, hi in zip(optimum.best_path.times, optimum.best_path.times[1:]):
        candidates.append((lo + hi) / 2)
        candidates.append(hi)
    for t in candidates:
        if t <= 0 or t >= 1:
            continue
        for name, pert in perturbations:
            coeff = first_order_coeff(t, pert, best_control)
            if coeff < 0:
                rate = spike_rate(t, pert, best_control)
                if rate < 0:
                    spike = {"t": t, "perturbation_id": name,
                             "first_order_coeff": coeff, "rate": rate}
                    break
        if spike:
            break

    hat_rate = spike_rate(ZERO, constant(-1), hat)

    chain = [
        ("equilibrium value is 0", equilibrium_value == 0),
        ("dominating control beats it at time 0", dominating_value < equilibrium_value),
        ("dominating value is -1/32", dominating_value == Fraction(-1, 32)),
        ("optimizer bound reaches 5/96", best >= Fraction(5, 96)),
        ("precommitted value below the dominating value", value_bound < dominating_value),
        ("optimizer control fails the spike test at some t > 0", spike is not None),
        ("switching control fails the spike test at 0", hat_rate < 0),
    ]
    return InconsistencyWitness(
        depth=depth,
        equilibrium_value=equilibrium_value,
        dominating_value=dominating_value,
        best_value=best,
        precommit_value_bound=value_bound,
        chain=chain,
        spike_witness=spike,
        alpha_hat_rate_at_zero=hat_rate,
        complete=all(ok for _, ok in chain),
    )
