"""Spike-variation testing of candidate strategies.

A candidate passes at time t if no instantaneous replacement of the
control on [t, t+delta) improves the cost to first order as delta drops
to 0.  The liminf is estimated on a geometric delta sequence capped at
the distance to the next schedule breakpoint, so every probe stays inside
one kernel piece, where the cost difference is first-order plus an exact
quadratic remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .control import PiecewiseControl, concat, evaluate
from .dynamics import cost_J, self_energy, y1
from .errors import ConfigurationError, DomainError
from .rational import as_fraction
from .report import VerificationReport
from .schedule import kernel_value, next_breakpoint

ZERO = Fraction(0)

DEFAULT_SPIKE_LEVELS = 20


@dataclass(frozen=True)
class SpikeProbe:
    """Finite-delta rates of one spike variation at one time."""

    t: Fraction
    perturbation: PiecewiseControl
    delta_sequence: tuple[Fraction, ...]
    rates: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.delta_sequence) != len(self.rates):
            raise ConfigurationError("delta sequence and rates must align")
        for d in self.delta_sequence:
            if d <= 0 or self.t + d > 1:
                raise DomainError("delta %s leaves [0, 1] from t=%s" % (d, self.t))

    @property
    def rate_estimate(self) -> Fraction:
        return min(self.rates)


def perturbed_cost(t, delta, alpha: PiecewiseControl, alpha_star: PiecewiseControl) -> Fraction:
    """Cost at t of the splice (alpha up to t+delta, then alpha_star)."""
    t = as_fraction(t)
    delta = as_fraction(delta)
    if not 0 <= t < t + delta <= 1:
        raise DomainError("need 0 <= t < t+delta <= 1, got t=%s delta=%s" % (t, delta))
    return cost_J(t, concat(alpha, alpha_star, t + delta))


class _SpliceCostEvaluator:
    """Shares work across many probes against one candidate.

    While [t, t+delta] stays inside a single kernel piece, the spliced cost
    is the candidate's backward pair at t+delta plus per-piece increments
    c * A * (Y1_right + A/2), the same algebra the exact sweep uses; the
    candidate's pair is cached at the (few) distinct next-breakpoints.
    Anything outside that regime falls back to the generic splice.
    """

    def __init__(self, candidate: PiecewiseControl):
        self.candidate = candidate
        self._anchors: dict[Fraction, tuple[Fraction, Fraction]] = {}

    def _pair_at(self, point):
        got = self._anchors.get(point)
        if got is None:
            got = (y1(self.candidate, point), cost_J(point, self.candidate))
            self._anchors[point] = got
        return got

    def cost(self, t, delta, perturbation: PiecewiseControl) -> Fraction:
        from .dynamics import _poly_integral, _segment_pieces

        u = t + delta
        boundary = next_breakpoint(t)
        cand = self.candidate
        if u > boundary or (perturbation.tail is not None and u > perturbation.tail_start):
            return perturbed_cost(t, delta, perturbation, cand)
        c = kernel_value(t)
        y1_u, y2_u = self._pair_at(boundary)
        if u < boundary:
            if cand.tail is not None and u >= cand.tail_start:
                from .control import hat_segments

                seg = hat_segments(u, boundary)[0]
                pieces = [(u, boundary, (seg.c0, seg.c1))]
            else:
                pieces = _segment_pieces(list(cand.segments), u, boundary, cand.coverage_end)
            for lo, hi, poly in reversed(pieces):
                inc = _poly_integral(poly, lo, hi)
                y2_u += c * inc * (y1_u + inc / 2)
                y1_u += inc
        total = y2_u
        y1_right = y1_u
        head = _segment_pieces(list(perturbation.segments), t, u, perturbation.coverage_end)
        for lo, hi, poly in reversed(head):
            inc = _poly_integral(poly, lo, hi)
            total += c * inc * (y1_right + inc / 2)
            y1_right += inc
        return total


def spike_probe(t, alpha: PiecewiseControl, alpha_star: PiecewiseControl,
                levels: int = DEFAULT_SPIKE_LEVELS,
                base_cost: Optional[Fraction] = None,
                evaluator: Optional[_SpliceCostEvaluator] = None) -> SpikeProbe:
    """Rates (J(t, splice) - J(t, candidate)) / delta on the capped geometric
    sequence delta_k = min(next breakpoint distance, 2**-k), k = levels/2..levels."""
    t = as_fraction(t)
    if levels < 4:
        raise ConfigurationError("need at least 4 spike levels")
    if not 0 <= t < 1:
        raise DomainError("spike time %s outside [0, 1)" % (t,))
    cap = next_breakpoint(t) - t
    if base_cost is None:
        base_cost = cost_J(t, alpha_star)
    if evaluator is None:
        evaluator = _SpliceCostEvaluator(alpha_star)
    deltas = []
    rates = []
    for k in range(levels // 2, levels + 1):
        delta = min(cap, Fraction(1, 2**k))
        deltas.append(delta)
        rates.append((evaluator.cost(t, delta, alpha) - base_cost) / delta)
    return SpikeProbe(t=t, perturbation=alpha, delta_sequence=tuple(deltas), rates=tuple(rates))


def spike_rate(t, alpha: PiecewiseControl, alpha_star: PiecewiseControl,
               levels: int = DEFAULT_SPIKE_LEVELS) -> Fraction:
    """Conservative liminf estimate: the minimum rate over the probe."""
    return spike_probe(t, alpha, alpha_star, levels).rate_estimate


def first_order_coeff(t, alpha: PiecewiseControl, alpha_star: PiecewiseControl) -> Fraction:
    """Analytic delta->0 rate: c(t) * Y1_candidate(t) * (alpha(t) - candidate(t))."""
    t = as_fraction(t)
    if not 0 <= t < 1:
        raise DomainError("time %s outside [0, 1)" % (t,))
    return kernel_value(t) * y1(alpha_star, t) * (evaluate(alpha, t) - evaluate(alpha_star, t))


def default_perturbations(bound=Fraction(1)) -> list[tuple[str, PiecewiseControl]]:
    from .control import constant

    b = as_fraction(bound)
    return [("const:1", constant(b, bound=b)), ("const:-1", constant(-b, bound=b))]


def _named(perturbations) -> list[tuple[str, PiecewiseControl]]:
    named = []
    for i, p in enumerate(perturbations):
        if isinstance(p, tuple):
            named.append(p)
        else:
            named.append(("pert:%d" % i, p))
    return named


def verify_equilibrium(candidate: PiecewiseControl, t_grid: Sequence,
                       perturbations=None, levels: int = DEFAULT_SPIKE_LEVELS,
                       tol=ZERO) -> VerificationReport:
    """PASS if every spike rate estimate is >= -tol over the grid and family.

    The verdict certifies only the supplied perturbation family; the two
    constants ±1 are the default refutation family, which suffices for this
    model's uniqueness argument.
    """
    grid = [as_fraction(t) for t in t_grid]
    if not grid:
        raise ConfigurationError("empty verification grid")
    if any(not 0 <= t < 1 for t in grid):
        raise DomainError("grid times must lie in [0, 1)")
    tol = as_fraction(tol)
    family = _named(default_perturbations() if perturbations is None else perturbations)

    witnesses = []
    min_rate = None
    min_at = None
    evaluator = _SpliceCostEvaluator(candidate)
    for t in grid:
        base = cost_J(t, candidate)
        for name, pert in family:
            rate = spike_probe(t, pert, candidate, levels, base_cost=base,
                               evaluator=evaluator).rate_estimate
            if min_rate is None or rate < min_rate:
                min_rate, min_at = rate, (t, name)
            if rate < -tol:
                witnesses.append({"t": t, "perturbation_id": name, "rate": rate})
    witnesses.sort(key=lambda w: w["rate"])
    return VerificationReport(
        verdict="FAIL" if witnesses else "PASS",
        witnesses=witnesses,
        settings={
            "grid_size": len(grid),
            "levels": levels,
            "tol": tol,
            "perturbations": [name for name, _ in family],
        },
        provenance={
            "min_rate": min_rate,
            "min_rate_t": min_at[0],
            "min_rate_perturbation": min_at[1],
        },
    )


@dataclass
class NecessaryConditionReport:
    """Sign-alignment violations plus the exact self-interaction residual."""

    sign_violations: list
    identity_residual: Fraction

    @property
    def clean(self) -> bool:
        return not self.sign_violations and self.identity_residual == 0

    def to_json_dict(self) -> dict:
        from .report import jsonable

        return {
            "sign_violations": jsonable(self.sign_violations),
            "identity_residual": jsonable(self.identity_residual),
            "clean": self.clean,
        }


def necessary_condition_check(candidate: PiecewiseControl, grid: Sequence) -> NecessaryConditionReport:
    """Check the pointwise sign condition and the exact integral identity.

    At any t where Y1 of the candidate is nonzero, an equilibrium must sit
    at the opposite bound; and the self integral of a*Y1 over [0,1] always
    equals half the squared total integral, so the residual must vanish.
    """
    violations = []
    for t in grid:
        t = as_fraction(t)
        v = y1(candidate, t)
        if v == 0:
            continue
        expected = Fraction(-1) if v > 0 else Fraction(1)
        actual = evaluate(candidate, t)
        if actual != expected:
            violations.append({"t": t, "y1": v, "value": actual})
    total = y1(candidate, ZERO)
    residual = self_energy(candidate, ZERO) - total * total / 2
    return NecessaryConditionReport(sign_violations=violations, identity_residual=residual)
