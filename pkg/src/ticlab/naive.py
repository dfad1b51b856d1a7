"""Absolute-deviation tracking model where the naive strategy is dominated.

The instant-t optimizer tracks the moving target 2*(s - t) on [t, T], so
the naive strategy (always play the current instant's optimal value) is
identically zero, while the fixed affine strategy T - t costs strictly
less at every time before the horizon.  The admissible set here is
unbounded, and integration of |affine| splits each piece at its root, so
every value below is an exact rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .control import PiecewiseControl, Segment, constant
from .errors import DomainError, ShapeError
from .rational import as_fraction, decimal_str, format_rational

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class DeviationKernel:
    """Affine deviation target K(t, s) = slope * (s - t)."""

    horizon: Fraction = ONE
    slope: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "horizon", as_fraction(self.horizon))
        object.__setattr__(self, "slope", as_fraction(self.slope))
        if self.horizon <= 0:
            raise DomainError("horizon must be positive")

    def target(self, t, s) -> Fraction:
        return self.slope * (as_fraction(s) - as_fraction(t))


def _abs_affine_integral(a0, a1, lo, hi) -> Fraction:
    """Exact integral of |a0 + a1*s| over [lo, hi], splitting at the root."""

    def chunk(x, y):
        prim = lambda s: a0 * s + a1 * s * s / 2
        return abs(prim(y) - prim(x))

    if a1 != 0:
        root = -a0 / a1
        if lo < root < hi:
            return chunk(lo, root) + chunk(root, hi)
    return chunk(lo, hi)


def cost_naive_J(t, control: PiecewiseControl, kernel: DeviationKernel) -> Fraction:
    """Exact integral of |control(s) - K(t, s)| over [t, horizon]."""
    t = as_fraction(t)
    T = kernel.horizon
    if not 0 <= t <= T:
        raise DomainError("time %s outside [0, %s]" % (t, T))
    if control.tail is not None:
        raise ShapeError("the deviation model takes finite controls")
    if control.horizon != T:
        raise DomainError("control horizon %s does not match %s" % (control.horizon, T))
    total = ZERO
    starts = [seg.start for seg in control.segments]
    ends = starts[1:] + [T]
    for seg, end in zip(control.segments, ends):
        lo = max(seg.start, t)
        hi = min(end, T)
        if lo >= hi:
            continue
        # integrand (c0 + slope*t) + (c1 - slope)*s
        total += _abs_affine_integral(seg.c0 + kernel.slope * t, seg.c1 - kernel.slope, lo, hi)
    return total


def pointwise_optimal(t, kernel: DeviationKernel) -> PiecewiseControl:
    """The control tracking the time-t target exactly: s -> slope * (s - t)."""
    t = as_fraction(t)
    if not 0 <= t <= kernel.horizon:
        raise DomainError("time %s outside [0, %s]" % (t, kernel.horizon))
    return PiecewiseControl(
        segments=(Segment(ZERO, -kernel.slope * t, kernel.slope),),
        horizon=kernel.horizon,
        bound=None,
    )


def naive_strategy(kernel: DeviationKernel) -> PiecewiseControl:
    """At each instant, the instant's own optimum: identically zero."""
    return constant(ZERO, horizon=kernel.horizon, bound=None)


def dominating_strategy(kernel: DeviationKernel) -> PiecewiseControl:
    """The fixed affine strategy s -> T - s."""
    return PiecewiseControl(
        segments=(Segment(ZERO, kernel.horizon, Fraction(-1)),),
        horizon=kernel.horizon,
        bound=None,
    )


def naive_cost_closed(t, kernel: DeviationKernel) -> Fraction:
    """(T - t)**2, the naive strategy's cost."""
    t = as_fraction(t)
    return (kernel.horizon - t) ** 2


def dominating_cost_closed(t, kernel: DeviationKernel) -> Fraction:
    """(5/6) * (T - t)**2, the dominating strategy's cost."""
    t = as_fraction(t)
    return Fraction(5, 6) * (kernel.horizon - t) ** 2


def inconsistency_check(t1, t2, s, kernel: DeviationKernel) -> dict:
    """Two restart times disagree on the target at any later s, so the family
    of instant optimizers is not one control: the difference is slope*(t2-t1)."""
    t1, t2, s = as_fraction(t1), as_fraction(t2), as_fraction(s)
    if not (0 <= t1 < t2 <= s <= kernel.horizon):
        raise DomainError("need 0 <= t1 < t2 <= s <= horizon")
    k1 = kernel.target(t1, s)
    k2 = kernel.target(t2, s)
    return {
        "t1": t1,
        "t2": t2,
        "s": s,
        "target_from_t1": k1,
        "target_from_t2": k2,
        "difference": k1 - k2,
        "inconsistent": k1 != k2,
    }


def comparison_rows(kernel: DeviationKernel, grid, precision: int = 12):
    """CSV rows (t, J_naive, J_dominating, ratio) with exact and decimal columns."""
    naive = naive_strategy(kernel)
    dominating = dominating_strategy(kernel)
    rows = []
    for t in grid:
        t = as_fraction(t)
        j_n = cost_naive_J(t, naive, kernel)
        j_d = cost_naive_J(t, dominating, kernel)
        ratio = j_d / j_n if j_n != 0 else None
        row = {
            "t": format_rational(t),
            "j_naive": format_rational(j_n),
            "j_dominating": format_rational(j_d),
            "ratio": None if ratio is None else format_rational(ratio),
            "t_decimal": decimal_str(t, precision),
            "j_naive_decimal": decimal_str(j_n, precision),
            "j_dominating_decimal": decimal_str(j_d, precision),
            "ratio_decimal": None if ratio is None else decimal_str(ratio, precision),
        }
        rows.append(row)
    return rows


def cost_numeric(t, control: PiecewiseControl, kernel: DeviationKernel) -> float:
    """Adaptive floating quadrature oracle for the deviation cost."""
    from scipy.integrate import quad

    t = as_fraction(t)
    T = kernel.horizon
    if not 0 <= t <= T:
        raise DomainError("time %s outside [0, %s]" % (t, T))
    slope = float(kernel.slope)
    t_f = float(t)
    total = 0.0
    starts = [seg.start for seg in control.segments]
    ends = starts[1:] + [T]
    for seg, end in zip(control.segments, ends):
        lo = max(seg.start, t)
        hi = min(end, T)
        if lo >= hi:
            continue
        c0, c1 = float(seg.c0), float(seg.c1)

        def integrand(s):
            return abs(c0 + c1 * s - slope * (s - t_f))

        a1 = float(seg.c1 - kernel.slope)
        points = None
        if a1 != 0.0:
            root = -float(seg.c0 + kernel.slope * t) / a1
            if float(lo) < root < float(hi):
                points = [root]
        val, _ = quad(integrand, float(lo), float(hi), points=points,
                      epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return total
