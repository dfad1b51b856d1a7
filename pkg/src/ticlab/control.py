"""Piecewise controls on [0, horizon] and the splice algebra.

A control is a finite ordered list of affine segments; each segment is
valid from its start time up to the next start (the last one up to the
horizon).  Coefficients are absolute in t, so cutting a segment never
changes its polynomial.  Controls that keep switching on the dyadic
schedule all the way to the horizon carry a symbolic tail marker instead
of infinitely many segments; the tail always starts at a generation
endpoint t_M and is +1 on A phases, -1 on B phases from there on.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import NamedTuple, Optional

from .errors import AdmissibilityError, DomainError, ShapeError
from .rational import as_fraction, format_rational
from .schedule import DyadicSchedule, PHASE_A, locate, next_breakpoint, t_point

ZERO = Fraction(0)
ONE = Fraction(1)

ALPHA_HAT_TAIL = "alpha_hat"


class Segment(NamedTuple):
    start: Fraction
    c0: Fraction
    c1: Fraction

    def value(self, t) -> Fraction:
        return self.c0 + self.c1 * t

    @property
    def is_zero(self) -> bool:
        return self.c0 == 0 and self.c1 == 0


def segment(start, c0, c1=ZERO) -> Segment:
    return Segment(as_fraction(start), as_fraction(c0), as_fraction(c1))


def hat_segments(lo, hi) -> list[Segment]:
    """±1 segments of the schedule-aligned switching pattern covering [lo, hi)."""
    lo = as_fraction(lo)
    hi = as_fraction(hi)
    segs = []
    u = lo
    while u < hi:
        phase = locate(u).phase
        segs.append(Segment(u, ONE if phase == PHASE_A else -ONE, ZERO))
        u = next_breakpoint(u)
    return segs


@dataclass(frozen=True)
class PiecewiseControl:
    """Immutable piecewise-affine control; all operations are pure functions.

    bound is the admissibility bound B (None means unbounded, as in the
    absolute-deviation model whose admissible set is all of R).
    """

    segments: tuple[Segment, ...]
    horizon: Fraction = ONE
    bound: Optional[Fraction] = ONE
    tail: Optional[str] = None
    tail_start: Optional[Fraction] = None

    def __post_init__(self):
        if not self.segments:
            raise ShapeError("a control needs at least one segment")
        starts = [seg.start for seg in self.segments]
        if starts[0] != 0:
            raise ShapeError("first segment must start at 0")
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ShapeError("segment starts must be strictly increasing")
        if self.tail is not None:
            if self.tail != ALPHA_HAT_TAIL:
                raise ShapeError("unknown tail kind %r" % (self.tail,))
            if self.horizon != 1:
                raise DomainError("symbolic tails require horizon 1")
            ts = self.tail_start
            if ts is None or not 0 < ts < 1 or (1 - ts).numerator != 1 or (
                (1 - ts).denominator & ((1 - ts).denominator - 1)
            ):
                raise ShapeError("tail must start at a generation endpoint 1 - 2**-M")
            if starts[-1] >= ts:
                raise ShapeError("segments must end before the tail starts")
        cover_end = self.tail_start if self.tail else self.horizon
        if starts[-1] >= cover_end:
            raise ShapeError("last segment starts at or after the coverage end")
        if self.bound is not None:
            b = self.bound
            if self.tail is not None and b < 1:
                raise AdmissibilityError("tail values ±1 exceed bound %s" % (b,))
            ends = starts[1:] + [cover_end]
            for seg, end in zip(self.segments, ends):
                for x in (seg.start, end):
                    v = seg.value(x)
                    if abs(v) > b:
                        raise AdmissibilityError(
                            "control value %s at t=%s exceeds bound %s" % (v, x, b)
                        )

    @property
    def coverage_end(self) -> Fraction:
        return self.tail_start if self.tail else self.horizon

    def max_abs_value(self) -> Fraction:
        """Largest |value| over segment endpoints (and ±1 if a tail is present)."""
        starts = [seg.start for seg in self.segments]
        ends = starts[1:] + [self.coverage_end]
        m = ONE if self.tail else ZERO
        for seg, end in zip(self.segments, ends):
            m = max(m, abs(seg.value(seg.start)), abs(seg.value(end)))
        return m

    def segment_at(self, t) -> Segment:
        starts = [seg.start for seg in self.segments]
        return self.segments[bisect_right(starts, t) - 1]

    def to_json_dict(self) -> dict:
        doc = {
            "bound": None if self.bound is None else format_rational(self.bound),
            "horizon": format_rational(self.horizon),
            "segments": [
                {
                    "start": format_rational(seg.start),
                    "c0": format_rational(seg.c0),
                    "c1": format_rational(seg.c1),
                }
                for seg in self.segments
            ],
            "tail": self.tail,
        }
        if self.tail is not None:
            doc["tail_start"] = format_rational(self.tail_start)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "PiecewiseControl":
        return cls(
            segments=tuple(
                Segment(Fraction(s["start"]), Fraction(s["c0"]), Fraction(s["c1"]))
                for s in doc["segments"]
            ),
            horizon=Fraction(doc.get("horizon", 1)),
            bound=None if doc.get("bound") is None else Fraction(doc["bound"]),
            tail=doc.get("tail"),
            tail_start=Fraction(doc["tail_start"]) if doc.get("tail") else None,
        )


def constant(value, horizon=ONE, bound=ONE) -> PiecewiseControl:
    value = as_fraction(value)
    return PiecewiseControl(
        segments=(Segment(ZERO, value, ZERO),),
        horizon=as_fraction(horizon),
        bound=None if bound is None else as_fraction(bound),
    )


def zero_control(horizon=ONE, bound=ONE) -> PiecewiseControl:
    return constant(ZERO, horizon=horizon, bound=bound)


def is_zero_control(control: PiecewiseControl) -> bool:
    return control.tail is None and all(seg.is_zero for seg in control.segments)


def evaluate(control: PiecewiseControl, t) -> Fraction:
    """Right-continuous evaluation; at the horizon the last segment's limit
    value is returned (0 for tail controls, where every indicator has ended)."""
    t = as_fraction(t)
    if not 0 <= t <= control.horizon:
        raise DomainError("time %s outside [0, %s]" % (t, control.horizon))
    if control.tail is not None and t >= control.tail_start:
        if t == 1:
            return ZERO
        return ONE if locate(t).phase == PHASE_A else -ONE
    return control.segment_at(t).value(t)


def concat(alpha: PiecewiseControl, beta: PiecewiseControl, tau) -> PiecewiseControl:
    """Splice: alpha on [0, tau), beta on [tau, horizon]."""
    tau = as_fraction(tau)
    if alpha.horizon != beta.horizon:
        raise DomainError("cannot splice controls with different horizons")
    if not 0 <= tau <= alpha.horizon:
        raise DomainError("splice time %s outside [0, %s]" % (tau, alpha.horizon))
    if alpha.bound is None or beta.bound is None:
        bound = None
    else:
        bound = max(alpha.bound, beta.bound)

    if tau == alpha.horizon:
        return replace(alpha, bound=bound)
    if tau == 0:
        return replace(beta, bound=bound)

    head = [seg for seg in alpha.segments if seg.start < tau]
    if alpha.tail is not None and tau > alpha.tail_start:
        head.extend(hat_segments(alpha.tail_start, tau))

    tail_kind = None
    tail_start = None
    if beta.tail is not None and tau >= beta.tail_start:
        # splice lands inside beta's symbolic region: materialize the pattern
        # up to the next generation endpoint and restart the tail there
        gen = locate(tau).generation
        tail_kind = ALPHA_HAT_TAIL
        tail_start = t_point(gen + 1)
        body = hat_segments(tau, tail_start)
    else:
        seg = beta.segment_at(tau)
        body = [Segment(tau, seg.c0, seg.c1)]
        body.extend(s for s in beta.segments if s.start > tau)
        tail_kind = beta.tail
        tail_start = beta.tail_start

    return PiecewiseControl(
        segments=tuple(head + body),
        horizon=alpha.horizon,
        bound=bound,
        tail=tail_kind,
        tail_start=tail_start,
    )


def alpha_hat(schedule: DyadicSchedule) -> PiecewiseControl:
    """The schedule-aligned switching control: +1 on A phases, -1 on B phases,
    with the symbolic tail taking over beyond the materialized depth."""
    end = t_point(schedule.depth)
    return PiecewiseControl(
        segments=tuple(hat_segments(ZERO, end)),
        horizon=ONE,
        bound=ONE,
        tail=ALPHA_HAT_TAIL,
        tail_start=end,
    )


def linear_combination(a, alpha: PiecewiseControl, b, beta: PiecewiseControl) -> PiecewiseControl:
    """Pointwise a*alpha + b*beta for finite controls (no symbolic tails)."""
    if alpha.tail is not None or beta.tail is not None:
        raise ShapeError("linear combinations need finite controls")
    if alpha.horizon != beta.horizon:
        raise DomainError("mismatched horizons")
    a = as_fraction(a)
    b = as_fraction(b)
    starts = sorted({seg.start for seg in alpha.segments} | {seg.start for seg in beta.segments})
    segs = []
    for u in starts:
        sa = alpha.segment_at(u)
        sb = beta.segment_at(u)
        segs.append(Segment(u, a * sa.c0 + b * sb.c0, a * sa.c1 + b * sb.c1))
    return PiecewiseControl(segments=tuple(segs), horizon=alpha.horizon, bound=None)
