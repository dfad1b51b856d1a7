"""Dyadic breakpoint schedule and the two-valued kernel of the first model.

Generation n occupies [t_n, t_{n+1}) with t_n = 1 - 2**-n and splits at
s_n = (t_n + 3*t_{n+1})/4 into an A part [t_n, s_n), kernel value 1, and a
B part [s_n, t_{n+1}), kernel value 6.  The breakpoints accumulate at the
horizon 1, which is never materialized; everything here is exact rational
arithmetic on dyadic numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import DomainError
from .rational import as_fraction, format_rational

ONE = Fraction(1)

PHASE_A = "A"
PHASE_B = "B"

KERNEL_A = Fraction(1)
KERNEL_B = Fraction(6)

DEFAULT_DEPTH = 24


def t_point(n: int) -> Fraction:
    """Left endpoint of generation n: 1 - 2**-n."""
    if n < 0:
        raise DomainError("generation index must be >= 0, got %r" % (n,))
    return ONE - Fraction(1, 2**n)


def s_point(n: int) -> Fraction:
    """Interior split of generation n: (t_n + 3*t_{n+1})/4."""
    return (t_point(n) + 3 * t_point(n + 1)) / 4


class Location(NamedTuple):
    generation: int
    phase: str


def locate(t) -> Location:
    """Generation and phase of a time in [0, 1).

    The generation is the unique n with t_n <= t < t_{n+1}; exact because
    1 - t has a power-of-two bracket read off integer bit lengths.
    """
    t = as_fraction(t)
    if not 0 <= t < 1:
        raise DomainError("time %s outside [0, 1)" % (t,))
    r = 1 - t
    n = (r.denominator // r.numerator).bit_length() - 1
    return Location(n, PHASE_A if t < s_point(n) else PHASE_B)


def kernel_value(t) -> Fraction:
    """Kernel value at t: 1 on A phases, 6 on B phases (right-continuous)."""
    return KERNEL_A if locate(t).phase == PHASE_A else KERNEL_B


def next_breakpoint(t) -> Fraction:
    """Smallest schedule breakpoint strictly greater than t (t in [0, 1))."""
    n, phase = locate(t)
    return s_point(n) if phase == PHASE_A else t_point(n + 1)


def breakpoints_between(lo, hi) -> list[Fraction]:
    """Schedule breakpoints u with lo < u < hi, increasing.  Requires hi < 1
    or hi exactly on a breakpoint; the sequence accumulates at 1."""
    lo = as_fraction(lo)
    hi = as_fraction(hi)
    if not 0 <= lo <= hi <= 1:
        raise DomainError("bad interval [%s, %s]" % (lo, hi))
    out = []
    u = lo
    while u < hi:
        u = next_breakpoint(u)
        if u < hi:
            out.append(u)
    return out


def dyadic_grid(depth: int, horizon=ONE) -> tuple[Fraction, ...]:
    """The grid {j * horizon / 2**depth : 0 <= j < 2**depth}."""
    if depth < 0:
        raise DomainError("grid depth must be >= 0")
    horizon = as_fraction(horizon)
    step = horizon / 2**depth
    return tuple(j * step for j in range(2**depth))


@dataclass(frozen=True)
class DyadicSchedule:
    """Materialized breakpoints t_0, s_0, t_1, ..., t_depth.

    Immutable after construction; safe to share across threads.  locate and
    kernel evaluation work for any t in [0, 1) regardless of depth (they use
    the closed forms), depth only bounds the materialized list.
    """

    depth: int = DEFAULT_DEPTH
    horizon: Fraction = ONE

    def __post_init__(self):
        if self.depth < 1:
            raise DomainError("schedule depth must be >= 1, got %r" % (self.depth,))
        if as_fraction(self.horizon) != 1:
            raise DomainError("the schedule horizon is fixed at 1")
        pts = []
        for n in range(self.depth):
            pts.append(t_point(n))
            pts.append(s_point(n))
        pts.append(t_point(self.depth))
        object.__setattr__(self, "breakpoints", tuple(pts))

    breakpoints: tuple = ()

    def t(self, n: int) -> Fraction:
        return t_point(n)

    def s(self, n: int) -> Fraction:
        return s_point(n)

    def locate(self, t) -> Location:
        return locate(t)

    def kernel_value(self, t) -> Fraction:
        return kernel_value(t)

    def to_json_dict(self) -> dict:
        return {
            "horizon": format_rational(self.horizon),
            "depth": self.depth,
            "breakpoints": [format_rational(u) for u in self.breakpoints],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DyadicSchedule":
        sched = cls(depth=doc["depth"], horizon=Fraction(doc["horizon"]))
        stored = tuple(Fraction(u) for u in doc["breakpoints"])
        if stored != sched.breakpoints:
            raise DomainError("breakpoints in document do not match the dyadic law")
        return sched


@dataclass(frozen=True)
class KernelC:
    """The two-valued kernel attached to a schedule (1 on A, 6 on B)."""

    schedule: DyadicSchedule

    range = frozenset({KERNEL_A, KERNEL_B})

    def value(self, t) -> Fraction:
        return kernel_value(t)
