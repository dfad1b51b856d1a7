"""Exact evaluation of the backward pair driven by a piecewise control.

The backward pair for a control a on [0, 1] is

    Y1(t) = integral of a over [t, 1]
    Y2(t) = integral of c * a * Y1 over [t, 1]

with c the two-valued schedule kernel.  Everything is exact rational
arithmetic; the only floating point lives in the numeric cross-check
oracle at the bottom of the module.

Two facts keep the evaluation finite and exact:

* On a piece [a, b] where the control is one polynomial and Y1 on the
  right is known, the Y2 contribution is c * A * (Y1_right + A/2) with
  A the integral of the control over the piece (differentiate -(Y1)^2/2).

* Near the horizon the kernel generations are self-similar under
  s -> 1 - (1-s)/2, which scales the moment integral of c(s)*(1-s)**j by
  2**-(j+1).  Tail integrals are therefore geometric series with exact
  rational sums, so a final affine segment extending to the horizon, and
  the symbolic switching tail, both reduce to closed-form anchors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .control import PiecewiseControl, Segment, hat_segments
from .errors import AdmissibilityError, DomainError, ShapeError
from .rational import as_fraction, decimal_str, format_rational
from .schedule import (
    DyadicSchedule,
    breakpoints_between,
    kernel_value,
    locate,
    t_point,
)

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# closed-form anchors for the symbolic switching tail


def tail_y1_anchor(generation: int) -> Fraction:
    """Y1 of the switching tail at t_M: 2**-(M+1)."""
    return Fraction(1, 2 ** (generation + 1))


def tail_y2_anchor(generation: int) -> Fraction:
    """Y2 of the switching tail at t_M: -2**-(2M+5)."""
    return -Fraction(1, 2 ** (2 * generation + 5))


def tail_self_anchor(generation: int) -> Fraction:
    """Unit-kernel self integral of the switching tail at t_M: Y1**2 / 2."""
    return Fraction(1, 2 ** (2 * generation + 3))


# ---------------------------------------------------------------------------
# kernel tail moments


def _moment_gen0(j: int) -> Fraction:
    # integral of c(s) * (1-s)**j over the first generation [0, 1/2)
    s0, t1 = Fraction(3, 8), Fraction(1, 2)

    def block(c, lo, hi):
        return c * ((1 - lo) ** (j + 1) - (1 - hi) ** (j + 1)) / Fraction(j + 1)

    return block(1, ZERO, s0) + block(6, s0, t1)


_MOMENTS0 = {j: _moment_gen0(j) for j in range(4)}


def kernel_moment_tail(generation: int, j: int) -> Fraction:
    """Exact integral of c(s) * (1-s)**j over [t_generation, 1)."""
    r = Fraction(1, 2 ** (j + 1))
    return _MOMENTS0[j] * r**generation / (1 - r)


def _final_tail_y2(poly: tuple[Fraction, Fraction], u: Fraction) -> Fraction:
    """Integral of c * p * Y1p over [u, 1] for an affine p valid up to 1.

    Writing w = 1 - s, p = a + b*w and Y1p(s) = a*w + b*w**2/2, the
    integrand is a**2*w + (3/2)*a*b*w**2 + (b**2/2)*w**3; the stretch up to
    the next generation endpoint is finite and the rest is a moment sum.
    """
    c0, c1 = poly
    if c0 == 0 and c1 == 0:
        return ZERO
    if u == 1:
        return ZERO
    a = c0 + c1
    b = -c1
    coef = {1: a * a, 2: Fraction(3, 2) * a * b, 3: b * b / 2}
    gen = locate(u).generation
    end = t_point(gen + 1)
    total = ZERO
    cuts = [u] + breakpoints_between(u, end) + [end]
    for lo, hi in zip(cuts, cuts[1:]):
        c = kernel_value(lo)
        for j, k in coef.items():
            total += c * k * ((1 - lo) ** (j + 1) - (1 - hi) ** (j + 1)) / (j + 1)
    for j, k in coef.items():
        total += k * kernel_moment_tail(gen + 1, j)
    return total


# ---------------------------------------------------------------------------
# piece coverage


@dataclass(frozen=True)
class _Anchor:
    end: Fraction
    y1: Fraction
    y2: Fraction
    self_energy: Fraction


def _poly_integral(poly, lo, hi) -> Fraction:
    c0, c1 = poly
    return c0 * (hi - lo) + c1 * (hi * hi - lo * lo) / 2


def _coverage(control: PiecewiseControl, t: Fraction):
    """Pieces of the control on [t, anchor.end) plus exact anchors at the end.

    For a finite control the anchor sits at the start of the final segment
    (closed forms absorb [v, 1]); for a tail control it sits at the tail
    start, deepened by one generation when t already lies inside the tail.
    """
    if control.horizon != 1:
        raise DomainError("backward-pair dynamics run on horizon 1")
    if control.tail is not None:
        ts = control.tail_start
        if t >= ts:
            gen = locate(t).generation + 1
            anchor = _Anchor(t_point(gen), tail_y1_anchor(gen), tail_y2_anchor(gen),
                             tail_self_anchor(gen))
            pieces = _segment_pieces(hat_segments(t, anchor.end), t, anchor.end, anchor.end)
            return pieces, anchor
        gen = locate(ts).generation
        anchor = _Anchor(ts, tail_y1_anchor(gen), tail_y2_anchor(gen), tail_self_anchor(gen))
    else:
        last = control.segments[-1]
        poly = (last.c0, last.c1)
        v = last.start
        if t >= v:
            y1 = _poly_integral(poly, t, ONE)
            anchor = _Anchor(t, y1, _final_tail_y2(poly, t), y1 * y1 / 2)
            return [], anchor
        y1 = _poly_integral(poly, v, ONE)
        anchor = _Anchor(v, y1, _final_tail_y2(poly, v), y1 * y1 / 2)
    pieces = _segment_pieces(list(control.segments), t, anchor.end, control.coverage_end)
    return pieces, anchor


def _segment_pieces(segments, lo, hi, cover_end):
    """(start, end, (c0, c1)) pieces covering [lo, hi) from absolute segments."""
    pieces = []
    for i, seg in enumerate(segments):
        seg_end = segments[i + 1].start if i + 1 < len(segments) else cover_end
        a = max(seg.start, lo)
        b = min(seg_end, hi)
        if a < b:
            pieces.append((a, b, (seg.c0, seg.c1)))
    return pieces


# ---------------------------------------------------------------------------
# the three exact integrals


def y1(control: PiecewiseControl, t) -> Fraction:
    """Integral of the control over [t, 1], exact."""
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise DomainError("time %s outside [0, 1]" % (t,))
    if t == 1:
        return ZERO
    pieces, anchor = _coverage(control, t)
    total = anchor.y1
    for lo, hi, poly in pieces:
        total += _poly_integral(poly, lo, hi)
    return total


def y2(control: PiecewiseControl, t) -> Fraction:
    """Integral of c * control * Y1 over [t, 1], exact."""
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise DomainError("time %s outside [0, 1]" % (t,))
    if t == 1:
        return ZERO
    pieces, anchor = _coverage(control, t)
    y1_right = anchor.y1
    total = anchor.y2
    for lo, hi, poly in reversed(pieces):
        if poly[0] == 0 and poly[1] == 0:
            continue  # no mass and Y1 unchanged: skip the kernel split
        cuts = [lo] + breakpoints_between(lo, hi) + [hi]
        for a, b in zip(reversed(cuts[:-1]), reversed(cuts[1:])):
            c = kernel_value(a)
            inc = _poly_integral(poly, a, b)
            total += c * inc * (y1_right + inc / 2)
            y1_right += inc
    return total


def cost_J(t, control: PiecewiseControl) -> Fraction:
    """Dynamic cost seen from time t (alias of y2 with report-friendly order)."""
    return y2(control, t)


def self_energy(control: PiecewiseControl, t=ZERO) -> Fraction:
    """Unit-kernel self integral of the control over [t, 1]: integral of a*Y1."""
    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise DomainError("time %s outside [0, 1]" % (t,))
    if t == 1:
        return ZERO
    pieces, anchor = _coverage(control, t)
    y1_right = anchor.y1
    total = anchor.self_energy
    for lo, hi, poly in reversed(pieces):
        inc = _poly_integral(poly, lo, hi)
        total += inc * (y1_right + inc / 2)
        y1_right += inc
    return total


# ---------------------------------------------------------------------------
# Lipschitz paths


@dataclass(frozen=True)
class LipschitzPath:
    """Breakpoint values of a 1-Lipschitz path vanishing at the horizon."""

    times: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.times) != len(self.values) or not self.times:
            raise ShapeError("times and values must be matching nonempty tuples")
        for (u0, x0), (u1, x1) in zip(
            zip(self.times, self.values), zip(self.times[1:], self.values[1:])
        ):
            if u1 <= u0:
                raise ShapeError("path times must be strictly increasing")
            if abs(x1 - x0) > u1 - u0:
                raise AdmissibilityError(
                    "path step |%s - %s| exceeds %s" % (x1, x0, u1 - u0)
                )
        u_last, x_last = self.times[-1], self.values[-1]
        if u_last > 1:
            raise DomainError("path times must stay within [0, 1]")
        if abs(x_last) > 1 - u_last:
            raise AdmissibilityError(
                "terminal value %s not reachable from 0 at the horizon" % (x_last,)
            )

    def at(self, u) -> Fraction:
        u = as_fraction(u)
        idx = self.times.index(u)
        return self.values[idx]

    def to_json_list(self) -> list:
        return [
            {"u": format_rational(u), "x": format_rational(x)}
            for u, x in zip(self.times, self.values)
        ]


def to_path(control: PiecewiseControl, schedule: DyadicSchedule) -> LipschitzPath:
    """Breakpoint values of X(u) = Y1(u); requires |control| <= 1."""
    if control.max_abs_value() > 1:
        raise AdmissibilityError("path transform needs |control| <= 1")
    times = schedule.breakpoints
    values = tuple(y1(control, u) for u in times)
    return LipschitzPath(times=times, values=values)


def path_to_control(path: LipschitzPath) -> PiecewiseControl:
    """Piecewise-constant control whose Y1 interpolates the path exactly.

    Between breakpoints the slope is fixed by the two values; beyond the
    last breakpoint a single constant walks the path to 0 at the horizon.
    """
    if path.times[0] != 0:
        raise ShapeError("path must start at time 0")
    segs = []
    for (u0, x0), (u1, x1) in zip(
        zip(path.times, path.values), zip(path.times[1:], path.values[1:])
    ):
        segs.append(Segment(u0, (x0 - x1) / (u1 - u0), ZERO))
    u_last, x_last = path.times[-1], path.values[-1]
    if u_last < 1:
        segs.append(Segment(u_last, x_last / (1 - u_last), ZERO))
    elif x_last != 0:
        raise AdmissibilityError("path value at the horizon must be 0")
    return PiecewiseControl(segments=tuple(segs), horizon=ONE, bound=ONE)


# ---------------------------------------------------------------------------
# trajectory: explicit piecewise polynomials for export


@dataclass(frozen=True)
class Trajectory:
    """Piecewise-polynomial representation of (Y1, Y2) down to a truncation point.

    Coefficients are ascending in t.  Y1 pieces have degree <= 2 and Y2
    pieces degree <= 4 (degree <= 2 for piecewise-constant controls).
    Beyond the truncation point the exact anchor values apply.
    """

    pieces: tuple  # (lo, hi, y1_coeffs, y2_coeffs)
    truncation_depth: Optional[int]
    tail_y1: Fraction
    tail_y2: Fraction

    def _piece(self, t):
        for lo, hi, p1, p2 in self.pieces:
            if lo <= t < hi:
                return p1, p2
        raise DomainError("time %s beyond the materialized trajectory" % (t,))

    def y1_at(self, t) -> Fraction:
        t = as_fraction(t)
        if t == 1:
            return ZERO
        if self.pieces and t == self.pieces[-1][1]:
            return self.tail_y1
        p1, _ = self._piece(t)
        return _eval_poly(p1, t)

    def y2_at(self, t) -> Fraction:
        t = as_fraction(t)
        if t == 1:
            return ZERO
        if self.pieces and t == self.pieces[-1][1]:
            return self.tail_y2
        _, p2 = self._piece(t)
        return _eval_poly(p2, t)


def _eval_poly(coeffs, x):
    total = ZERO
    for c in reversed(coeffs):
        total = total * x + c
    return total


def _poly_scale(coeffs, k):
    return tuple(k * c for c in coeffs)


def _poly_add(p, q):
    n = max(len(p), len(q))
    p = tuple(p) + (ZERO,) * (n - len(p))
    q = tuple(q) + (ZERO,) * (n - len(q))
    return tuple(a + b for a, b in zip(p, q))


def _poly_mul(p, q):
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return tuple(out)


def _poly_antideriv(p):
    return (ZERO,) + tuple(c / (i + 1) for i, c in enumerate(p))


def _poly_trim(p):
    n = len(p)
    while n > 1 and p[n - 1] == 0:
        n -= 1
    return tuple(p[:n])


def build_trajectory(control: PiecewiseControl, depth: int = 24) -> Trajectory:
    """Materialize (Y1, Y2) polynomials from 0 down to the truncation point.

    The truncation point is the symbolic tail start when there is one, the
    zero-tail start for controls that end early, and t_depth for controls
    whose final segment carries mass all the way to the horizon.
    """
    if control.horizon != 1:
        raise DomainError("trajectories are built on horizon 1")
    last = control.segments[-1]
    if control.tail is not None:
        end = control.tail_start
        gen = locate(end).generation
        anchor = _Anchor(end, tail_y1_anchor(gen), tail_y2_anchor(gen), tail_self_anchor(gen))
    elif last.is_zero:
        anchor = _Anchor(last.start, ZERO, ZERO, ZERO)
    else:
        end = t_point(depth)
        poly = (last.c0, last.c1)
        v = _poly_integral(poly, end, ONE)
        anchor = _Anchor(end, v, _final_tail_y2(poly, end), v * v / 2)
    pieces = _segment_pieces(list(control.segments), ZERO, anchor.end, control.horizon)
    if control.tail is None and not last.is_zero:
        depth_out = depth
    elif control.tail is not None:
        depth_out = locate(anchor.end).generation
    else:
        depth_out = None
    y1_right = anchor.y1
    y2_right = anchor.y2
    out = []
    for lo, hi, poly in reversed(pieces):
        cuts = [lo] + breakpoints_between(lo, hi) + [hi]
        for a, b in zip(reversed(cuts[:-1]), reversed(cuts[1:])):
            c = kernel_value(a)
            prim = _poly_antideriv(poly)
            # Y1(s) = y1_right + P(b) - P(s)
            y1_poly = _poly_trim(
                _poly_add((y1_right + _eval_poly(prim, b),), _poly_scale(prim, -1)))
            # Y2(s) = y2_right + c * (Y1(s)^2 - y1_right^2) / 2
            sq = _poly_mul(y1_poly, y1_poly)
            y2_poly = _poly_trim(_poly_add(
                (y2_right - c * y1_right * y1_right / 2,), _poly_scale(sq, Fraction(c, 2))
            ))
            out.append((a, b, y1_poly, y2_poly))
            inc = _poly_integral(poly, a, b)
            y2_right += c * inc * (y1_right + inc / 2)
            y1_right += inc
    out.reverse()
    return Trajectory(
        pieces=tuple(out),
        truncation_depth=depth_out,
        tail_y1=anchor.y1,
        tail_y2=anchor.y2,
    )


def write_trajectory_csv(control: PiecewiseControl, grid: Sequence, out, precision: Optional[int] = None):
    """CSV rows (t, Y1, Y2) on the requested grid, exact with optional decimals."""
    import csv

    writer = csv.writer(out)
    header = ["t", "y1", "y2"]
    if precision is not None:
        header += ["t_decimal", "y1_decimal", "y2_decimal"]
    writer.writerow(header)
    for t in grid:
        t = as_fraction(t)
        a, b = y1(control, t), y2(control, t)
        row = [format_rational(t), format_rational(a), format_rational(b)]
        if precision is not None:
            row += [decimal_str(t, precision), decimal_str(a, precision), decimal_str(b, precision)]
        writer.writerow(row)


# ---------------------------------------------------------------------------
# floating cross-check oracle


def _float_pieces(control: PiecewiseControl, t: Fraction, depth: int, weighted: bool):
    """Kernel-split float pieces of [t, end] plus float anchors at the end."""

    def final_anchor(poly, u):
        if weighted:
            return float(_final_tail_y2(poly, u))
        v = _poly_integral(poly, u, ONE)
        return float(v * v / 2)

    if control.tail is not None:
        gen = depth
        if t >= control.tail_start:
            gen = max(gen, locate(t).generation + 2)
        end = t_point(gen)
        segs = list(control.segments) + hat_segments(control.tail_start, end)
        anchor_y1 = float(tail_y1_anchor(gen))
        anchor_y2 = float(tail_y2_anchor(gen) if weighted else tail_self_anchor(gen))
        cover = end
    else:
        last = control.segments[-1]
        poly = (last.c0, last.c1)
        segs = list(control.segments)
        cover = control.horizon
        if last.is_zero:
            end = last.start
            anchor_y1 = 0.0
            anchor_y2 = 0.0
        else:
            end = t_point(depth)
            if t >= end:
                return [], float(_poly_integral(poly, t, ONE)), final_anchor(poly, t)
            anchor_y1 = float(_poly_integral(poly, end, ONE))
            anchor_y2 = final_anchor(poly, end)
    if t >= end:
        return [], anchor_y1, anchor_y2
    pieces = []
    for lo, hi, poly in _segment_pieces(segs, t, end, cover):
        cuts = [lo] + breakpoints_between(lo, hi) + [hi]
        for a, b in zip(cuts, cuts[1:]):
            c = float(kernel_value(a)) if weighted else 1.0
            pieces.append((float(a), float(b), c, float(poly[0]), float(poly[1])))
    return pieces, anchor_y1, anchor_y2


def y2_numeric(control: PiecewiseControl, t, depth: int = 24, weighted: bool = True) -> float:
    """Adaptive floating quadrature of c * a * Y1 over [t, 1].

    Independent of the exact path: the control is evaluated pointwise in
    float, Y1 comes from float trapezoids (exact for affine pieces), and
    each smooth piece goes through scipy's adaptive quadrature.  The stretch
    beyond the materialization depth is closed-form and far below 1e-12.
    With weighted=False the kernel is dropped (self-integral oracle).
    """
    from scipy.integrate import quad

    t = as_fraction(t)
    if not 0 <= t <= 1:
        raise DomainError("time %s outside [0, 1]" % (t,))
    if t == 1:
        return 0.0
    pieces, anchor_y1, anchor_y2 = _float_pieces(control, t, depth, weighted)
    # Y1 floats at piece right endpoints, swept right to left
    y1_right = anchor_y1
    rights = []
    for a, b, _, c0, c1 in reversed(pieces):
        rights.append(y1_right)
        y1_right += (c0 + c1 * a + c0 + c1 * b) / 2.0 * (b - a)
    rights.reverse()
    total = anchor_y2
    for (a, b, c, c0, c1), y1_b in zip(pieces, rights):

        def integrand(s):
            alpha_s = c0 + c1 * s
            alpha_b = c0 + c1 * b
            y1_s = y1_b + (alpha_s + alpha_b) / 2.0 * (b - s)
            return c * alpha_s * y1_s

        val, _err = quad(integrand, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return total
