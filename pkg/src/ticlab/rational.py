"""Exact rational helpers: parsing, "p/q" formatting, decimal rendering."""

from __future__ import annotations

from fractions import Fraction


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and 'p/q' / decimal strings to an exact Fraction.

    Floats are rejected on purpose: silent binary-to-rational conversion is
    the classic way exactness guarantees get lost.
    """
    if isinstance(value, float):
        raise TypeError("refusing float %r; pass a Fraction, int or string" % (value,))
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def format_rational(q: Fraction) -> str:
    """Render a rational as the exact 'p/q' (or integer) string."""
    return str(as_fraction(q))


def decimal_str(q, digits: int = 12) -> str:
    """Fixed-point decimal rendering with round-half-even at `digits` places."""
    if digits < 0:
        raise ValueError("digits must be >= 0")
    q = as_fraction(q)
    n, d = q.numerator, q.denominator
    sign = "-" if n < 0 else ""
    quo, rem = divmod(abs(n) * 10**digits, d)
    twice = 2 * rem
    if twice > d or (twice == d and quo % 2 == 1):
        quo += 1
    if digits == 0:
        return sign + str(quo)
    whole, frac = divmod(quo, 10**digits)
    return "%s%d.%0*d" % (sign, whole, digits, frac)
