"""Outward-rounded-in-spirit interval arithmetic for range enclosures.

Intervals are plain ``(lo, hi)`` float pairs.  Operations return supersets
of the exact image, which is all the enclosure-based certification in
:mod:`ccdeg.degree` and :mod:`ccdeg.fixpoint` needs.  No directed rounding
is performed; a small multiplicative slack would be required for formally
verified bounds, which is outside this package's scope.
"""

from __future__ import annotations

import math

Ival = tuple[float, float]

FULL_LINE: Ival = (-math.inf, math.inf)


def exact(v: float) -> Ival:
    return (v, v)


def add(a: Ival, b: Ival) -> Ival:
    return (a[0] + b[0], a[1] + b[1])


def sub(a: Ival, b: Ival) -> Ival:
    return (a[0] - b[1], a[1] - b[0])


def neg(a: Ival) -> Ival:
    return (-a[1], -a[0])


def mul(a: Ival, b: Ival) -> Ival:
    cands = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(cands), max(cands))


def div(a: Ival, b: Ival) -> Ival:
    # Denominator spanning zero gives the whole line: sound, never prunes.
    if b[0] <= 0.0 <= b[1]:
        return FULL_LINE
    cands = (a[0] / b[0], a[0] / b[1], a[1] / b[0], a[1] / b[1])
    return (min(cands), max(cands))


def imin(a: Ival, b: Ival) -> Ival:
    return (min(a[0], b[0]), min(a[1], b[1]))


def imax(a: Ival, b: Ival) -> Ival:
    return (max(a[0], b[0]), max(a[1], b[1]))


def iabs(a: Ival) -> Ival:
    if a[0] >= 0.0:
        return a
    if a[1] <= 0.0:
        return (-a[1], -a[0])
    return (0.0, max(-a[0], a[1]))


def iexp(a: Ival) -> Ival:
    return (math.exp(a[0]), math.exp(a[1]))


def _trig_range(a: Ival, phase: float) -> Ival:
    """Range of sin(x + phase) for x in ``a``."""
    lo, hi = a[0] + phase, a[1] + phase
    if hi - lo >= 2.0 * math.pi:
        return (-1.0, 1.0)
    vals = [math.sin(lo), math.sin(hi)]
    # Interior critical points at pi/2 + k*pi.
    k = math.ceil((lo - math.pi / 2.0) / math.pi)
    crit = math.pi / 2.0 + k * math.pi
    while crit <= hi:
        vals.append(math.sin(crit))
        crit += math.pi
    return (min(vals), max(vals))


def isin(a: Ival) -> Ival:
    return _trig_range(a, 0.0)


def icos(a: Ival) -> Ival:
    return _trig_range(a, math.pi / 2.0)


def ipow(a: Ival, exponent: float) -> Ival:
    if exponent == round(exponent):
        n = int(round(exponent))
        if n == 0:
            return (1.0, 1.0)
        if n < 0:
            return div((1.0, 1.0), ipow(a, -n))
        lo, hi = a[0] ** n, a[1] ** n
        if n % 2 == 0 and a[0] < 0.0 < a[1]:
            return (0.0, max(lo, hi))
        return (min(lo, hi), max(lo, hi))
    # Fractional exponent: defined for nonnegative bases only.
    if a[0] < 0.0:
        return FULL_LINE
    return (a[0] ** exponent, a[1] ** exponent)


def hull(parts: list[Ival]) -> Ival:
    return (min(p[0] for p in parts), max(p[1] for p in parts))


def contains_zero(a: Ival) -> bool:
    return a[0] <= 0.0 <= a[1]
