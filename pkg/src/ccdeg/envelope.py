"""Closed-convex envelopes of piecewise maps and the fixed-point compatibility scan.

The envelope of a map at a point is the limit, over shrinking balls, of
the closed convex hull of nearby map values.  Two routes are provided:

* ``envelope_exact``: the hull of the adjacent piece values.  Correct
  exactly because piece functions extend continuously to region closures.
* ``envelope_sampled``: hulls of map values over an explicit shrinking
  ball schedule, stopping when consecutive hulls agree in Hausdorff
  distance.  Serves as an independent cross-check of the exact route.

``check_condition`` scans a box (grid plus interface points, where the
interesting behaviour lives) for points that the envelope admits as fixed
points but the map itself does not.  Maps passing the scan are the ones
whose degree has the existence property.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ToolkitError
from .geometry import ConvexBody, contains, convex_hull, hausdorff_distance
from .maps import PiecewiseMap, interface_points
from .parallel import pmap

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class EnvelopeResult:
    """Envelope value at one point, with sampling evidence when applicable.

    ``epsilon_trace`` rows are (radius, hull, gap to previous hull); the
    trace is empty in exact mode.
    """

    value: ConvexBody
    mode: str  # "exact" | "sampled"
    epsilon_trace: tuple[tuple[float, ConvexBody, float], ...] = ()


@dataclass(frozen=True)
class Violation:
    point: tuple[float, ...]
    envelope: ConvexBody
    map_value: tuple[float, ...]
    in_range_hull: bool


@dataclass
class ConditionReport:
    """Result of the compatibility scan.

    ``rows`` has one entry per scanned point: (point, map value, envelope,
    violated flag).  ``verdict`` is "fails" iff ``violations`` is nonempty.
    """

    scanned: int
    violations: tuple[Violation, ...]
    tol: float
    rows: list[tuple[tuple[float, ...], tuple[float, ...], ConvexBody, bool]] = field(
        default_factory=list, repr=False
    )

    @property
    def verdict(self) -> str:
        return "fails" if self.violations else "holds"

    @property
    def holds(self) -> bool:
        return not self.violations

    def csv_rows(self):
        yield ("point", "map_value", "envelope", "violation")
        for p, v, env, bad in self.rows:
            yield (
                " ".join(repr(c) for c in p),
                " ".join(repr(c) for c in v),
                env.describe(),
                "1" if bad else "0",
            )


def envelope_exact(m: PiecewiseMap, x, tol: float = 1e-12) -> EnvelopeResult:
    """Envelope from declared interfaces: hull of the adjacent piece values."""
    values = m.adjacent_values(tuple(float(c) for c in x), tol)
    return EnvelopeResult(convex_hull(list(values)), "exact")


def default_schedule(m: PiecewiseMap, tol: float) -> list[float]:
    """Halving radii from an eighth of the smallest domain side to below tol."""
    eps = min(m.domain.widths) / 8.0
    if eps <= 0.0:
        raise ToolkitError("domain has a zero-width side")
    out = [eps]
    while out[-1] >= tol:
        out.append(out[-1] / 2.0)
    return out


def _ball_samples(m: PiecewiseMap, x, eps: float, n: int):
    """Quasi-uniform deterministic samples of the eps-ball clipped to the domain."""
    dom = m.domain
    if dom.dim == 1:
        lo = max(dom.lo[0], x[0] - eps)
        hi = min(dom.hi[0], x[0] + eps)
        pts = [(v,) for v in np.linspace(lo, hi, n)]
        pts.append((x[0],))
        return pts
    rings = 8
    per_ring = max(8, n // rings)
    pts = [tuple(x)]
    for j in range(1, rings + 1):
        r = eps * j / rings
        for k in range(per_ring):
            theta = 2.0 * math.pi * k / per_ring
            p = (x[0] + r * math.cos(theta), x[1] + r * math.sin(theta))
            q = (
                min(dom.hi[0], max(dom.lo[0], p[0])),
                min(dom.hi[1], max(dom.lo[1], p[1])),
            )
            pts.append(q)
    return pts


def envelope_sampled(m: PiecewiseMap, x, tol: float, schedule: list[float] | None = None,
                     samples_per_ball: int | None = None) -> EnvelopeResult:
    """Envelope by shrinking-ball sampling.

    Stops at the first Hausdorff gap below ``tol`` between consecutive
    hulls and returns the later hull.  Raises ConvergenceError (carrying
    the trace) if the schedule is exhausted first.
    """
    if tol <= 0.0:
        raise ToolkitError("tolerance must be positive")
    x = tuple(float(c) for c in x)
    if schedule is None:
        schedule = default_schedule(m, tol)
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ToolkitError("schedule must be strictly decreasing")
    if schedule[-1] >= tol:
        raise ToolkitError("schedule must descend below the tolerance")
    n = samples_per_ball if samples_per_ball is not None else (64 if m.domain.dim == 1 else 256)
    if n < 32:
        raise ToolkitError("need at least 32 samples per ball")

    trace: list[tuple[float, ConvexBody, float]] = []
    prev: ConvexBody | None = None
    for eps in schedule:
        values = [m.evaluate(p) for p in _ball_samples(m, x, eps, n)]
        hull = convex_hull(values)
        gap = hausdorff_distance(prev, hull) if prev is not None else math.inf
        trace.append((eps, hull, gap))
        if gap < tol:
            return EnvelopeResult(hull, "sampled", tuple(trace))
        prev = hull
    raise ConvergenceError("no convergence within the ball schedule", trace)


def range_hull(m: PiecewiseMap, resolution: int = 256) -> ConvexBody:
    """Hull of piece values over a domain grid plus all interface points.

    Over-approximates the closure of the envelope's range (the envelope
    maps into any convex set containing the map's values).
    """
    pts = list(m.domain.grid(resolution)) + list(interface_points(m, resolution=resolution))
    values: list[tuple[float, ...]] = []
    for p in pts:
        values.extend(m.adjacent_values(p))
    return convex_hull(values)


def scan_points(m: PiecewiseMap, scan, grid: int, resolution: int = 1024):
    """Deterministic scan set: grid of the box plus interface points in it."""
    pts = set(scan.grid(grid))
    pts.update(interface_points(m, within=scan, resolution=resolution))
    return sorted(pts)


def check_condition(m: PiecewiseMap, scan=None, grid: int = 101,
                    tol: float = MEMBERSHIP_TOL) -> ConditionReport:
    """Scan for envelope fixed points that are not genuine map fixed points.

    A point x is a violation iff its envelope contains x within ``tol``
    while the map value differs from x by more than ``tol``.  Violations
    can only occur where the envelope is not a singleton, so the scan
    augments the grid with all detected interface points.  Each violation
    records whether x lies in the hull of all map values (points outside
    it cannot be envelope range points, making those violations advisory).
    """
    scan_box = scan if scan is not None else m.domain
    if not m.domain.contains_box(scan_box):
        raise ToolkitError("scan box must lie inside the map domain")
    pts = scan_points(m, scan_box, grid)
    rhull = range_hull(m)

    def probe(p):
        env = envelope_exact(m, p).value
        val = m.evaluate(p)
        bad = contains(env, p, tol) and math.dist(p, val) > tol
        return (p, val, env, bad)

    rows = pmap(probe, pts)
    violations = tuple(
        Violation(p, env, val, contains(rhull, p, tol))
        for p, val, env, bad in rows
        if bad
    )
    return ConditionReport(len(pts), violations, tol, rows)
